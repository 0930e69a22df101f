//! Exact Puiseux/Laurent series around `t = 0` over the Gaussian rationals.
//!
//! An element is a finite sum of terms `c · t^e` with `c` in `Q(i)` and `e`
//! rational, plus an optional precision bound `N` meaning "terms with
//! exponent >= N are unknown". Exact elements (no bound) are closed under
//! `+ - ·`; division introduces a bound unless the divisor is a monomial.
//! The norm is `|x|_r = r^q` with `q` the least exponent carrying a nonzero
//! coefficient; all comparisons run on the exact exponent `q`, never on `r`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{CoreError, Result};
use crate::scalar::{parse_rat, rat_string, Rat, Scalar};
use crate::working_precision;

/// Valuation exponent: `q` with `|x|_r = r^q`, or `+infinity` for exact zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValExp {
    Finite(Rat),
    Infinity,
}

impl ValExp {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ValExp::Finite(q) => Some(q),
            ValExp::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ValExp::Infinity)
    }
}

impl PartialOrd for ValExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ValExp {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ValExp::Infinity, ValExp::Infinity) => Ordering::Equal,
            (ValExp::Infinity, ValExp::Finite(_)) => Ordering::Greater,
            (ValExp::Finite(_), ValExp::Infinity) => Ordering::Less,
            (ValExp::Finite(a), ValExp::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ValExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValExp::Finite(q) => write!(f, "{q}"),
            ValExp::Infinity => write!(f, "+inf"),
        }
    }
}

/// An element of `Q(i)[t^{1/m}, t^{-1/m}]`, optionally truncated.
///
/// Invariants: stored coefficients are nonzero; exponents are strictly
/// increasing (`BTreeMap` order); with a precision bound every stored
/// exponent is `< prec`.
#[derive(Clone, PartialEq, Eq)]
pub struct PuiseuxElem {
    terms: BTreeMap<Rat, Scalar>,
    prec: Option<Rat>,
}

impl PuiseuxElem {
    pub fn zero() -> Self {
        PuiseuxElem { terms: BTreeMap::new(), prec: None }
    }

    pub fn one() -> Self {
        PuiseuxElem::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Rat::zero(), c);
        }
        PuiseuxElem { terms, prec: None }
    }

    pub fn from_i64(n: i64) -> Self {
        PuiseuxElem::constant(Scalar::from_i64(n))
    }

    /// `c · t^e`.
    pub fn monomial(c: Scalar, e: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        PuiseuxElem { terms, prec: None }
    }

    /// `t^e`.
    pub fn t_pow(e: Rat) -> Self {
        PuiseuxElem::monomial(Scalar::one(), e)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rat, Scalar)>) -> Self {
        let mut out = PuiseuxElem::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: Rat, c: Scalar) {
        if c.is_zero() {
            return;
        }
        if let Some(p) = &self.prec {
            if &e >= p {
                return;
            }
        }
        match self.terms.entry(e) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn set_prec(&mut self, p: Option<Rat>) {
        self.prec = p;
        if let Some(p) = self.prec.clone() {
            self.terms = core::mem::take(&mut self.terms)
                .into_iter()
                .filter(|(e, _)| e < &p)
                .collect();
        }
    }

    /// True for the exact zero element (no terms, no bound).
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.prec.is_none()
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn precision(&self) -> Option<&Rat> {
        self.prec.as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Rat, &Scalar)> {
        self.terms.iter().next()
    }

    /// A single-term exact element `c·t^e`.
    pub fn as_monomial(&self) -> Option<(&Rat, &Scalar)> {
        if self.terms.len() == 1 && self.prec.is_none() {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Least exponent with nonzero coefficient; `+inf` for exact zero.
    pub fn valuation(&self) -> Result<ValExp> {
        match self.terms.iter().next() {
            Some((e, _)) => Ok(ValExp::Finite(e.clone())),
            None => {
                if self.prec.is_none() {
                    Ok(ValExp::Infinity)
                } else {
                    Err(CoreError::InsufficientPrecision(format!(
                        "element is O(t^{}) with no known term",
                        self.prec.as_ref().unwrap()
                    )))
                }
            }
        }
    }

    /// Finite valuation or an error (zero is rejected too).
    pub fn finite_valuation(&self) -> Result<Rat> {
        match self.valuation()? {
            ValExp::Finite(q) => Ok(q),
            ValExp::Infinity => Err(CoreError::DivisionByZero),
        }
    }

    /// Residue class in `k = C`: the coefficient at exponent 0.
    pub fn reduce_scalar(&self) -> Result<Scalar> {
        let zero = Rat::zero();
        if let Some((e, _)) = self.terms.iter().next() {
            if e < &zero {
                return Err(CoreError::NotIntegral);
            }
        }
        if let Some(p) = &self.prec {
            if p <= &zero {
                return Err(CoreError::InsufficientPrecision(String::from(
                    "coefficient at t^0 is not determined",
                )));
            }
        }
        Ok(self.terms.get(&zero).cloned().unwrap_or_else(Scalar::zero))
    }

    /// Ramification index: the lcm of exponent denominators (and of the
    /// precision bound's denominator), at least 1.
    pub fn ramification(&self) -> BigInt {
        let mut m = BigInt::one();
        for e in self.terms.keys() {
            m = m.lcm(e.denom());
        }
        if let Some(p) = &self.prec {
            m = m.lcm(p.denom());
        }
        m
    }

    pub fn neg(&self) -> Self {
        PuiseuxElem {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            prec: self.prec.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let prec = match (&self.prec, &rhs.prec) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(a.min(b).clone()),
        };
        let mut out = PuiseuxElem { terms: BTreeMap::new(), prec: None };
        out.set_prec(prec);
        for (e, c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        // Precision of a product: the unknown tail of one factor times the
        // leading term of the other.
        let prec = {
            let mut bounds: Vec<Rat> = Vec::new();
            if let Some(pa) = &self.prec {
                match rhs.terms.iter().next() {
                    Some((vb, _)) => bounds.push(pa + vb),
                    None => {
                        if rhs.prec.is_none() {
                            return PuiseuxElem::zero();
                        } else {
                            bounds.push(pa + rhs.prec.as_ref().unwrap())
                        }
                    }
                }
            }
            if let Some(pb) = &rhs.prec {
                match self.terms.iter().next() {
                    Some((va, _)) => bounds.push(pb + va),
                    None => {
                        if self.prec.is_none() {
                            return PuiseuxElem::zero();
                        } else {
                            bounds.push(pb + self.prec.as_ref().unwrap())
                        }
                    }
                }
            }
            bounds.into_iter().min()
        };
        if self.prec.is_none() && rhs.terms.is_empty() && rhs.prec.is_none() {
            return PuiseuxElem::zero();
        }
        let mut out = PuiseuxElem { terms: BTreeMap::new(), prec: None };
        out.set_prec(prec);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }

    /// Multiply by the exact monomial `c·t^e`.
    pub fn mul_monomial(&self, c: &Scalar, e: &Rat) -> Self {
        if c.is_zero() {
            return PuiseuxElem::zero();
        }
        PuiseuxElem {
            terms: self.terms.iter().map(|(k, v)| (k + e, v * c)).collect(),
            prec: self.prec.as_ref().map(|p| p + e),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        self.mul_monomial(c, &Rat::zero())
    }

    /// Multiply by `t^e`.
    pub fn shift(&self, e: &Rat) -> Self {
        self.mul_monomial(&Scalar::one(), e)
    }

    /// Multiplicative inverse. Exact for monomials; otherwise truncated at
    /// the working precision (or the divisor's own bound, whichever is
    /// tighter).
    pub fn inv(&self) -> Result<Self> {
        let v = self.finite_valuation()?;
        let lead = self.terms.get(&v).unwrap().clone();
        let lead_inv = lead.inv()?;
        if self.terms.len() == 1 && self.prec.is_none() {
            return Ok(PuiseuxElem::monomial(lead_inv, -v));
        }
        // self = lead·t^v (1 + u), val(u) > 0.
        let u = {
            let unit = self.mul_monomial(&lead_inv, &(-v.clone()));
            unit.sub(&PuiseuxElem::one())
        };
        let step = {
            // grid step of u's exponents
            let m = self.ramification();
            Rat::new(BigInt::one(), m)
        };
        let target: Rat = match &u.prec {
            Some(p) => {
                let w = &step * Rat::from(BigInt::from(working_precision()));
                if p < &w {
                    p.clone()
                } else {
                    w
                }
            }
            None => &step * Rat::from(BigInt::from(working_precision())),
        };
        // geometric series 1 - u + u^2 - ... below the target exponent
        let mut acc = PuiseuxElem::one();
        let mut pow = PuiseuxElem::one();
        let mut sign = false;
        loop {
            pow = pow.mul(&u);
            pow.set_prec(Some(match &pow.prec {
                Some(p) => p.min(&target).clone(),
                None => target.clone(),
            }));
            sign = !sign;
            if pow.terms.is_empty() {
                break;
            }
            acc = if sign { acc.sub(&pow) } else { acc.add(&pow) };
        }
        acc.set_prec(Some(target.clone()));
        Ok(acc.mul_monomial(&lead_inv, &(-v)))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.as_monomial().is_some() {
            let (e, c) = rhs.as_monomial().unwrap();
            return Ok(self.mul_monomial(&c.inv()?, &(-e.clone())));
        }
        Ok(self.mul(&rhs.inv()?))
    }

    /// Quotient with terms computed exactly for every exponent `< below`:
    /// the canonical-truncation division used by disk transport. The result
    /// carries precision `below` but every emitted term is exact.
    pub fn div_truncated(&self, rhs: &Self, below: &Rat) -> Result<Self> {
        let vr = rhs.finite_valuation()?;
        if let Some(p) = &rhs.prec {
            // Quotient terms at exponent qe read the remainder at qe + vr;
            // the divisor's unknown tail pollutes the remainder from
            // p + (vs - vr) on, so the quotient is sound below p + vs - 2vr.
            let vs = match self.valuation()? {
                ValExp::Finite(q) => q,
                ValExp::Infinity => return Ok(PuiseuxElem::zero()),
            };
            let sound = p + &vs - &vr - &vr;
            if &sound < below {
                return Err(CoreError::InsufficientPrecision(format!(
                    "divisor known only to O(t^{p}), quotient needed below t^{below}"
                )));
            }
        }
        if let Some(p) = &self.prec {
            if p < below {
                let vr2 = rhs.finite_valuation()?;
                let sound = p - vr2;
                if &sound < below {
                    return Err(CoreError::InsufficientPrecision(format!(
                        "dividend known only to O(t^{p})"
                    )));
                }
            }
        }
        // long division by ascending powers
        let lead = rhs.terms.get(&vr).unwrap().clone();
        let mut rem = self.clone();
        rem.prec = None;
        let mut out = PuiseuxElem::zero();
        loop {
            let (e, c) = match rem.terms.iter().next() {
                Some((e, c)) => (e.clone(), c.clone()),
                None => break,
            };
            let qe = &e - &vr;
            if &qe >= below {
                break;
            }
            let qc = c.div(&lead)?;
            out.add_term(qe.clone(), qc.clone());
            rem = rem.sub(&rhs.mul_monomial(&qc, &qe));
        }
        out.set_prec(Some(below.clone()));
        Ok(out)
    }

    /// Drop all terms with exponent `>= below` and any precision bound.
    /// Only sound when the discarded data is genuinely irrelevant (canonical
    /// disk centers).
    pub fn truncate_below_exact(&self, below: &Rat) -> Self {
        PuiseuxElem {
            terms: self.terms.iter().filter(|(e, _)| *e < below).map(|(e, c)| (e.clone(), c.clone())).collect(),
            prec: None,
        }
    }

    /// Exact division in the Laurent-polynomial ring. `None` when `rhs` does
    /// not divide exactly. Both sides must be exact.
    pub fn try_exact_div(&self, rhs: &Self) -> Option<Self> {
        if self.prec.is_some() || rhs.prec.is_some() {
            return None;
        }
        if rhs.is_exact_zero() {
            return None;
        }
        if self.is_exact_zero() {
            return Some(PuiseuxElem::zero());
        }
        let va = self.terms.keys().next().unwrap().clone();
        let vb = rhs.terms.keys().next().unwrap().clone();
        let ha = self.terms.keys().next_back().unwrap().clone();
        let hb = rhs.terms.keys().next_back().unwrap().clone();
        // exact quotient (if any) has exponents in [va-vb, ha-hb]
        if &ha - &hb < &va - &vb {
            return None;
        }
        let lead = rhs.terms.get(&vb).unwrap();
        let mut rem = self.clone();
        let mut out = PuiseuxElem::zero();
        let hi = &ha - &hb;
        while let Some((e, c)) = rem.terms.iter().next().map(|(e, c)| (e.clone(), c.clone())) {
            let qe = &e - &vb;
            if qe > hi {
                return None;
            }
            let qc = c.div(lead).ok()?;
            out.add_term(qe.clone(), qc.clone());
            rem = rem.sub(&rhs.mul_monomial(&qc, &qe));
        }
        Some(out)
    }

    /// Canonical textual form: `+`-joined terms
    /// `(<re>/<den>+<im>/<den>i)*t^(p/q)` in increasing exponent order,
    /// `0` for the zero element, with ` + O(t^(p/q))` for truncated data.
    pub fn canonical_string(&self) -> String {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{}*t^({})", c.canonical_string(), rat_string(e)))
            .collect();
        if parts.is_empty() {
            parts.push(String::from("0"));
        }
        let mut s = parts.join(" + ");
        if let Some(p) = &self.prec {
            s.push_str(&format!(" + O(t^({}))", rat_string(p)));
        }
        s
    }

    /// Parse the canonical form and relaxed variants: `0`, `1`, `-3/2`,
    /// `t`, `t^2`, `t^(-1)`, `2*t^(1/2)`, `(1+2i)*t^(-1/1)`, sums thereof,
    /// and a trailing `O(t^(p/q))` bound.
    pub fn parse(input: &str) -> Result<Self> {
        let mut out = PuiseuxElem::zero();
        let mut prec: Option<Rat> = None;
        for raw in split_top_level_sum(input)? {
            let term = raw.trim();
            if term.is_empty() {
                continue;
            }
            if let Some(rest) = term.strip_prefix("O(") {
                let inner = rest.strip_suffix(')').ok_or_else(|| {
                    CoreError::InsufficientPrecision(String::from("unterminated O(...)"))
                })?;
                let inner = inner.trim();
                let e = parse_exponent(inner.strip_prefix("t^").unwrap_or(inner))?;
                prec = Some(match prec {
                    Some(p) => p.min(e),
                    None => e,
                });
                continue;
            }
            let (coeff_str, exp_str) = match term.find("*t^") {
                Some(k) => (&term[..k], Some(&term[k + 3..])),
                None => {
                    if let Some(rest) = term.strip_prefix("t^") {
                        ("1", Some(rest))
                    } else if let Some(rest) = term.strip_prefix("-t^") {
                        ("-1", Some(rest))
                    } else if term == "t" {
                        ("1", Some("1"))
                    } else if term == "-t" {
                        ("-1", Some("1"))
                    } else {
                        (term, None)
                    }
                }
            };
            let c = Scalar::parse(coeff_str)?;
            let e = match exp_str {
                Some(s) => parse_exponent(s)?,
                None => Rat::zero(),
            };
            out.add_term(e, c);
        }
        if prec.is_some() {
            out.set_prec(prec);
        }
        Ok(out)
    }

    /// Evaluate at a complex point (used by the verifier). Fractional
    /// exponents take the principal branch. Errors on truncated elements.
    pub fn eval_f64(&self, t_re: f64, t_im: f64) -> Result<(f64, f64)> {
        if self.prec.is_some() {
            return Err(CoreError::InsufficientPrecision(String::from(
                "cannot numerically evaluate a truncated element",
            )));
        }
        use num_complex::Complex64;
        let t = Complex64::new(t_re, t_im);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let (cr, ci) = c.to_f64_pair();
            let ef = e.to_f64().ok_or_else(|| {
                CoreError::PrecisionExceeded(String::from("exponent out of f64 range"))
            })?;
            acc += Complex64::new(cr, ci) * t.powc(Complex64::new(ef, 0.0));
        }
        Ok((acc.re, acc.im))
    }
}

fn parse_exponent(s: &str) -> Result<Rat> {
    let s = s.trim();
    let inner = if s.starts_with('(') && s.ends_with(')') { &s[1..s.len() - 1] } else { s };
    parse_rat(inner)
}

/// Split a textual sum at top-level `+`/`-` (parenthesis-aware); the sign is
/// kept with the following term.
fn split_top_level_sum(input: &str) -> Result<Vec<String>> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    let mut prev_meaning: Option<char> = None;
    for ch in input.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                if depth == 0 {
                    return Err(CoreError::InsufficientPrecision(String::from(
                        "unbalanced parentheses",
                    )));
                }
                depth -= 1;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                let splits = !cur.trim().is_empty()
                    && !matches!(prev_meaning, Some('^') | Some('*') | Some('/') | Some('e'));
                if splits {
                    parts.push(core::mem::take(&mut cur));
                    if ch == '-' {
                        cur.push('-');
                    }
                } else {
                    cur.push(ch);
                }
            }
            _ => cur.push(ch),
        }
        if !ch.is_whitespace() {
            prev_meaning = Some(ch);
        }
    }
    if depth != 0 {
        return Err(CoreError::InsufficientPrecision(String::from("unbalanced parentheses")));
    }
    if !cur.trim().is_empty() {
        parts.push(cur);
    }
    Ok(parts)
}

impl fmt::Display for PuiseuxElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

impl fmt::Debug for PuiseuxElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_i};

    fn t() -> PuiseuxElem {
        PuiseuxElem::t_pow(rat_i(1))
    }

    fn t_inv() -> PuiseuxElem {
        PuiseuxElem::t_pow(rat_i(-1))
    }

    #[test]
    fn valuation_examples() {
        // t^-1 + 1 -> -1
        let x = t_inv().add(&PuiseuxElem::one());
        assert_eq!(x.valuation().unwrap(), ValExp::Finite(rat_i(-1)));
        // exact 0 -> +inf
        assert_eq!(PuiseuxElem::zero().valuation().unwrap(), ValExp::Infinity);
        // 3 + 5t^2 -> 0 (a unit of the ring of integers)
        let u = PuiseuxElem::from_i64(3)
            .add(&PuiseuxElem::monomial(Scalar::from_i64(5), rat_i(2)));
        assert_eq!(u.valuation().unwrap(), ValExp::Finite(rat_i(0)));
    }

    #[test]
    fn truncated_zero_is_rejected() {
        let mut x = PuiseuxElem::zero();
        x.set_prec(Some(rat_i(3)));
        assert!(matches!(x.valuation(), Err(CoreError::InsufficientPrecision(_))));
    }

    #[test]
    fn arithmetic_examples() {
        // t^-1 * t = 1
        assert_eq!(t_inv().mul(&t()), PuiseuxElem::one());
        // 1 / (1 - t) = 1 + t + t^2 + ... truncated at the working precision
        let geom = PuiseuxElem::one().div(&PuiseuxElem::one().sub(&t())).unwrap();
        let w = crate::working_precision() as i64;
        assert_eq!(geom.precision(), Some(&rat_i(w)));
        assert_eq!(geom.num_terms() as i64, w);
        for (e, c) in geom.terms() {
            assert!(c.is_one(), "coefficient at t^{e}");
        }
        // ramification merge: t^(1/2) + t has m = 2
        let x = PuiseuxElem::t_pow(rat(1, 2)).add(&t());
        assert_eq!(x.ramification(), BigInt::from(2));
        assert_eq!(x.num_terms(), 2);
    }

    #[test]
    fn reduce_examples() {
        let x = PuiseuxElem::from_i64(3)
            .add(&PuiseuxElem::monomial(Scalar::from_i64(5), rat_i(2)));
        assert_eq!(x.reduce_scalar().unwrap(), Scalar::from_i64(3));
        assert_eq!(t().reduce_scalar().unwrap(), Scalar::zero());
        assert_eq!(t_inv().reduce_scalar(), Err(CoreError::NotIntegral));
    }

    #[test]
    fn reduce_needs_the_constant_term() {
        // known only to O(t^0) with no visible term: residue undetermined
        let mut x = PuiseuxElem::zero();
        x.set_prec(Some(rat_i(0)));
        assert!(matches!(x.reduce_scalar(), Err(CoreError::InsufficientPrecision(_))));
        // a visible pole dominates: NotIntegral wins
        let mut y = PuiseuxElem::monomial(Scalar::one(), rat_i(-1));
        y.set_prec(Some(rat_i(0)));
        assert_eq!(y.reduce_scalar(), Err(CoreError::NotIntegral));
    }

    #[test]
    fn division_by_monomial_is_exact() {
        let x = PuiseuxElem::one().add(&t());
        let q = x.div(&PuiseuxElem::t_pow(rat_i(2))).unwrap();
        assert!(q.is_exact());
        assert_eq!(q.valuation().unwrap(), ValExp::Finite(rat_i(-2)));
    }

    #[test]
    fn exact_division() {
        let a = PuiseuxElem::one().add(&t());
        let b = PuiseuxElem::one().sub(&t());
        let prod = a.mul(&b);
        assert_eq!(prod.try_exact_div(&a).unwrap(), b);
        assert_eq!(prod.try_exact_div(&b).unwrap(), a);
        assert!(a.try_exact_div(&b).is_none());
    }

    #[test]
    fn canonical_round_trip() {
        let x = PuiseuxElem::from_terms([
            (rat_i(-1), Scalar::from_i64(2)),
            (rat(1, 2), Scalar::new(rat(1, 3), rat(-4, 5))),
            (rat_i(3), Scalar::i()),
        ]);
        let s = x.canonical_string();
        assert_eq!(PuiseuxElem::parse(&s).unwrap(), x, "{s}");
        assert_eq!(PuiseuxElem::parse("0").unwrap(), PuiseuxElem::zero());
    }

    #[test]
    fn relaxed_parse() {
        assert_eq!(PuiseuxElem::parse("t").unwrap(), t());
        assert_eq!(PuiseuxElem::parse("1*t^(-1)").unwrap(), t_inv());
        assert_eq!(
            PuiseuxElem::parse("1 + 2*t^(1/2)").unwrap(),
            PuiseuxElem::one().add(&PuiseuxElem::monomial(Scalar::from_i64(2), rat(1, 2)))
        );
        assert_eq!(
            PuiseuxElem::parse("-t + 3").unwrap(),
            PuiseuxElem::from_i64(3).sub(&t())
        );
    }
}
