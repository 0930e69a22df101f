//! Dense univariate polynomials over the scalar field and over the exact
//! series ring, plus the fraction-free determinant used for resultants.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{CoreError, Result};
use crate::puiseux::PuiseuxElem;
use crate::scalar::{Rat, Scalar};

/// Coefficient operations shared by `Scalar` and exact `PuiseuxElem`.
pub trait Coeff: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Exact division in the ambient domain, `None` when impossible.
    fn try_exact_div(&self, rhs: &Self) -> Option<Self>;
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_exact_div(&self, rhs: &Self) -> Option<Self> {
        self.div(rhs).ok()
    }
}

impl Coeff for PuiseuxElem {
    fn zero() -> Self {
        PuiseuxElem::zero()
    }
    fn one() -> Self {
        PuiseuxElem::one()
    }
    fn is_zero(&self) -> bool {
        self.is_exact_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        PuiseuxElem::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        PuiseuxElem::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        PuiseuxElem::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        PuiseuxElem::neg(self)
    }
    fn try_exact_div(&self, rhs: &Self) -> Option<Self> {
        PuiseuxElem::try_exact_div(self, rhs)
    }
}

// Polynomials over a field nest as coefficients (elimination of one
// variable via resultants).
impl Coeff for Poly<Scalar> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        Poly::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Poly::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Poly::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn try_exact_div(&self, rhs: &Self) -> Option<Self> {
        let (q, r) = self.divrem(rhs).ok()?;
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }
}

/// Dense polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, PartialEq)]
pub struct Poly<T: Coeff> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Poly<T> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![T::one()] }
    }

    pub fn constant(c: T) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// Monomial `c·z^k`.
    pub fn monomial(c: T, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().map(T::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; 0 for the zero polynomial by convention (query `is_zero`).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Order of vanishing at 0: index of the first nonzero coefficient.
    pub fn vanishing_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).add(&rhs.coeff(k)));
        }
        Poly::from_coeffs(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).sub(&rhs.coeff(k)));
        }
        Poly::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(T::neg).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let mut s = T::zero();
            for _ in 0..k {
                s = s.add(c);
            }
            out.push(s);
        }
        Poly::from_coeffs(out)
    }

    /// `self(a·z + b)`, by Horner on the affine substitution.
    pub fn compose_affine(&self, a: &T, b: &T) -> Self {
        let lin = Poly::from_coeffs(vec![b.clone(), a.clone()]);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Reverse coefficients against an explicit degree bound `d >= deg`:
    /// `z^d · self(1/z)`.
    pub fn reverse(&self, d: usize) -> Self {
        let mut out = vec![T::zero(); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[d - k] = c.clone();
        }
        Poly::from_coeffs(out)
    }

    /// Homogeneous substitution `self((az+b)/(cz+d))·(cz+d)^bound`:
    /// numerator polynomial of the Möbius-precomposed map.
    pub fn compose_moebius_num(&self, a: &T, b: &T, c: &T, d: &T, bound: usize) -> Self {
        let up = Poly::from_coeffs(vec![b.clone(), a.clone()]);
        let dn = Poly::from_coeffs(vec![d.clone(), c.clone()]);
        let mut acc = Poly::zero();
        let mut dn_pow = Poly::one();
        // Horner from the top coefficient down (degree `bound` such that
        // self has degree <= bound); acc·up + coeff·dn^(bound-k)
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(bound + 1, T::zero());
        for k in (0..=bound).rev() {
            acc = acc.mul(&up).add(&Poly::constant(coeffs[k].clone()).mul(&dn_pow));
            if k > 0 {
                dn_pow = dn_pow.mul(&dn);
            }
        }
        acc
    }
}

impl<T: Coeff + fmt::Display> Poly<T> {
    /// Render with the given variable name, highest degree first.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut parts: Vec<String> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = format!("{c}");
            let body = match k {
                0 => cs,
                1 => {
                    if cs == "1" {
                        format!("{var}")
                    } else {
                        format!("{cs}*{var}")
                    }
                }
                _ => {
                    if cs == "1" {
                        format!("{var}^{k}")
                    } else {
                        format!("{cs}*{var}^{k}")
                    }
                }
            };
            parts.push(body);
        }
        parts.join(" + ")
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("z"))
    }
}

impl<T: Coeff + fmt::Display> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("z"))
    }
}

// Field-only operations.
impl Poly<Scalar> {
    /// Euclidean division; the divisor must be nonzero.
    pub fn divrem(&self, rhs: &Self) -> Result<(Self, Self)> {
        if rhs.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        let dlead = rhs.leading().unwrap().clone();
        let dlead_inv = dlead.inv()?;
        while !rem.is_zero() && rem.degree() >= rhs.degree() {
            let k = rem.degree() - rhs.degree();
            let c = &rem.leading().unwrap().clone() * &dlead_inv;
            let term = Poly::monomial(c, k);
            rem = rem.sub(&term.mul(rhs));
            quo = quo.add(&term);
        }
        Ok((quo, rem))
    }

    /// Monic gcd; `gcd(p, 0) = monic(p)`, `gcd(0, 0) = 0`.
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    /// Exact quotient; error when the division is not exact.
    pub fn exact_div(&self, rhs: &Self) -> Result<Self> {
        let (q, r) = self.divrem(rhs)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(CoreError::InvalidFamily(String::from("inexact polynomial division")))
        }
    }

    /// Yun square-free decomposition: returns `(factor, multiplicity)` with
    /// pairwise-coprime square-free monic factors, `prod factor^mult = monic(self)`.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly<Scalar>, usize)> {
        let p = self.monic();
        if p.is_constant() {
            return Vec::new();
        }
        let dp = p.derivative();
        let a0 = p.gcd(&dp);
        let mut b = p.exact_div(&a0).expect("gcd divides");
        let mut c = dp.exact_div(&a0).expect("gcd divides");
        let mut out = Vec::new();
        let mut mult = 1usize;
        loop {
            let d = c.sub(&b.derivative());
            let f = b.gcd(&d);
            if f.degree() > 0 {
                out.push((f.clone(), mult));
            }
            b = b.exact_div(&f).expect("gcd divides");
            c = d.exact_div(&f).expect("gcd divides");
            if b.is_constant() {
                break;
            }
            mult += 1;
        }
        out
    }

    /// Multiplicity of the exact root `r` (0 when not a root).
    pub fn root_multiplicity(&self, r: &Scalar) -> usize {
        if self.is_zero() {
            return 0;
        }
        let lin = Poly::from_coeffs(vec![-r, Scalar::one()]);
        let mut p = self.clone();
        let mut m = 0usize;
        loop {
            let (q, rem) = p.divrem(&lin).expect("linear divisor");
            if !rem.is_zero() {
                return m;
            }
            m += 1;
            p = q;
            if p.is_zero() {
                return m;
            }
        }
    }

    /// f64 evaluation via coefficient approximation.
    pub fn eval_f64(&self, z: num_complex::Complex64) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            let (re, im) = c.to_f64_pair();
            acc = acc * z + num_complex::Complex64::new(re, im);
        }
        acc
    }
}

// Series-coefficient helpers.
impl Poly<PuiseuxElem> {
    /// Least valuation over all coefficients (the content exponent).
    pub fn content_valuation(&self) -> Result<Option<Rat>> {
        let mut best: Option<Rat> = None;
        for c in &self.coeffs {
            if c.is_exact_zero() {
                continue;
            }
            let v = c.finite_valuation()?;
            best = Some(match best {
                None => v,
                Some(b) => b.min(v),
            });
        }
        Ok(best)
    }

    /// Multiply every coefficient by `t^e`.
    pub fn shift_all(&self, e: &Rat) -> Self {
        Poly::from_coeffs(self.coeffs.iter().map(|c| c.shift(e)).collect())
    }

    /// Reduce every coefficient to the residue field; requires all
    /// valuations >= 0.
    pub fn reduce(&self) -> Result<Poly<Scalar>> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if c.is_exact_zero() {
                out.push(Scalar::zero());
            } else {
                out.push(c.reduce_scalar()?);
            }
        }
        Ok(Poly::from_coeffs(out))
    }

    pub fn all_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact())
    }
}

/// Fraction-free (Bareiss) determinant over an integral domain with exact
/// division. Row swaps flip the sign; a zero column short-circuits to zero.
pub fn bareiss_determinant<T: Coeff>(mat: &[Vec<T>]) -> Result<T> {
    let n = mat.len();
    if n == 0 {
        return Ok(T::one());
    }
    let mut m: Vec<Vec<T>> = mat.to_vec();
    for row in &m {
        if row.len() != n {
            return Err(CoreError::InvalidFamily(String::from("non-square matrix")));
        }
    }
    let mut sign_neg = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign_neg = !sign_neg;
                }
                None => return Ok(T::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.try_exact_div(&prev).ok_or_else(|| {
                    CoreError::PrecisionExceeded(String::from(
                        "inexact division in fraction-free elimination",
                    ))
                })?;
            }
            m[i][k] = T::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign_neg { det.neg() } else { det })
}

/// Homogeneous resultant of two degree-`d` forms given by their coefficient
/// lists (ascending, length `d+1`, zero-padded).
pub fn homogeneous_resultant<T: Coeff>(p: &[T], q: &[T], d: usize) -> Result<T> {
    if d == 0 {
        return Ok(T::one());
    }
    let n = 2 * d;
    let mut mat = vec![vec![T::zero(); n]; n];
    let get = |v: &[T], k: usize| v.get(k).cloned().unwrap_or_else(T::zero);
    for row in 0..d {
        for k in 0..=d {
            // row r holds coefficients of z^r * p, in columns by degree
            mat[row][row + k] = get(p, d - k);
        }
        for k in 0..=d {
            mat[d + row][row + k] = get(q, d - k);
        }
    }
    bareiss_determinant(&mat)
}

/// Resultant of two polynomials of stated degrees (for elimination).
pub fn resultant<T: Coeff>(p: &Poly<T>, q: &Poly<T>) -> Result<T> {
    let dp = if p.is_zero() { 0 } else { p.degree() };
    let dq = if q.is_zero() { 0 } else { q.degree() };
    if dp == 0 && dq == 0 {
        return Ok(T::one());
    }
    let n = dp + dq;
    let mut mat = vec![vec![T::zero(); n]; n];
    for row in 0..dq {
        for k in 0..=dp {
            mat[row][row + k] = p.coeff(dp - k);
        }
    }
    for row in 0..dp {
        for k in 0..=dq {
            mat[dq + row][row + k] = q.coeff(dq - k);
        }
    }
    bareiss_determinant(&mat)
}
