//! Rational map families over the series field, their reductions
//! `h~ = H·phi` at the residue field, divisor supports, and the
//! good-reduction test.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::algebraic::{self, ResidueValue};
use crate::error::{CoreError, Result};
use crate::geometry::{Moebius, ProjPoint};
use crate::poly::{homogeneous_resultant, resultant, Poly};
use crate::puiseux::PuiseuxElem;
use crate::scalar::{Rat, Scalar};

/// A degree-`d` family `f = P/Q` with exact series coefficients and nonzero
/// homogeneous resultant (the specialisation has degree `d` for `t != 0`).
#[derive(Clone, Debug)]
pub struct RationalMapFamily {
    degree: usize,
    num: Poly<PuiseuxElem>,
    den: Poly<PuiseuxElem>,
}

impl RationalMapFamily {
    pub fn new(num: Vec<PuiseuxElem>, den: Vec<PuiseuxElem>, degree: usize) -> Result<Self> {
        if num.len() > degree + 1 || den.len() > degree + 1 {
            return Err(CoreError::InvalidFamily(format!(
                "coefficient lists exceed degree {degree}"
            )));
        }
        let num = Poly::from_coeffs(num);
        let den = Poly::from_coeffs(den);
        if !num.all_exact() || !den.all_exact() {
            return Err(CoreError::InsufficientPrecision(String::from(
                "family coefficients must be exact",
            )));
        }
        if num.is_zero() && den.is_zero() {
            return Err(CoreError::InvalidFamily(String::from("zero map")));
        }
        let fam = RationalMapFamily { degree, num, den };
        let res = fam.resultant()?;
        if res.is_exact_zero() {
            return Err(CoreError::InvalidFamily(String::from(
                "homogeneous resultant vanishes",
            )));
        }
        Ok(fam)
    }

    /// Internal constructor for compositions whose nondegeneracy is implied
    /// by the factors'.
    fn new_unchecked(num: Poly<PuiseuxElem>, den: Poly<PuiseuxElem>, degree: usize) -> Self {
        RationalMapFamily { degree, num, den }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num(&self) -> &Poly<PuiseuxElem> {
        &self.num
    }

    pub fn den(&self) -> &Poly<PuiseuxElem> {
        &self.den
    }

    /// Homogeneous resultant of the degree-`d` coefficient forms.
    pub fn resultant(&self) -> Result<PuiseuxElem> {
        let pad = |p: &Poly<PuiseuxElem>| -> Vec<PuiseuxElem> {
            (0..=self.degree).map(|k| p.coeff(k)).collect()
        };
        homogeneous_resultant(&pad(&self.num), &pad(&self.den), self.degree)
    }

    /// Evaluate homogeneously at a projective point.
    pub fn apply_proj(&self, p: &ProjPoint) -> ProjPoint {
        let d = self.degree;
        let mut num_pow = vec![PuiseuxElem::one()];
        let mut den_pow = vec![PuiseuxElem::one()];
        for k in 1..=d {
            num_pow.push(num_pow[k - 1].mul(&p.numer));
            den_pow.push(den_pow[k - 1].mul(&p.denom));
        }
        let mut out_n = PuiseuxElem::zero();
        let mut out_d = PuiseuxElem::zero();
        for j in 0..=d {
            let basis = num_pow[j].mul(&den_pow[d - j]);
            out_n = out_n.add(&self.num.coeff(j).mul(&basis));
            out_d = out_d.add(&self.den.coeff(j).mul(&basis));
        }
        ProjPoint { numer: out_n, denom: out_d }
    }

    /// `A ∘ f` for a Möbius family `A`.
    pub fn postcompose(&self, a: &Moebius) -> RationalMapFamily {
        let num = self.num.scale(&a.a).add(&self.den.scale(&a.b));
        let den = self.num.scale(&a.c).add(&self.den.scale(&a.d));
        RationalMapFamily::new_unchecked(num, den, self.degree)
    }

    /// `f ∘ B` for a Möbius family `B` (homogeneous substitution).
    pub fn precompose(&self, b: &Moebius) -> RationalMapFamily {
        let num = self.num.compose_moebius_num(&b.a, &b.b, &b.c, &b.d, self.degree);
        let den = self.den.compose_moebius_num(&b.a, &b.b, &b.c, &b.d, self.degree);
        RationalMapFamily::new_unchecked(num, den, self.degree)
    }

    /// Literal composition `self ∘ g`, of degree `deg(self)·deg(g)`.
    pub fn compose(&self, g: &RationalMapFamily) -> RationalMapFamily {
        let d = self.degree;
        let mut pn = vec![Poly::<PuiseuxElem>::one()];
        let mut pd = vec![Poly::<PuiseuxElem>::one()];
        for k in 1..=d {
            pn.push(pn[k - 1].mul(&g.num));
            pd.push(pd[k - 1].mul(&g.den));
        }
        let mut num = Poly::zero();
        let mut den = Poly::zero();
        for j in 0..=d {
            let basis = pn[j].mul(&pd[d - j]);
            num = num.add(&basis.scale(&self.num.coeff(j)));
            den = den.add(&basis.scale(&self.den.coeff(j)));
        }
        RationalMapFamily::new_unchecked(num, den, self.degree * g.degree)
    }

    /// Conjugation `M ∘ f ∘ M^{-1}`.
    pub fn conjugate(&self, m: &Moebius) -> RationalMapFamily {
        self.postcompose(m).precompose(&m.inverse())
    }

    /// Joint rescaling exponent: the least valuation over all coefficients.
    pub fn content_valuation(&self) -> Result<Rat> {
        let vn = self.num.content_valuation()?;
        let vd = self.den.content_valuation()?;
        match (vn, vd) {
            (Some(a), Some(b)) => Ok(a.min(b)),
            (Some(a), None) => Ok(a),
            (None, Some(b)) => Ok(b),
            (None, None) => Err(CoreError::InvalidFamily(String::from("zero map"))),
        }
    }
}

impl fmt::Display for RationalMapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num.display_with("z"), self.den.display_with("z"))
    }
}

/// A rational map over the residue field in lowest terms. Constants are
/// allowed, including the constant infinity `(1, 0)`.
#[derive(Clone, PartialEq)]
pub struct RationalMapC {
    num: Poly<Scalar>,
    den: Poly<Scalar>,
}

impl RationalMapC {
    /// Normalise: divide by the gcd, make the denominator monic (or pin the
    /// numerator to 1, for the constant infinity).
    pub fn new(num: Poly<Scalar>, den: Poly<Scalar>) -> Result<Self> {
        if num.is_zero() && den.is_zero() {
            return Err(CoreError::InvalidFamily(String::from("0/0 is not a map")));
        }
        if den.is_zero() {
            return Ok(RationalMapC { num: Poly::one(), den: Poly::zero() });
        }
        if num.is_zero() {
            return Ok(RationalMapC { num: Poly::zero(), den: Poly::one() });
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g)?;
        let den = den.exact_div(&g)?;
        let lead_inv = den.leading().unwrap().inv()?;
        Ok(RationalMapC { num: num.scale(&lead_inv), den: den.scale(&lead_inv) })
    }

    pub fn num(&self) -> &Poly<Scalar> {
        &self.num
    }

    pub fn den(&self) -> &Poly<Scalar> {
        &self.den
    }

    pub fn degree(&self) -> usize {
        if self.num.is_zero() || self.den.is_zero() {
            return 0;
        }
        self.num.degree().max(self.den.degree())
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn constant_value(&self) -> Option<ResidueValue> {
        if !self.is_constant() {
            return None;
        }
        if self.den.is_zero() {
            return Some(ResidueValue::Infinity);
        }
        let c = self.num.coeff(0).div(&self.den.coeff(0)).ok()?;
        Some(ResidueValue::Exact(c))
    }

    /// Image of a point of `P^1(C)`.
    pub fn eval_value(&self, v: &ResidueValue) -> Result<ResidueValue> {
        if let Some(c) = self.constant_value() {
            return Ok(c);
        }
        match v {
            ResidueValue::Exact(z) => {
                let n = self.num.eval(z);
                let d = self.den.eval(z);
                if d.is_zero() {
                    Ok(ResidueValue::Infinity)
                } else {
                    Ok(ResidueValue::Exact(n.div(&d)?))
                }
            }
            ResidueValue::Infinity => {
                let dn = if self.num.is_zero() { None } else { Some(self.num.degree()) };
                let dd = if self.den.is_zero() { None } else { Some(self.den.degree()) };
                match (dn, dd) {
                    (None, _) => Ok(ResidueValue::zero()),
                    (_, None) => Ok(ResidueValue::Infinity),
                    (Some(a), Some(b)) => {
                        if a > b {
                            Ok(ResidueValue::Infinity)
                        } else if a < b {
                            Ok(ResidueValue::zero())
                        } else {
                            Ok(ResidueValue::Exact(
                                self.num.leading().unwrap().div(self.den.leading().unwrap())?,
                            ))
                        }
                    }
                }
            }
            ResidueValue::Certified(c) => {
                if algebraic::certified_root_solves(c, &self.den)? {
                    return Ok(ResidueValue::Infinity);
                }
                self.eval_certified(c)
            }
        }
    }

    /// Image of an algebraic point: eliminate through a resultant in the
    /// image variable, then select the root matching the numeric image.
    fn eval_certified(&self, c: &crate::algebraic::CertifiedRoot) -> Result<ResidueValue> {
        // E(w) = Res_x( s(x), num(x) - w·den(x) ), both as polynomials in x
        // with coefficients in Q(i)[w].
        let s_lift: Poly<Poly<Scalar>> =
            Poly::from_coeffs(c.poly.coeffs().iter().map(|k| Poly::constant(k.clone())).collect());
        let deg = self.num.degree().max(self.den.degree());
        let combo: Poly<Poly<Scalar>> = Poly::from_coeffs(
            (0..=deg)
                .map(|k| Poly::from_coeffs(vec![self.num.coeff(k), -&self.den.coeff(k)]))
                .collect(),
        );
        let e_w = resultant(&s_lift, &combo)?;
        if e_w.is_zero() {
            return Err(CoreError::PrecisionExceeded(String::from(
                "degenerate elimination in algebraic image",
            )));
        }
        // numeric image for selection
        let z = c.refined();
        let img = self.num.eval_f64(z.center()) / self.den.eval_f64(z.center());
        let mut best: Option<(f64, ResidueValue)> = None;
        for (root, _) in algebraic::roots_with_multiplicity(&squarefree_part(&e_w))? {
            if let Some(w) = root.to_complex() {
                let dist = (w - img).norm();
                if best.as_ref().map(|(d, _)| dist < *d).unwrap_or(true) {
                    best = Some((dist, root));
                }
            }
        }
        match best {
            Some((_, root)) => Ok(root),
            None => Err(CoreError::PrecisionExceeded(String::from(
                "no candidate image for algebraic point",
            ))),
        }
    }

    /// Local degree `deg_v(phi)`: the multiplicity with which `phi` takes
    /// the value `phi(v)` at `v`. The map must be nonconstant.
    pub fn local_degree(&self, v: &ResidueValue) -> Result<usize> {
        if self.is_constant() {
            return Err(CoreError::CellMismatch(String::from(
                "local degree of a constant map",
            )));
        }
        match v {
            ResidueValue::Exact(z) => {
                let dz = self.den.eval(z);
                if dz.is_zero() {
                    // pole: deg_v(phi) = deg_v(1/phi) = ord_v(den)
                    Ok(self.den.root_multiplicity(z))
                } else {
                    let r = self.num.scale(&dz).sub(&self.den.scale(&self.num.eval(z)));
                    Ok(r.root_multiplicity(z))
                }
            }
            ResidueValue::Infinity => {
                let d = self.num.degree().max(self.den.degree());
                let conj = RationalMapC { num: self.num.reverse(d), den: self.den.reverse(d) };
                conj.local_degree_exact_at_zero()
            }
            ResidueValue::Certified(_) => {
                // ord_v(phi - phi(v)) = 1 + ord_v of the Wronskian numerator
                let w = self
                    .num
                    .derivative()
                    .mul(&self.den)
                    .sub(&self.num.mul(&self.den.derivative()));
                if w.is_zero() {
                    return Err(CoreError::CellMismatch(String::from(
                        "vanishing Wronskian for a nonconstant map",
                    )));
                }
                Ok(1 + algebraic::value_root_multiplicity(&w, v)?)
            }
        }
    }

    fn local_degree_exact_at_zero(&self) -> Result<usize> {
        let z0 = Scalar::zero();
        let dz = self.den.eval(&z0);
        if dz.is_zero() {
            Ok(self.den.vanishing_order().unwrap_or(0))
        } else {
            let r = self.num.scale(&dz).sub(&self.den.scale(&self.num.eval(&z0)));
            Ok(r.vanishing_order().unwrap_or(0))
        }
    }

    /// All preimages of `w` with local degrees; they sum to `deg(phi)`.
    pub fn preimages(&self, w: &ResidueValue) -> Result<Vec<(ResidueValue, usize)>> {
        if self.is_constant() {
            return Err(CoreError::CellMismatch(String::from(
                "preimages under a constant map",
            )));
        }
        let deg = self.degree();
        let mut out: Vec<(ResidueValue, usize)> = Vec::new();
        match w {
            ResidueValue::Exact(_) | ResidueValue::Infinity => {
                let r_w = match w {
                    ResidueValue::Exact(s) => self.num.sub(&self.den.scale(s)),
                    _ => self.den.clone(),
                };
                let finite_deg = if r_w.is_zero() { 0 } else { r_w.degree() };
                if !r_w.is_zero() && finite_deg > 0 {
                    out = algebraic::roots_with_multiplicity(&r_w)?;
                } else if !r_w.is_zero() && finite_deg == 0 {
                    out = Vec::new();
                }
                if finite_deg < deg {
                    out.push((ResidueValue::Infinity, deg - finite_deg));
                }
            }
            ResidueValue::Certified(c) => {
                // E(x) = Res_w'( s(w'), num(x) - w'·den(x) ), eliminating w'.
                let s_lift: Poly<Poly<Scalar>> = Poly::from_coeffs(
                    c.poly.coeffs().iter().map(|k| Poly::constant(k.clone())).collect(),
                );
                let combo: Poly<Poly<Scalar>> =
                    Poly::from_coeffs(vec![self.num.clone(), self.den.neg()]);
                let e_x = resultant(&s_lift, &combo)?;
                if !e_x.is_zero() && !e_x.is_constant() {
                    for (cand, _) in algebraic::roots_with_multiplicity(&squarefree_part(&e_x))? {
                        if self.eval_value(&cand)? == *w {
                            let m = self.local_degree(&cand)?;
                            out.push((cand, m));
                        }
                    }
                }
                if self.eval_value(&ResidueValue::Infinity)? == *w {
                    out.push((
                        ResidueValue::Infinity,
                        self.local_degree(&ResidueValue::Infinity)?,
                    ));
                }
            }
        }
        let total: usize = out.iter().map(|(_, m)| m).sum();
        if total != deg {
            return Err(CoreError::PrecisionExceeded(format!(
                "preimage multiplicities sum to {total}, expected {deg}"
            )));
        }
        Ok(out)
    }
}

fn squarefree_part(p: &Poly<Scalar>) -> Poly<Scalar> {
    let mut out = Poly::one();
    for (f, _) in p.squarefree_decomposition() {
        out = out.mul(&f);
    }
    out
}

impl fmt::Display for RationalMapC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_zero() {
            return write!(f, "inf");
        }
        if self.den == Poly::one() {
            return write!(f, "{}", self.num.display_with("ζ"));
        }
        write!(f, "({})/({})", self.num.display_with("ζ"), self.den.display_with("ζ"))
    }
}

impl fmt::Debug for RationalMapC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The reduction `h~ = H·phi`: the hole divisor `H` (a power of `ζ0` times a
/// monic affine polynomial, with cached roots) and the reduced map `phi` of
/// degree `d - deg H`.
#[derive(Clone)]
pub struct ReducedMap {
    degree: usize,
    h_inf_mult: usize,
    h_poly: Poly<Scalar>,
    h_roots: Vec<(ResidueValue, usize)>,
    phi: RationalMapC,
}

impl ReducedMap {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Total degree of the hole divisor `H`.
    pub fn h_degree(&self) -> usize {
        self.h_inf_mult + if self.h_poly.is_zero() { 0 } else { self.h_poly.degree() }
    }

    pub fn h_inf_mult(&self) -> usize {
        self.h_inf_mult
    }

    pub fn h_poly(&self) -> &Poly<Scalar> {
        &self.h_poly
    }

    pub fn phi(&self) -> &RationalMapC {
        &self.phi
    }

    pub fn phi_degree(&self) -> usize {
        self.phi.degree()
    }

    /// `deg H = 0`, equivalently `h^{-1}(S_G) = {S_G}`.
    pub fn good_reduction(&self) -> bool {
        self.h_degree() == 0
    }

    /// Zeros of `H` on `P^1(C)` with multiplicities (`ζ0^k` contributes
    /// infinity with multiplicity `k`).
    pub fn divisor_support(&self) -> &[(ResidueValue, usize)] {
        &self.h_roots
    }

    /// `ord_v[H = 0]`, the surplus local degree in this chart.
    pub fn divisor_order_at(&self, v: &ResidueValue) -> Result<usize> {
        match v {
            ResidueValue::Infinity => Ok(self.h_inf_mult),
            _ => {
                if self.h_poly.is_zero() || self.h_poly.is_constant() {
                    Ok(0)
                } else {
                    algebraic::value_root_multiplicity(&self.h_poly, v)
                }
            }
        }
    }

    /// Report form `H = <factored>; phi = <map>`.
    pub fn report_string(&self) -> String {
        let mut hparts: Vec<String> = Vec::new();
        if self.h_inf_mult > 0 {
            hparts.push(if self.h_inf_mult == 1 {
                String::from("ζ0")
            } else {
                format!("ζ0^{}", self.h_inf_mult)
            });
        }
        if !self.h_poly.is_zero() && !self.h_poly.is_constant() {
            for (f, m) in self.h_poly.squarefree_decomposition() {
                let hom = homogenize_string(&f);
                let single_term = !hom.contains('+');
                hparts.push(match (m, single_term) {
                    (1, true) => hom,
                    (1, false) => format!("({hom})"),
                    (_, _) => format!("({hom})^{m}"),
                });
            }
        }
        if hparts.is_empty() {
            hparts.push(String::from("1"));
        }
        format!("H = {}; phi = {}", hparts.join("*"), self.phi)
    }
}

/// Render a monic affine factor homogeneously in `ζ0, ζ1`.
fn homogenize_string(p: &Poly<Scalar>) -> String {
    let d = p.degree();
    let mut parts: Vec<String> = Vec::new();
    for k in (0..=d).rev() {
        let c = p.coeff(k);
        if c.is_zero() {
            continue;
        }
        let mut body = String::new();
        if !(c.is_one() && k > 0) {
            body.push_str(&c.to_string());
            if k > 0 {
                body.push('*');
            }
        }
        if k > 0 {
            body.push_str(&if k == 1 { String::from("ζ1") } else { format!("ζ1^{k}") });
        }
        let e0 = d - k;
        if e0 > 0 {
            if !body.is_empty() {
                body.push('*');
            }
            body.push_str(&if e0 == 1 { String::from("ζ0") } else { format!("ζ0^{e0}") });
        }
        parts.push(body);
    }
    parts.join(" + ")
}

impl fmt::Debug for ReducedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.report_string())
    }
}

/// Reduction of a family: jointly rescale coefficients to max norm 1,
/// reduce, split off the gcd `H` of the reduced homogeneous forms.
pub fn reduce_map(h: &RationalMapFamily) -> Result<ReducedMap> {
    let d = h.degree();
    let v = h.content_valuation()?;
    let neg_v = -v;
    let num_r = h.num().shift_all(&neg_v).reduce()?;
    let den_r = h.den().shift_all(&neg_v).reduce()?;
    build_reduced(num_r, den_r, d)
}

fn build_reduced(p: Poly<Scalar>, q: Poly<Scalar>, d: usize) -> Result<ReducedMap> {
    let (h_inf, h_poly, phi) = if q.is_zero() {
        // phi ≡ infinity; H is the full reduced numerator form
        (d - p.degree(), p.monic(), RationalMapC { num: Poly::one(), den: Poly::zero() })
    } else if p.is_zero() {
        (d - q.degree(), q.monic(), RationalMapC { num: Poly::zero(), den: Poly::one() })
    } else {
        let g = p.gcd(&q);
        let e_p = d - p.degree();
        let e_q = d - q.degree();
        let phi = RationalMapC::new(p.exact_div(&g)?, q.exact_div(&g)?)?;
        (e_p.min(e_q), g, phi)
    };
    let mut roots: Vec<(ResidueValue, usize)> = Vec::new();
    if !h_poly.is_zero() && !h_poly.is_constant() {
        roots = algebraic::roots_with_multiplicity(&h_poly)?;
    }
    if h_inf > 0 {
        roots.push((ResidueValue::Infinity, h_inf));
    }
    let rm = ReducedMap { degree: d, h_inf_mult: h_inf, h_poly, h_roots: roots, phi };
    debug_assert_eq!(rm.h_degree() + rm.phi_degree(), d);
    Ok(rm)
}

/// `deg H = 0  <=>  h^{-1}(S_G) = {S_G}`: the Theorem B hypothesis fails.
pub fn gauss_totally_invariant_test(h: &RationalMapFamily) -> Result<bool> {
    Ok(reduce_map(h)?.good_reduction())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_i;

    fn t_pow(e: i64) -> PuiseuxElem {
        PuiseuxElem::t_pow(rat_i(e))
    }

    fn pe(n: i64) -> PuiseuxElem {
        PuiseuxElem::from_i64(n)
    }

    /// z^2 + t^-1 z
    fn okuyama_family() -> RationalMapFamily {
        RationalMapFamily::new(vec![PuiseuxElem::zero(), t_pow(-1), pe(1)], vec![pe(1)], 2)
            .unwrap()
    }

    #[test]
    fn reduce_square() {
        let f = RationalMapFamily::new(vec![pe(0), pe(0), pe(1)], vec![pe(1)], 2).unwrap();
        let r = reduce_map(&f).unwrap();
        assert!(r.good_reduction());
        assert_eq!(r.h_degree(), 0);
        assert_eq!(r.phi_degree(), 2);
        assert_eq!(r.report_string(), "H = 1; phi = ζ^2");
    }

    #[test]
    fn reduce_okuyama() {
        // H = ζ0 ζ1, phi ≡ inf
        let r = reduce_map(&okuyama_family()).unwrap();
        assert_eq!(r.h_degree(), 2);
        assert_eq!(r.h_inf_mult(), 1);
        assert_eq!(r.phi_degree(), 0);
        assert_eq!(r.phi().constant_value(), Some(ResidueValue::Infinity));
        let mut support = r.divisor_support().to_vec();
        support.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        assert_eq!(support, vec![(ResidueValue::zero(), 1), (ResidueValue::Infinity, 1)]);
    }

    #[test]
    fn reduce_rescaled_okuyama() {
        // t·z^2 + z: H = ζ0, phi = ζ
        let f =
            RationalMapFamily::new(vec![PuiseuxElem::zero(), pe(1), t_pow(1)], vec![pe(1)], 2)
                .unwrap();
        let r = reduce_map(&f).unwrap();
        assert_eq!(r.h_inf_mult(), 1);
        assert_eq!(r.h_degree(), 1);
        assert_eq!(r.phi_degree(), 1);
        assert_eq!(r.report_string(), "H = ζ0; phi = ζ");
    }

    #[test]
    fn good_reduction_examples() {
        let f = RationalMapFamily::new(vec![pe(0), pe(0), pe(1)], vec![pe(1)], 2).unwrap();
        assert!(gauss_totally_invariant_test(&f).unwrap());
        assert!(!gauss_totally_invariant_test(&okuyama_family()).unwrap());
        // (z^2 + t)/(1 + t z^2): H = 1, phi = ζ^2
        let f = RationalMapFamily::new(
            vec![t_pow(1), PuiseuxElem::zero(), pe(1)],
            vec![pe(1), PuiseuxElem::zero(), t_pow(1)],
            2,
        )
        .unwrap();
        assert!(gauss_totally_invariant_test(&f).unwrap());
    }

    #[test]
    fn divisor_support_multiplicity() {
        // num = t^-1 z^2, den = 1: reduced pair (ζ^2, 0), phi ≡ inf,
        // H = ζ1^2: root 0 with multiplicity 2
        let f = RationalMapFamily::new(
            vec![PuiseuxElem::zero(), PuiseuxElem::zero(), t_pow(-1)],
            vec![pe(1)],
            2,
        )
        .unwrap();
        let r = reduce_map(&f).unwrap();
        assert_eq!(r.h_inf_mult(), 0);
        assert_eq!(r.divisor_support(), &[(ResidueValue::zero(), 2)]);
        assert_eq!(r.divisor_order_at(&ResidueValue::zero()).unwrap(), 2);
        assert_eq!(r.divisor_order_at(&ResidueValue::Infinity).unwrap(), 0);
        assert_eq!(r.report_string(), "H = (ζ1)^2; phi = inf");
    }

    #[test]
    fn invalid_family_detected() {
        // z/z: zero resultant
        let e = RationalMapFamily::new(
            vec![PuiseuxElem::zero(), pe(1)],
            vec![PuiseuxElem::zero(), pe(1)],
            1,
        );
        assert!(matches!(e, Err(CoreError::InvalidFamily(_))));
    }

    #[test]
    fn deg_sum_invariant_on_randoms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 30 {
            let d = rng.gen_range(1..=4usize);
            let coeff = |rng: &mut rand_chacha::ChaCha8Rng| {
                let c: i64 = rng.gen_range(-3..=3);
                let e: i64 = rng.gen_range(-3..=3);
                PuiseuxElem::monomial(Scalar::from_i64(c), rat_i(e))
            };
            let num: Vec<PuiseuxElem> = (0..=d).map(|_| coeff(&mut rng)).collect();
            let den: Vec<PuiseuxElem> = (0..=d).map(|_| coeff(&mut rng)).collect();
            if let Ok(f) = RationalMapFamily::new(num, den, d) {
                let r = reduce_map(&f).unwrap();
                assert_eq!(r.h_degree() + r.phi_degree(), d);
                let mult_sum: usize = r.divisor_support().iter().map(|(_, m)| m).sum();
                assert_eq!(mult_sum, r.h_degree());
                checked += 1;
            }
        }
    }

    #[test]
    fn gcd_oracle_roots_vanish_on_both_forms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 10 {
            let d = rng.gen_range(2..=4usize);
            let coeff = |rng: &mut rand_chacha::ChaCha8Rng| {
                let c: i64 = rng.gen_range(-2..=2);
                let e: i64 = rng.gen_range(-2..=2);
                PuiseuxElem::monomial(Scalar::from_i64(c), rat_i(e))
            };
            let num: Vec<PuiseuxElem> = (0..=d).map(|_| coeff(&mut rng)).collect();
            let den: Vec<PuiseuxElem> = (0..=d).map(|_| coeff(&mut rng)).collect();
            let f = match RationalMapFamily::new(num, den, d) {
                Ok(f) => f,
                Err(_) => continue,
            };
            let v = f.content_valuation().unwrap();
            let neg_v = -v;
            let p = f.num().shift_all(&neg_v).reduce().unwrap();
            let q = f.den().shift_all(&neg_v).reduce().unwrap();
            let r = reduce_map(&f).unwrap();
            // exact divisor roots vanish on both reduced forms
            for (root, _) in r.divisor_support() {
                match root {
                    ResidueValue::Exact(s) => {
                        assert!(p.is_zero() || p.eval(s).is_zero());
                        assert!(q.is_zero() || q.eval(s).is_zero());
                    }
                    ResidueValue::Infinity => {
                        assert!(p.is_zero() || p.degree() < d);
                        assert!(q.is_zero() || q.degree() < d);
                    }
                    ResidueValue::Certified(c) => {
                        if !p.is_zero() {
                            assert!(algebraic::certified_root_solves(c, &p).unwrap());
                        }
                        if !q.is_zero() {
                            assert!(algebraic::certified_root_solves(c, &q).unwrap());
                        }
                    }
                }
            }
            // points off the divisor do not vanish on both forms
            for probe in 5..15i64 {
                let x = Scalar::from_i64(probe);
                let on_divisor = r
                    .divisor_support()
                    .iter()
                    .any(|(root, _)| root == &ResidueValue::Exact(x.clone()));
                if !on_divisor && !p.is_zero() && !q.is_zero() {
                    assert!(!(p.eval(&x).is_zero() && q.eval(&x).is_zero()));
                }
            }
            checked += 1;
        }
    }

    #[test]
    fn rational_map_local_degrees_and_preimages() {
        // phi = ζ^2 + ζ
        let phi = RationalMapC::new(
            Poly::from_coeffs(vec![Scalar::zero(), Scalar::one(), Scalar::one()]),
            Poly::one(),
        )
        .unwrap();
        assert_eq!(phi.local_degree(&ResidueValue::Infinity).unwrap(), 2);
        assert_eq!(phi.local_degree(&ResidueValue::from_i64(-1)).unwrap(), 1);
        // critical point at -1/2
        assert_eq!(
            phi.local_degree(&ResidueValue::Exact(Scalar::from_frac(-1, 2))).unwrap(),
            2
        );
        // preimages of 0: {0, -1}
        let pre = phi.preimages(&ResidueValue::zero()).unwrap();
        assert_eq!(pre.len(), 2);
        assert_eq!(pre.iter().map(|(_, m)| m).sum::<usize>(), 2);
        // preimages of infinity: just infinity with multiplicity 2
        let pre = phi.preimages(&ResidueValue::Infinity).unwrap();
        assert_eq!(pre, vec![(ResidueValue::Infinity, 2)]);
    }

    #[test]
    fn certified_image_and_preimage() {
        // phi = ζ^2: image of sqrt(2) is exactly 2
        let phi = RationalMapC::new(
            Poly::from_coeffs(vec![Scalar::zero(), Scalar::zero(), Scalar::one()]),
            Poly::one(),
        )
        .unwrap();
        let sq2 = crate::algebraic::isolate_squarefree(&Poly::from_coeffs(vec![
            Scalar::from_i64(-2),
            Scalar::zero(),
            Scalar::one(),
        ]))
        .unwrap();
        let v = sq2
            .iter()
            .find(|r| r.to_complex().map(|z| z.re > 0.0).unwrap_or(false))
            .unwrap();
        assert_eq!(phi.eval_value(v).unwrap(), ResidueValue::from_i64(2));
        assert_eq!(phi.local_degree(v).unwrap(), 1);
        // preimages of certified sqrt(2): the two square roots of sqrt(2)
        let pre = phi.preimages(v).unwrap();
        assert_eq!(pre.iter().map(|(_, m)| m).sum::<usize>(), 2);
    }

    #[test]
    fn composition_keeps_validity() {
        let f = okuyama_family();
        let ff = f.compose(&f);
        assert_eq!(ff.degree(), 4);
        assert!(!ff.resultant().unwrap().is_exact_zero());
    }
}
