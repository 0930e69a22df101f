//! Points of `P^1(C)` as measure-atom keys and direction labels.
//!
//! A value is either the point at infinity, an exact Gaussian rational, or a
//! certified algebraic number: an exact square-free polynomial over `Q(i)`
//! together with a floating-point isolation disk containing exactly one of
//! its roots. Exact values are preferred everywhere; certified values appear
//! only when a divisor or preimage polynomial does not split over `Q(i)`.
//!
//! Equality across two certified values with *different* defining
//! polynomials is decided exactly through their gcd; only the final
//! disk-membership step is floating point, backed by the isolation
//! invariant. Two certified roots of the same polynomial whose disks still
//! overlap after refinement are treated as equal (f64 refinement bottoms
//! out near 1e-13).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::poly::Poly;
use crate::scalar::{clear_denominators, Rat, Scalar};

/// An algebraic number given by an exact square-free monic polynomial and an
/// isolation disk containing exactly one of its roots.
#[derive(Clone, Debug)]
pub struct CertifiedRoot {
    pub poly: Poly<Scalar>,
    pub re: f64,
    pub im: f64,
    pub radius: f64,
}

impl CertifiedRoot {
    pub fn center(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Newton-polish the center against the exact polynomial and recompute
    /// the containment radius.
    pub fn refined(&self) -> CertifiedRoot {
        let (z, r) = newton_refine(&self.poly, self.center());
        CertifiedRoot { poly: self.poly.clone(), re: z.re, im: z.im, radius: r.min(self.radius) }
    }
}

/// A point of `P^1(C)`.
#[derive(Clone, Debug)]
pub enum ResidueValue {
    Infinity,
    Exact(Scalar),
    Certified(CertifiedRoot),
}

impl ResidueValue {
    pub fn zero() -> Self {
        ResidueValue::Exact(Scalar::zero())
    }

    pub fn from_i64(n: i64) -> Self {
        ResidueValue::Exact(Scalar::from_i64(n))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ResidueValue::Infinity)
    }

    pub fn as_exact(&self) -> Option<&Scalar> {
        match self {
            ResidueValue::Exact(s) => Some(s),
            _ => None,
        }
    }

    /// f64 approximation; `None` for the point at infinity.
    pub fn to_complex(&self) -> Option<Complex64> {
        match self {
            ResidueValue::Infinity => None,
            ResidueValue::Exact(s) => {
                let (re, im) = s.to_f64_pair();
                Some(Complex64::new(re, im))
            }
            ResidueValue::Certified(c) => Some(c.center()),
        }
    }

    /// Deterministic ordering for report output: exact values by (re, im),
    /// then certified values, then infinity.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        use ResidueValue::*;
        let rank = |v: &ResidueValue| match v {
            Exact(_) => 0u8,
            Certified(_) => 1,
            Infinity => 2,
        };
        match (self, other) {
            (Exact(a), Exact(b)) => (&a.re, &a.im).cmp(&(&b.re, &b.im)),
            (Certified(a), Certified(b)) => {
                let ka = poly_sort_key(&a.poly);
                let kb = poly_sort_key(&b.poly);
                ka.cmp(&kb).then_with(|| {
                    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
                })
            }
            _ => rank(self).cmp(&rank(other)),
        }
    }

    pub fn to_string_short(&self) -> String {
        match self {
            ResidueValue::Infinity => String::from("inf"),
            ResidueValue::Exact(s) => s.to_string(),
            ResidueValue::Certified(c) => format!(
                "root({}; {:.6}{}{:.6}i)",
                c.poly.display_with("z"),
                c.re,
                if c.im < 0.0 { "-" } else { "+" },
                c.im.abs()
            ),
        }
    }
}

fn poly_sort_key(p: &Poly<Scalar>) -> Vec<(Rat, Rat)> {
    p.coeffs().iter().map(|c| (c.re.clone(), c.im.clone())).collect()
}

impl fmt::Display for ResidueValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_short())
    }
}

impl PartialEq for ResidueValue {
    fn eq(&self, other: &Self) -> bool {
        use ResidueValue::*;
        match (self, other) {
            (Infinity, Infinity) => true,
            (Exact(a), Exact(b)) => a == b,
            (Exact(a), Certified(c)) | (Certified(c), Exact(a)) => {
                exact_matches_certified(a, c)
            }
            (Certified(a), Certified(b)) => certified_eq(a, b),
            _ => false,
        }
    }
}

impl Eq for ResidueValue {}

fn exact_matches_certified(a: &Scalar, c: &CertifiedRoot) -> bool {
    if !c.poly.eval(a).is_zero() {
        return false;
    }
    let (re, im) = a.to_f64_pair();
    let z = Complex64::new(re, im);
    let refined = c.refined();
    (z - refined.center()).norm() <= refined.radius + 1e-9
}

fn certified_eq(a: &CertifiedRoot, b: &CertifiedRoot) -> bool {
    if a.poly == b.poly {
        let ra = a.refined();
        let rb = b.refined();
        return (ra.center() - rb.center()).norm() <= ra.radius + rb.radius + 1e-12;
    }
    let g = a.poly.gcd(&b.poly);
    if g.degree() == 0 || g.is_zero() {
        return false;
    }
    // Common roots are exactly the roots of g; check both disks select the
    // same one.
    let ra = a.refined();
    let rb = b.refined();
    if (ra.center() - rb.center()).norm() > ra.radius + rb.radius + 1e-9 {
        return false;
    }
    match isolate_squarefree(&g) {
        Ok(roots) => roots.iter().any(|r| {
            let zc = match r.to_complex() {
                Some(z) => z,
                None => return false,
            };
            (zc - ra.center()).norm() <= ra.radius + 1e-9
                && (zc - rb.center()).norm() <= rb.radius + 1e-9
        }),
        Err(_) => false,
    }
}

/// All roots of an arbitrary nonzero polynomial with multiplicities, exact
/// where reconstruction over `Q(i)` succeeds.
pub fn roots_with_multiplicity(p: &Poly<Scalar>) -> Result<Vec<(ResidueValue, usize)>> {
    if p.is_zero() {
        return Err(CoreError::DivisionByZero);
    }
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        for root in isolate_squarefree(&factor)? {
            out.push((root, mult));
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    Ok(out)
}

/// Roots of a square-free polynomial: exact Gaussian-rational roots are
/// extracted and deflated exactly; the rest come back as certified disks.
pub fn isolate_squarefree(p: &Poly<Scalar>) -> Result<Vec<ResidueValue>> {
    let mut out = Vec::new();
    if p.degree() == 0 || p.is_zero() {
        return Ok(out);
    }
    let mut cofactor = p.monic();
    // Exact pass: numeric approximations, reconstruction, exact verification.
    loop {
        if cofactor.degree() == 0 {
            return Ok(out);
        }
        if cofactor.degree() == 1 {
            // monic z + c
            let c = cofactor.coeff(0);
            out.push(ResidueValue::Exact(-&c));
            return Ok(out);
        }
        let approx = durand_kerner(&cofactor)?;
        let den_bound = denominator_bound(p);
        let mut extracted = None;
        for z in &approx {
            if let Some(cand) = reconstruct_gaussian(*z, &den_bound) {
                if cofactor.eval(&cand).is_zero() {
                    extracted = Some(cand);
                    break;
                }
            }
        }
        match extracted {
            Some(root) => {
                let lin = Poly::from_coeffs(vec![-&root, Scalar::one()]);
                cofactor = cofactor.exact_div(&lin)?;
                out.push(ResidueValue::Exact(root));
            }
            None => {
                // Everything left is irrational: certify the whole cofactor.
                let mut disks = Vec::new();
                for z in durand_kerner(&cofactor)? {
                    let (c, r) = newton_refine(&cofactor, z);
                    disks.push(CertifiedRoot {
                        poly: cofactor.clone(),
                        re: c.re,
                        im: c.im,
                        radius: r,
                    });
                }
                check_pairwise_disjoint(&disks, &out)?;
                out.extend(disks.into_iter().map(ResidueValue::Certified));
                return Ok(out);
            }
        }
    }
}

fn check_pairwise_disjoint(disks: &[CertifiedRoot], exact: &[ResidueValue]) -> Result<()> {
    for (i, a) in disks.iter().enumerate() {
        for b in disks.iter().skip(i + 1) {
            if (a.center() - b.center()).norm() <= a.radius + b.radius {
                return Err(CoreError::PrecisionExceeded(String::from(
                    "root isolation disks overlap",
                )));
            }
        }
        for e in exact {
            if let ResidueValue::Exact(s) = e {
                let (re, im) = s.to_f64_pair();
                if (a.center() - Complex64::new(re, im)).norm() <= a.radius {
                    return Err(CoreError::PrecisionExceeded(String::from(
                        "certified disk touches an exact root",
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Norm of the leading coefficient after clearing to Gaussian integers:
/// denominators of any `Q(i)`-root divide it.
fn denominator_bound(p: &Poly<Scalar>) -> BigInt {
    let (cleared, _) = clear_denominators(p.coeffs());
    match cleared.last() {
        Some((re, im)) => re * re + im * im,
        None => BigInt::one(),
    }
}

/// Best rational approximation with bounded denominator via continued
/// fractions, real and imaginary parts independently.
fn reconstruct_gaussian(z: Complex64, den_bound: &BigInt) -> Option<Scalar> {
    let cap = den_bound.min(&BigInt::from(1_000_000_000u64)).clone();
    let re = reconstruct_rat(z.re, &cap)?;
    let im = reconstruct_rat(z.im, &cap)?;
    Some(Scalar::new(re, im))
}

fn reconstruct_rat(x: f64, cap: &BigInt) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let exact = BigRational::from_float(x)?;
    // Continued-fraction convergents of `exact` with denominator <= cap.
    let mut a = exact.clone();
    let mut p_prev = BigInt::one();
    let mut q_prev = BigInt::zero();
    let mut p = a.floor().to_integer();
    let mut q = BigInt::one();
    for _ in 0..64 {
        let frac = &a - BigRational::from(a.floor().to_integer());
        let approx = Rat::new(p.clone(), q.clone());
        if (&approx - &exact).abs() < Rat::new(BigInt::one(), BigInt::from(10u64).pow(13)) {
            return Some(approx);
        }
        if frac.is_zero() {
            break;
        }
        a = frac.recip();
        let digit = a.floor().to_integer();
        let p_next = &digit * &p + &p_prev;
        let q_next = &digit * &q + &q_prev;
        if &q_next > cap {
            break;
        }
        p_prev = core::mem::replace(&mut p, p_next);
        q_prev = core::mem::replace(&mut q, q_next);
    }
    let approx = Rat::new(p, q);
    if (&approx - &exact).abs() < Rat::new(BigInt::one(), BigInt::from(10u64).pow(10)) {
        Some(approx)
    } else {
        None
    }
}

/// Simultaneous root iteration on the monic f64 image of the polynomial.
fn durand_kerner(p: &Poly<Scalar>) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let lead = p.leading().unwrap().clone();
    let mut cf: Vec<Complex64> = Vec::with_capacity(n + 1);
    for c in p.coeffs() {
        let q = c.div(&lead).map_err(|_| CoreError::DivisionByZero)?;
        let (re, im) = q.to_f64_pair();
        if !re.is_finite() || !im.is_finite() {
            return Err(CoreError::PrecisionExceeded(String::from(
                "coefficient out of f64 range during isolation",
            )));
        }
        cf.push(Complex64::new(re, im));
    }
    let bound = 1.0
        + cf[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in cf.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut zs: Vec<Complex64> = (0..n)
        .map(|k| seed.powu(k as u32 + 1) * bound)
        .collect();
    for _ in 0..400 {
        let mut delta_max = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= zs[i] - zs[j];
                }
            }
            if denom.norm() == 0.0 {
                // perturb a coincident pair
                zs[i] += Complex64::new(1e-7, 1e-7);
                continue;
            }
            let step = eval(zs[i]) / denom;
            zs[i] -= step;
            delta_max = delta_max.max(step.norm());
        }
        if delta_max < 1e-14 * bound.max(1.0) {
            break;
        }
    }
    Ok(zs)
}

/// A few Newton steps against the exact polynomial, then the containment
/// radius `deg·|p(z)/p'(z)|` (inflated for rounding).
fn newton_refine(p: &Poly<Scalar>, mut z: Complex64) -> (Complex64, f64) {
    let dp = p.derivative();
    for _ in 0..12 {
        let pv = p.eval_f64(z);
        let dv = dp.eval_f64(z);
        if dv.norm() == 0.0 {
            break;
        }
        let step = pv / dv;
        z -= step;
        if step.norm() < 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    let pv = p.eval_f64(z);
    let dv = dp.eval_f64(z);
    let radius = if dv.norm() == 0.0 {
        1e-6
    } else {
        (p.degree() as f64) * (pv / dv).norm() * 8.0 + 1e-290
    };
    (z, radius.max(1e-300))
}

/// Does the isolated root of `v` also solve `other`? Exact through the gcd.
pub fn certified_root_solves(v: &CertifiedRoot, other: &Poly<Scalar>) -> Result<bool> {
    if other.is_zero() {
        return Ok(true);
    }
    let g = v.poly.gcd(other);
    if g.degree() == 0 || g.is_zero() {
        return Ok(false);
    }
    let refined = v.refined();
    for root in isolate_squarefree(&g)? {
        if let Some(z) = root.to_complex() {
            if (z - refined.center()).norm() <= refined.radius + 1e-9 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Multiplicity of the point (given as any residue value, not infinity) as a
/// root of `p`.
pub fn value_root_multiplicity(p: &Poly<Scalar>, v: &ResidueValue) -> Result<usize> {
    match v {
        ResidueValue::Infinity => Err(CoreError::CellMismatch(String::from(
            "infinity has no multiplicity in an affine polynomial",
        ))),
        ResidueValue::Exact(s) => Ok(p.root_multiplicity(s)),
        ResidueValue::Certified(c) => {
            if p.is_zero() {
                return Err(CoreError::DivisionByZero);
            }
            let mut total = 0usize;
            for (factor, mult) in p.squarefree_decomposition() {
                if certified_root_solves(c, &factor)? {
                    total += mult;
                }
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn poly(coeffs: &[i64]) -> Poly<Scalar> {
        Poly::from_coeffs(coeffs.iter().map(|&c| Scalar::from_i64(c)).collect())
    }

    #[test]
    fn exact_roots_are_extracted() {
        // (z-1)(z+2)(z-1/2) cleared: roots 1, -2, 1/2
        let half = Poly::from_coeffs(vec![Scalar::from_frac(-1, 2), Scalar::one()]);
        let p = poly(&[-1, 1]).mul(&poly(&[2, 1])).mul(&half);
        let roots = isolate_squarefree(&p).unwrap();
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!(matches!(r, ResidueValue::Exact(_)), "{r}");
        }
        assert!(roots.contains(&ResidueValue::Exact(Scalar::from_frac(1, 2))));
    }

    #[test]
    fn gaussian_roots() {
        // z^2 + 1 = (z-i)(z+i)
        let p = poly(&[1, 0, 1]);
        let roots = isolate_squarefree(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&ResidueValue::Exact(Scalar::i())));
    }

    #[test]
    fn irrational_roots_are_certified_and_distinct() {
        // z^2 - 2: no Q(i) roots
        let p = poly(&[-2, 0, 1]);
        let roots = isolate_squarefree(&p).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!(matches!(r, ResidueValue::Certified(_)));
        }
        assert_ne!(roots[0], roots[1]);
        // each equals itself
        assert_eq!(roots[0], roots[0].clone());
    }

    #[test]
    fn certified_equality_across_polynomials() {
        // sqrt(2) as a root of z^2-2 and of (z^2-2)(z-1) share the gcd
        let p = poly(&[-2, 0, 1]);
        let q = p.mul(&poly(&[-1, 1]));
        let rp = isolate_squarefree(&p).unwrap();
        let rq = roots_with_multiplicity(&q).unwrap();
        let sqrt2_p = rp
            .iter()
            .find(|r| r.to_complex().map(|z| z.re > 0.0).unwrap_or(false))
            .unwrap();
        let sqrt2_q = rq
            .iter()
            .map(|(r, _)| r)
            .find(|r| {
                matches!(r, ResidueValue::Certified(_))
                    && r.to_complex().map(|z| z.re > 0.0).unwrap_or(false)
            })
            .unwrap();
        assert_eq!(sqrt2_p, sqrt2_q);
    }

    #[test]
    fn multiplicities() {
        // (z-1)^2 (z^2-2)
        let p = poly(&[-1, 1]).mul(&poly(&[-1, 1])).mul(&poly(&[-2, 0, 1]));
        let roots = roots_with_multiplicity(&p).unwrap();
        let mult_sum: usize = roots.iter().map(|(_, m)| m).sum();
        assert_eq!(mult_sum, 4);
        let one = roots
            .iter()
            .find(|(r, _)| r == &ResidueValue::Exact(Scalar::one()))
            .unwrap();
        assert_eq!(one.1, 2);
    }

    #[test]
    fn value_multiplicity_for_certified() {
        let s = poly(&[-2, 0, 1]);
        let roots = isolate_squarefree(&s).unwrap();
        let v = &roots[0];
        // p = (z^2-2)^3 (z-5)
        let p = s.mul(&s).mul(&s).mul(&poly(&[-5, 1]));
        assert_eq!(value_root_multiplicity(&p, v).unwrap(), 3);
    }

    #[test]
    fn reconstruction_handles_fractions() {
        let x = 0.333333333333333333f64;
        let r = reconstruct_rat(x, &BigInt::from(100)).unwrap();
        assert_eq!(r, rat(1, 3));
    }
}
