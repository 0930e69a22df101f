//! Floating-point complex dynamics: specialise a family at `t = t0`,
//! sample the maximal entropy measure by backward iteration, and compare
//! the empirical measure against predicted atoms in the chordal metric.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use berklim_core::algebraic::ResidueValue;
use berklim_core::measures::AtomicComplexMeasure;
use berklim_core::reduction::RationalMapFamily;
use num_traits::ToPrimitive;

#[derive(Clone, Debug, PartialEq)]
pub enum VerifierError {
    /// `t0` outside the punctured unit disk, or a coefficient that cannot
    /// be evaluated numerically.
    BadParameter(String),
    /// The numeric resultant underflows: the specialisation loses degree.
    DegreeDropped { t0: Complex64, conditioning: f64 },
    /// Root solving failed to converge after retries.
    RootSolveFailure(String),
    /// Predicted atoms are closer than the requested chordal separation.
    AtomsTooClose(String),
}

impl core::fmt::Display for VerifierError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            VerifierError::BadParameter(d) => write!(f, "bad parameter: {d}"),
            VerifierError::DegreeDropped { t0, conditioning } => write!(
                f,
                "degree dropped at t0 = {t0}: resultant conditioning {conditioning:.3e}"
            ),
            VerifierError::RootSolveFailure(d) => write!(f, "root solve failure: {d}"),
            VerifierError::AtomsTooClose(d) => write!(f, "atoms too close: {d}"),
        }
    }
}

/// A point on the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }
}

/// Chordal distance normalised to diameter 1:
/// `|a-b| / sqrt((1+|a|^2)(1+|b|^2))`, with the usual conventions at
/// infinity.
pub fn chordal(a: &SpherePoint, b: &SpherePoint) -> f64 {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Infinity, SpherePoint::Finite(z))
        | (SpherePoint::Finite(z), SpherePoint::Infinity) => {
            1.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

/// A specialised member of the family with f64 coefficients.
#[derive(Clone, Debug)]
pub struct ComplexMapInstance {
    degree: usize,
    num: Vec<Complex64>,
    den: Vec<Complex64>,
    pub t0: Complex64,
}

impl ComplexMapInstance {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Direct construction from coefficient lists (ascending degree).
    pub fn from_coeffs(
        num: Vec<Complex64>,
        den: Vec<Complex64>,
        degree: usize,
        t0: Complex64,
    ) -> Result<Self, VerifierError> {
        let inst = ComplexMapInstance { degree, num, den, t0 };
        inst.conditioning_check()?;
        Ok(inst)
    }

    fn conditioning_check(&self) -> Result<(), VerifierError> {
        let d = self.degree;
        let get = |v: &Vec<Complex64>, k: usize| v.get(k).copied().unwrap_or(Complex64::ZERO);
        let n = 2 * d;
        let mut m = vec![vec![Complex64::ZERO; n]; n];
        for row in 0..d {
            for k in 0..=d {
                m[row][row + k] = get(&self.num, d - k);
                m[d + row][row + k] = get(&self.den, d - k);
            }
        }
        let det = lu_determinant(&mut m);
        let scale = self
            .num
            .iter()
            .chain(self.den.iter())
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let conditioning = det.norm() / scale.powi(2 * d as i32);
        if !conditioning.is_finite() || conditioning < 1e-13 {
            return Err(VerifierError::DegreeDropped { t0: self.t0, conditioning });
        }
        Ok(())
    }

    /// All `d` preimages of `w`, counted with multiplicity through root
    /// clustering of the fibre polynomial `P(z) - w·Q(z)`.
    pub fn preimages(&self, w: &SpherePoint) -> Result<Vec<SpherePoint>, VerifierError> {
        let d = self.degree;
        let mut coeffs: Vec<Complex64> = match w {
            SpherePoint::Finite(w) => (0..=d)
                .map(|k| {
                    self.num.get(k).copied().unwrap_or(Complex64::ZERO)
                        - w * self.den.get(k).copied().unwrap_or(Complex64::ZERO)
                })
                .collect(),
            SpherePoint::Infinity => {
                (0..=d).map(|k| self.den.get(k).copied().unwrap_or(Complex64::ZERO)).collect()
            }
        };
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if scale == 0.0 {
            return Err(VerifierError::RootSolveFailure("zero fibre polynomial".into()));
        }
        // degree drop: preimages at infinity
        let mut at_infinity = 0usize;
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= 1e-13 * scale {
            coeffs.pop();
            at_infinity += 1;
        }
        let mut roots = vec![SpherePoint::Infinity; at_infinity];
        let deg = coeffs.len() - 1;
        if deg == 0 {
            if at_infinity != d {
                return Err(VerifierError::RootSolveFailure(
                    "fibre polynomial collapsed to a constant".into(),
                ));
            }
            return Ok(roots);
        }
        let finite = if deg == 1 {
            vec![-coeffs[0] / coeffs[1]]
        } else if deg == 2 {
            solve_quadratic(coeffs[0], coeffs[1], coeffs[2])
        } else {
            durand_kerner_f64(&coeffs)?
        };
        roots.extend(finite.into_iter().map(SpherePoint::Finite));
        debug_assert_eq!(roots.len(), d);
        Ok(roots)
    }
}

/// Numerically stable quadratic roots of `c0 + c1 z + c2 z^2`.
fn solve_quadratic(c0: Complex64, c1: Complex64, c2: Complex64) -> Vec<Complex64> {
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    // pick the sign giving the larger |c1 ± disc| to avoid cancellation
    let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
        -0.5 * (c1 + disc)
    } else {
        -0.5 * (c1 - disc)
    };
    if q.norm() == 0.0 {
        return vec![Complex64::ZERO, Complex64::ZERO];
    }
    vec![q / c2, c0 / q]
}

fn durand_kerner_f64(coeffs: &[Complex64]) -> Result<Vec<Complex64>, VerifierError> {
    let deg = coeffs.len() - 1;
    let lead = *coeffs.last().unwrap();
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let bound = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::ZERO;
        for c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    for attempt in 0..3 {
        let seed = Complex64::new(0.4, 0.9) * Complex64::new(1.0, 0.17 * attempt as f64).exp();
        let mut zs: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32 + 1) * bound).collect();
        let mut converged = false;
        for _ in 0..200 {
            let mut delta = 0.0f64;
            for i in 0..deg {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..deg {
                    if i != j {
                        denom *= zs[i] - zs[j];
                    }
                }
                if denom.norm() == 0.0 {
                    zs[i] += Complex64::new(1e-8, 1e-8);
                    continue;
                }
                let step = eval(zs[i]) / denom;
                zs[i] -= step;
                delta = delta.max(step.norm());
            }
            if delta < 1e-13 * bound.max(1.0) {
                converged = true;
                break;
            }
        }
        if converged {
            return Ok(zs);
        }
    }
    Err(VerifierError::RootSolveFailure(format!("degree {deg} fibre did not converge")))
}

fn lu_determinant(m: &mut [Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let pivot = (k..n).max_by(|&a, &b| {
            m[a][k].norm().partial_cmp(&m[b][k].norm()).unwrap_or(core::cmp::Ordering::Equal)
        });
        let p = pivot.unwrap();
        if m[p][k].norm() == 0.0 {
            return Complex64::ZERO;
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let factor = m[i][k] / m[k][k];
            for j in k..n {
                let sub = factor * m[k][j];
                m[i][j] -= sub;
            }
        }
    }
    det
}

/// Evaluate the family coefficients at `t0` (principal branch for
/// fractional powers of `t`).
pub fn specialize(
    f: &RationalMapFamily,
    t0: Complex64,
) -> Result<ComplexMapInstance, VerifierError> {
    let r = t0.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(VerifierError::BadParameter(format!(
            "t0 must satisfy 0 < |t0| < 1, got |t0| = {r}"
        )));
    }
    let eval = |p: &berklim_core::poly::Poly<berklim_core::puiseux::PuiseuxElem>| {
        (0..=f.degree())
            .map(|k| {
                let c = p.coeff(k);
                c.eval_f64(t0.re, t0.im)
                    .map(|(re, im)| Complex64::new(re, im))
                    .map_err(|e| VerifierError::BadParameter(format!("coefficient {k}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let num = eval(f.num())?;
    let den = eval(f.den())?;
    ComplexMapInstance::from_coeffs(num, den, f.degree(), t0)
}

/// An empirical sample of the maximal entropy measure.
#[derive(Clone, Debug)]
pub struct EmpiricalMeasure {
    pub samples: Vec<SpherePoint>,
    pub seed: u64,
    pub burn_in: usize,
}

impl EmpiricalMeasure {
    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// Fraction of samples within chordal radius `eps` of `center`.
    pub fn mass_near(&self, center: &SpherePoint, eps: f64) -> f64 {
        let hits = self.samples.iter().filter(|s| chordal(s, center) <= eps).count();
        hits as f64 / self.samples.len() as f64
    }
}

fn chain_seed(seed: u64, chain: u64) -> u64 {
    // SplitMix64 over (seed, chain)
    let mut x = seed ^ chain.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Backward-orbit sampling: independent chains from a fixed start point,
/// each drawing uniformly among the `d` preimages (with multiplicity) for
/// `burn_in + 1` steps; one sample per chain. Reproducible per seed; chain
/// seeds are derived, so any execution order yields the same multiset.
pub fn backward_orbit_measure(
    g: &ComplexMapInstance,
    n_samples: usize,
    burn_in: usize,
    seed: u64,
) -> Result<EmpiricalMeasure, VerifierError> {
    if g.degree() < 2 {
        return Err(VerifierError::BadParameter("sampling needs degree > 1".into()));
    }
    let start = SpherePoint::Finite(Complex64::new(2.0, 0.0));
    let mut samples = Vec::with_capacity(n_samples);
    for chain in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(chain_seed(seed, chain as u64));
        let mut w = start;
        for _ in 0..=burn_in {
            let roots = g.preimages(&w)?;
            debug_assert_eq!(roots.len(), g.degree());
            w = roots[rng.gen_range(0..roots.len())];
        }
        samples.push(w);
    }
    Ok(EmpiricalMeasure { samples, seed, burn_in })
}

/// Per-atom comparison row.
#[derive(Clone, Debug)]
pub struct AtomComparison {
    pub point: SpherePoint,
    pub predicted: f64,
    pub empirical: f64,
}

/// The comparison report against a predicted atomic measure.
#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub atoms: Vec<AtomComparison>,
    pub unassigned: f64,
    pub predicted_leftover: f64,
    pub max_deviation: f64,
    pub eps: f64,
}

/// Convert exact predicted atoms to sphere points with f64 masses.
pub fn predicted_atoms(measure: &AtomicComplexMeasure) -> Vec<(SpherePoint, f64)> {
    measure
        .support()
        .into_iter()
        .map(|(v, mass)| {
            let p = match &v {
                ResidueValue::Infinity => SpherePoint::Infinity,
                _ => SpherePoint::Finite(v.to_complex().unwrap_or(Complex64::ZERO)),
            };
            (p, mass.to_f64().unwrap_or(f64::NAN))
        })
        .collect()
}

/// Empirical mass in `eps`-disks around each predicted atom, the unassigned
/// remainder, and the max absolute deviation.
pub fn compare_measures(
    emp: &EmpiricalMeasure,
    predicted: &[(SpherePoint, f64)],
    predicted_leftover: f64,
    eps: f64,
) -> Result<ComparisonReport, VerifierError> {
    for (i, (a, _)) in predicted.iter().enumerate() {
        for (b, _) in predicted.iter().skip(i + 1) {
            let sep = chordal(a, b);
            if sep <= 2.0 * eps {
                return Err(VerifierError::AtomsTooClose(format!(
                    "chordal separation {sep:.4} <= 2·eps = {:.4}",
                    2.0 * eps
                )));
            }
        }
    }
    let mut atoms = Vec::with_capacity(predicted.len());
    let mut assigned = 0.0f64;
    let mut max_dev = 0.0f64;
    for (p, mass) in predicted {
        let e = emp.mass_near(p, eps);
        assigned += e;
        max_dev = max_dev.max((e - mass).abs());
        atoms.push(AtomComparison { point: *p, predicted: *mass, empirical: e });
    }
    Ok(ComparisonReport {
        atoms,
        unassigned: 1.0 - assigned,
        predicted_leftover,
        max_deviation: max_dev,
        eps,
    })
}

/// One row of a convergence study.
#[derive(Clone, Debug)]
pub struct StudyRow {
    pub t0: Complex64,
    pub report: ComparisonReport,
}

/// Run the sampler at each `t` against the same predicted atoms.
pub fn convergence_study(
    f: &RationalMapFamily,
    t_list: &[Complex64],
    predicted: &[(SpherePoint, f64)],
    predicted_leftover: f64,
    n_samples: usize,
    burn_in: usize,
    seed: u64,
    eps: f64,
) -> Result<Vec<StudyRow>, VerifierError> {
    let mut rows = Vec::with_capacity(t_list.len());
    for (k, t0) in t_list.iter().enumerate() {
        let g = specialize(f, *t0)?;
        let emp = backward_orbit_measure(&g, n_samples, burn_in, seed.wrapping_add(k as u64))?;
        let report = compare_measures(&emp, predicted, predicted_leftover, eps)?;
        rows.push(StudyRow { t0: *t0, report });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure_square(t0: f64) -> ComplexMapInstance {
        ComplexMapInstance::from_coeffs(
            vec![Complex64::ZERO, Complex64::ZERO, Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0)],
            2,
            Complex64::new(t0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn deterministic_given_seed() {
        let g = pure_square(0.5);
        let a = backward_orbit_measure(&g, 500, 10, 42).unwrap();
        let b = backward_orbit_measure(&g, 500, 10, 42).unwrap();
        assert_eq!(a.samples, b.samples);
        let c = backward_orbit_measure(&g, 500, 10, 43).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn square_map_concentrates_on_unit_circle() {
        let g = pure_square(0.5);
        let emp = backward_orbit_measure(&g, 4000, 16, 7).unwrap();
        let mut near = 0usize;
        let mut dist_sum = 0.0;
        for s in &emp.samples {
            if let SpherePoint::Finite(z) = s {
                let d = (z.norm() - 1.0).abs();
                dist_sum += d;
                if d < 0.05 {
                    near += 1;
                }
            }
        }
        assert!(near as f64 / emp.count() as f64 >= 0.99);
        assert!((dist_sum / emp.count() as f64) < 0.01);
    }

    #[test]
    fn chebyshev_interval() {
        // z^2 - 2: samples in [-2, 2] on the real line
        let g = ComplexMapInstance::from_coeffs(
            vec![Complex64::new(-2.0, 0.0), Complex64::ZERO, Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0)],
            2,
            Complex64::new(0.5, 0.0),
        )
        .unwrap();
        let emp = backward_orbit_measure(&g, 2000, 16, 11).unwrap();
        for s in &emp.samples {
            match s {
                SpherePoint::Finite(z) => {
                    assert!(z.im.abs() < 1e-6, "imaginary part {z}");
                    assert!(z.re.abs() <= 2.0 + 1e-6);
                }
                SpherePoint::Infinity => panic!("unexpected sample at infinity"),
            }
        }
    }

    #[test]
    fn negative_control_detects_wrong_prediction() {
        let g = pure_square(0.5);
        let emp = backward_orbit_measure(&g, 2000, 16, 3).unwrap();
        let predicted = vec![(SpherePoint::Finite(Complex64::ZERO), 1.0)];
        let report = compare_measures(&emp, &predicted, 0.0, 0.05).unwrap();
        assert!(report.max_deviation > 0.9);
    }

    #[test]
    fn preimage_counts_and_degree_drop() {
        // z^2 + 100 z: preimages of finite w are 2; the fibre over infinity
        // degenerates onto infinity with multiplicity 2
        let g = ComplexMapInstance::from_coeffs(
            vec![Complex64::ZERO, Complex64::new(100.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0)],
            2,
            Complex64::new(0.01, 0.0),
        )
        .unwrap();
        let p = g.preimages(&SpherePoint::Finite(Complex64::new(2.0, 0.0))).unwrap();
        assert_eq!(p.len(), 2);
        let p = g.preimages(&SpherePoint::Infinity).unwrap();
        assert_eq!(p, vec![SpherePoint::Infinity, SpherePoint::Infinity]);
    }

    #[test]
    fn atoms_too_close_rejected() {
        let g = pure_square(0.5);
        let emp = backward_orbit_measure(&g, 100, 8, 3).unwrap();
        let predicted = vec![
            (SpherePoint::Finite(Complex64::ZERO), 0.5),
            (SpherePoint::Finite(Complex64::new(0.01, 0.0)), 0.5),
        ];
        assert!(matches!(
            compare_measures(&emp, &predicted, 0.0, 0.05),
            Err(VerifierError::AtomsTooClose(_))
        ));
    }
}
