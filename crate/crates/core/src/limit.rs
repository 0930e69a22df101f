//! Case classification of the limit theorem, exceptional-point checks, the
//! stationarity formula for the exceptional-direction mass, the atomic
//! limit measure, and the closed-form description of the limit set.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebraic::ResidueValue;
use crate::dynamics::GaussOrbit;
use crate::error::{CoreError, Result};
use crate::geometry::{direction_at, DirectionTarget, ProjPoint};
use crate::measures::{AtomicComplexMeasure, ProjectedEquilibrium};
use crate::poly::Poly;
use crate::puiseux::PuiseuxElem;
use crate::reduction::{reduce_map, RationalMapFamily};
use crate::scalar::{rat_string, Rat};

/// A candidate totally invariant classical point.
#[derive(Clone, Debug, PartialEq)]
pub enum ExceptionalCandidate {
    Infinity,
    Finite(PuiseuxElem),
}

impl ExceptionalCandidate {
    pub fn to_proj(&self) -> ProjPoint {
        match self {
            ExceptionalCandidate::Infinity => ProjPoint::infinity(),
            ExceptionalCandidate::Finite(a) => ProjPoint::finite(a.clone()),
        }
    }

    pub fn display(&self) -> String {
        match self {
            ExceptionalCandidate::Infinity => String::from("inf"),
            ExceptionalCandidate::Finite(a) => a.canonical_string(),
        }
    }
}

/// Is `a` a fixed point with `f^{-1}(a) = {a}` (vanishing order `d`)?
pub fn exceptional_fixed_check(
    f: &RationalMapFamily,
    a: &ExceptionalCandidate,
) -> Result<bool> {
    let d = f.degree();
    match a {
        ExceptionalCandidate::Infinity => {
            // f^{-1}(inf) = {inf} iff the denominator has no zeros: it is a
            // nonzero constant (then deg num = d by validity)
            Ok(!f.den().is_zero() && f.den().degree() == 0)
        }
        ExceptionalCandidate::Finite(a) => {
            if !a.is_exact() {
                return Err(CoreError::InsufficientPrecision(String::from(
                    "exceptional candidates must be exact",
                )));
            }
            // order of vanishing of f(z) - a at z = a equals d iff
            // num - a·den = lc·(z - a)^d
            let r = f.num().sub(&f.den().scale(a));
            if r.is_zero() || r.degree() != d {
                return Ok(false);
            }
            let lc = r.coeff(d);
            let lin = Poly::from_coeffs(vec![a.neg(), PuiseuxElem::one()]);
            let mut pow = Poly::one();
            for _ in 0..d {
                pow = pow.mul(&lin);
            }
            Ok(r == pow.scale(&lc))
        }
    }
}

/// Per-step evidence recorded by the classifier.
#[derive(Clone, Debug)]
pub struct StepEvidence {
    pub index: usize,
    pub local_degree: usize,
    pub radius_exp: Rat,
    pub rho_increment: Rat,
}

/// Data of an established case II.
#[derive(Clone, Debug)]
pub struct CaseTwoData {
    pub exceptional: ExceptionalCandidate,
    /// label of the direction from the Gauss point toward the exceptional
    /// point
    pub exceptional_label: ResidueValue,
    /// stationarity onset: `deg_{S_j}(f) = d` for all computed `j >= onset`
    pub onset: usize,
    /// `ν_f(U_{→S_G a}) = 1 - deg_{S_G}(f^{n0})/d^{n0}`
    pub nu: Rat,
    /// `deg_{f^n(S_G)}(f) = d` for every `n >= 0`
    pub identically: bool,
}

#[derive(Clone, Debug)]
pub enum CaseKind {
    /// Surplus-equidistribution evidence: the maximally ramified fraction
    /// `deg_{S_G}(f^N)/d^N` at the horizon (reported, not proof-grade).
    I { certificate: Rat },
    II(CaseTwoData),
    Undetermined { reason: String },
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub case: CaseKind,
    pub window: usize,
    pub horizon: usize,
    pub evidence: Vec<StepEvidence>,
}

/// Classification plus the orbit it was computed from.
#[derive(Debug)]
pub struct LimitAnalysis {
    pub orbit: GaussOrbit,
    pub report: CaseReport,
}

/// Classify the family within a finite window: case II needs `window`
/// consecutive maximally ramified tail steps, monotone escape along
/// `[S_G, a]`, and a certified exceptional limit; case I is evidenced by at
/// least `window` degree drops. Everything else is Undetermined.
pub fn classify_case(
    f: &RationalMapFamily,
    window: usize,
    extra_candidates: &[ExceptionalCandidate],
) -> Result<LimitAnalysis> {
    if f.degree() < 2 {
        return Err(CoreError::InvalidFamily(String::from("classification needs degree > 1")));
    }
    if reduce_map(f)?.good_reduction() {
        return Err(CoreError::HypothesisViolated);
    }
    let window = window.max(2);
    let horizon = (2 * window + 2).max(8);
    let orbit = GaussOrbit::compute(f, horizon)?;
    let d = f.degree();

    let evidence: Vec<StepEvidence> = (0..horizon)
        .map(|j| {
            let step = orbit.step(j).expect("within horizon");
            StepEvidence {
                index: j,
                local_degree: step.local_degree,
                radius_exp: step.point.radius_exp().clone(),
                rho_increment: step.rho_increment.clone(),
            }
        })
        .collect();

    let tail_ramified = evidence[horizon - window..].iter().all(|e| e.local_degree == d);
    let case = if tail_ramified {
        // onset: first index from which every computed degree equals d
        let onset = (0..horizon)
            .rev()
            .take_while(|&j| evidence[j].local_degree == d)
            .last()
            .unwrap_or(horizon);
        match find_exceptional_limit(f, &orbit, onset, horizon, extra_candidates)? {
            Some((cand, label)) => {
                let n0 = onset;
                let mut dn = Rat::one();
                for _ in 0..n0 {
                    dn *= Rat::from(BigInt::from(d));
                }
                let nu = Rat::one()
                    - Rat::from(orbit.gauss_local_degree_of_iterate(n0)?) / dn;
                CaseKind::II(CaseTwoData {
                    exceptional: cand,
                    exceptional_label: label,
                    onset: n0,
                    nu,
                    identically: n0 == 0,
                })
            }
            None => CaseKind::Undetermined {
                reason: String::from(
                    "maximally ramified tail, but no candidate exceptional point is a \
                     certified monotone limit of the orbit",
                ),
            },
        }
    } else {
        let drops = evidence.iter().filter(|e| e.local_degree < d).count();
        if drops >= window {
            let mut dn = Rat::one();
            for _ in 0..horizon {
                dn *= Rat::from(BigInt::from(d));
            }
            let certificate = Rat::from(orbit.gauss_local_degree_of_iterate(horizon)?) / dn;
            CaseKind::I { certificate }
        } else {
            CaseKind::Undetermined {
                reason: format!(
                    "only {drops} degree drops and no {window}-step maximally ramified tail \
                     within horizon {horizon}"
                ),
            }
        }
    };
    Ok(LimitAnalysis { orbit, report: CaseReport { case, window, horizon, evidence } })
}

/// Search the candidate set for an exceptional point that the orbit tail
/// escapes to monotonically along `[S_G, a]`.
fn find_exceptional_limit(
    f: &RationalMapFamily,
    orbit: &GaussOrbit,
    onset: usize,
    horizon: usize,
    extra: &[ExceptionalCandidate],
) -> Result<Option<(ExceptionalCandidate, ResidueValue)>> {
    let mut candidates = vec![
        ExceptionalCandidate::Infinity,
        ExceptionalCandidate::Finite(PuiseuxElem::zero()),
    ];
    candidates.extend(extra.iter().cloned());
    'cand: for cand in candidates {
        if !exceptional_fixed_check(f, &cand)? {
            continue;
        }
        let start = onset.max(1);
        for j in start..horizon {
            let s_j = orbit.point(j)?;
            let s_next = orbit.point(j + 1)?;
            match &cand {
                ExceptionalCandidate::Infinity => {
                    // tail must be 0-centred growing disks
                    let on_segment = s_j.center().is_exact_zero()
                        && s_next.center().is_exact_zero()
                        && s_j.radius_exp() <= &Rat::zero()
                        && s_next.radius_exp() < s_j.radius_exp();
                    if !on_segment {
                        continue 'cand;
                    }
                }
                ExceptionalCandidate::Finite(a) => {
                    let nested = s_j.contains_disk(s_next)?
                        && s_next.radius_exp() > s_j.radius_exp()
                        && s_next.contains_point(a)?;
                    if !nested {
                        continue 'cand;
                    }
                }
            }
        }
        let gauss = crate::geometry::TypeIIPoint::gauss();
        let label = direction_at(&gauss, &DirectionTarget::Classical(cand.to_proj()))?.value;
        return Ok(Some((cand, label)));
    }
    Ok(None)
}

/// `ν_f(U_{→S_G a})` via the stationarity formula, plus the flag of the
/// stronger "maximally ramified from the start" condition.
pub fn nu_mass_exceptional_direction(
    f: &RationalMapFamily,
    window: usize,
) -> Result<(Rat, bool)> {
    let analysis = classify_case(f, window, &[])?;
    match analysis.report.case {
        CaseKind::II(data) => Ok((data.nu, data.identically)),
        CaseKind::I { .. } => Err(CoreError::NotCaseII),
        CaseKind::Undetermined { reason } => Err(CoreError::NotStationary(reason)),
    }
}

/// One row of the limit-measure iteration table.
#[derive(Clone, Debug)]
pub struct LimitTableRow {
    pub n: usize,
    pub approximation: AtomicComplexMeasure,
    /// the monotone surplus contribution `d^{-n} s_v(f^n)` alone
    pub surplus_part: AtomicComplexMeasure,
    /// the directional contribution `d^{-n} m_v(f^n)·[S ∈ U_{(f^n)_* v}]`
    pub directional_part: AtomicComplexMeasure,
}

/// The limit measure computation: stabilised atoms, the unstabilised
/// remainder as leftover, and the full per-`n` table.
#[derive(Debug)]
pub struct LimitMeasureResult {
    pub measure: AtomicComplexMeasure,
    pub n_used: usize,
    pub table: Vec<LimitTableRow>,
}

/// The projection of the equilibrium measure to the Gauss partition,
/// approximated by `d^{-n} (f^n)^* δ_S` for an exact classical base point.
///
/// Each row's atom at `v` is `d^{-n}(m_v(f^n)·[S ∈ U_{(f^n)_* v}] + s_v(f^n))`;
/// the surplus part accumulates monotonically, the directional part follows
/// the preimage tree of the direction toward the base point. An atom is
/// frozen into the result once two consecutive rows agree on it; the
/// leftover is the mass not yet frozen. Iteration stops at `n_max` or when
/// the leftover change drops below `tol`.
pub fn limit_measure(
    f: &RationalMapFamily,
    base: &ProjPoint,
    n_max: usize,
    tol: &Rat,
) -> Result<LimitMeasureResult> {
    if reduce_map(f)?.good_reduction() {
        return Err(CoreError::HypothesisViolated);
    }
    guard_base(f, base)?;
    let n_max = n_max.max(2);
    let orbit = GaussOrbit::compute(f, n_max)?;
    let d = Rat::from(BigInt::from(f.degree()));
    let gauss = crate::geometry::TypeIIPoint::gauss();

    let mut table: Vec<LimitTableRow> = Vec::new();
    let mut prev_leftover = Rat::one();
    let mut n_used = 0;
    for n in 1..=n_max {
        let mut dn = Rat::one();
        for _ in 0..n {
            dn *= &d;
        }
        let mut surplus_part = AtomicComplexMeasure::new();
        for (v, s) in orbit.surplus_support(n)? {
            surplus_part.add_atom(v, Rat::from(s) / &dn)?;
        }
        // the unique direction at S_n containing the base point
        let s_n = orbit.point(n)?;
        let toward_base = if s_n.is_gauss() {
            direction_at(&gauss, &DirectionTarget::Classical(base.clone()))?.value
        } else {
            direction_at(s_n, &DirectionTarget::Classical(base.clone()))?.value
        };
        let mut directional_part = AtomicComplexMeasure::new();
        for (v, m) in orbit.pullback_label_chain(&toward_base, n)? {
            directional_part.add_atom(v, Rat::from(m) / &dn)?;
        }
        let mut approx = AtomicComplexMeasure::new();
        for (v, m) in surplus_part.support().into_iter().chain(directional_part.support()) {
            approx.add_atom(v, m)?;
        }
        // mass conservation: the full pullback of a Dirac mass has total d^n
        if !approx.total().is_one() {
            return Err(CoreError::PrecisionExceeded(format!(
                "mass conservation failed at n = {n}: total {}",
                rat_string(&approx.total())
            )));
        }
        table.push(LimitTableRow { n, approximation: approx, surplus_part, directional_part });
        n_used = n;
        if n >= 2 {
            let leftover = assemble(&table[n - 2], &table[n - 1])?.leftover().clone();
            let change = (&prev_leftover - &leftover).abs();
            prev_leftover = leftover.clone();
            if leftover.is_zero() || (&change < tol && n >= 3) {
                break;
            }
        }
    }

    let measure = if table.len() >= 2 {
        assemble(&table[table.len() - 2], &table[table.len() - 1])?
    } else {
        let mut m = AtomicComplexMeasure::new();
        m.set_leftover(Rat::one())?;
        m
    };
    Ok(LimitMeasureResult { measure, n_used, table })
}

/// The reported measure: the (monotone, sound-from-below) surplus part at
/// the final row, plus directional atoms whose combined value agrees across
/// the last two rows; everything else stays leftover.
fn assemble(prev: &LimitTableRow, cur: &LimitTableRow) -> Result<AtomicComplexMeasure> {
    let mut out = AtomicComplexMeasure::new();
    let mut attributed = Rat::zero();
    for (v, s_mass) in cur.surplus_part.support() {
        attributed += &s_mass;
        out.add_atom(v, s_mass)?;
    }
    for (v, m_mass) in cur.directional_part.support() {
        let stable = prev.approximation.mass_at(&v) == cur.approximation.mass_at(&v);
        if stable {
            attributed += &m_mass;
            out.add_atom(v, m_mass)?;
        }
    }
    out.set_leftover(Rat::one() - attributed)?;
    Ok(out)
}

fn guard_base(f: &RationalMapFamily, base: &ProjPoint) -> Result<()> {
    let candidates = [
        ExceptionalCandidate::Infinity,
        ExceptionalCandidate::Finite(PuiseuxElem::zero()),
        match base.is_infinity() {
            true => ExceptionalCandidate::Infinity,
            false => ExceptionalCandidate::Finite(
                // base as a value: only exact finite bases are guarded here
                base.numer.div(&base.denom).unwrap_or_else(|_| PuiseuxElem::zero()),
            ),
        },
    ];
    for cand in candidates {
        if exceptional_fixed_check(f, &cand)? {
            let hit = match (&cand, base.is_infinity()) {
                (ExceptionalCandidate::Infinity, true) => true,
                (ExceptionalCandidate::Finite(a), false) => {
                    base.numer.sub(&a.mul(&base.denom)).is_exact_zero()
                }
                _ => false,
            };
            if hit {
                return Err(CoreError::ExceptionalBase(cand.display()));
            }
        }
    }
    Ok(())
}

/// The closed-form description of the limit set.
pub struct DeltaDescription {
    pub report: CaseReport,
    /// the projected equilibrium measure (exact when its leftover is 0)
    pub projection: AtomicComplexMeasure,
    pub projection_n_used: usize,
    /// case II only: the witness-parameter data
    pub case_two: Option<DeltaCaseTwo>,
}

pub struct DeltaCaseTwo {
    pub nu: Rat,
    /// `Δ† ⊊ Δ` iff the exceptional-direction mass is positive
    pub dagger_proper: bool,
    pub equilibrium: ProjectedEquilibrium,
}

/// Assemble the full description: classification, the projected measure,
/// and in case II the `(s, s')` parameter data with the exact bound.
pub fn delta_f_description(
    f: &RationalMapFamily,
    window: usize,
    extra_candidates: &[ExceptionalCandidate],
    base: &ProjPoint,
    n_max: usize,
    tol: &Rat,
) -> Result<DeltaDescription> {
    let analysis = classify_case(f, window, extra_candidates)?;
    match &analysis.report.case {
        CaseKind::Undetermined { reason } => Err(CoreError::Undetermined(reason.clone())),
        CaseKind::I { .. } => {
            let lm = limit_measure(f, base, n_max, tol)?;
            Ok(DeltaDescription {
                report: analysis.report,
                projection: lm.measure,
                projection_n_used: lm.n_used,
                case_two: None,
            })
        }
        CaseKind::II(data) => {
            let lm = limit_measure(f, base, n_max, tol)?;
            let eq = projected_equilibrium(&lm.measure, data)?;
            Ok(DeltaDescription {
                report: analysis.report.clone(),
                projection: lm.measure,
                projection_n_used: lm.n_used,
                case_two: Some(DeltaCaseTwo {
                    nu: data.nu.clone(),
                    dagger_proper: data.nu.is_positive(),
                    equilibrium: eq,
                }),
            })
        }
    }
}

/// Split the exact projected measure into the exceptional direction and the
/// rest, cross-checking the stationarity value.
pub fn projected_equilibrium(
    measure: &AtomicComplexMeasure,
    data: &CaseTwoData,
) -> Result<ProjectedEquilibrium> {
    if !measure.leftover().is_zero() {
        return Err(CoreError::PrecisionExceeded(String::from(
            "projected equilibrium measure is not exactly resolved",
        )));
    }
    let at_exceptional = measure.mass_at(&data.exceptional_label);
    if at_exceptional != data.nu {
        return Err(CoreError::PrecisionExceeded(format!(
            "exceptional-direction mass {} disagrees with the stationarity value {}",
            rat_string(&at_exceptional),
            rat_string(&data.nu)
        )));
    }
    let other_atoms: Vec<(ResidueValue, Rat)> = measure
        .support()
        .into_iter()
        .filter(|(v, _)| v != &data.exceptional_label)
        .collect();
    Ok(ProjectedEquilibrium {
        exceptional_label: data.exceptional_label.clone(),
        nu_exceptional: data.nu.clone(),
        other_atoms,
    })
}
