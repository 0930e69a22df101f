//! Report structures and their JSON/CSV/text renderings. All exact
//! rationals are serialised as `p/q` strings; floats appear only in plot
//! data and Monte Carlo results.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use berklim_core::algebraic::ResidueValue;
use berklim_core::dynamics::GaussOrbit;
use berklim_core::limit::{CaseKind, CaseReport, LimitMeasureResult};
use berklim_core::measures::{AtomicComplexMeasure, DeltaWitness, QuantizedMeasure};
use berklim_core::scalar::{rat_string, Rat};

use crate::verifier::{ComparisonReport, SpherePoint, StudyRow};

pub const SCHEMA_PREFIX: &str = "berklim";
pub const SCHEMA_VERSION: &str = "v1";

pub fn schema(kind: &str) -> String {
    format!("{SCHEMA_PREFIX}/{kind}/{SCHEMA_VERSION}")
}

/// A point of `P^1(C)` in reports: `"inf"` or the exact/approximate value.
pub fn point_string(v: &ResidueValue) -> String {
    v.to_string_short()
}

fn point_complex(v: &ResidueValue) -> (f64, f64, bool) {
    match v {
        ResidueValue::Infinity => (0.0, 0.0, true),
        other => {
            let z = other.to_complex().unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            (z.re, z.im, false)
        }
    }
}

#[derive(Serialize)]
pub struct AtomJson {
    pub point: String,
    pub re: f64,
    pub im: f64,
    pub is_infinity: bool,
    pub mass: String,
}

pub fn atoms_json(measure: &AtomicComplexMeasure) -> Vec<AtomJson> {
    measure
        .support()
        .into_iter()
        .map(|(v, mass)| {
            let (re, im, inf) = point_complex(&v);
            AtomJson {
                point: point_string(&v),
                re,
                im,
                is_infinity: inf,
                mass: rat_string(&mass),
            }
        })
        .collect()
}

pub fn atoms_csv(measure: &AtomicComplexMeasure) -> String {
    let mut out = String::from("re,im,mass,is_infinity\n");
    for (v, mass) in measure.support() {
        let (re, im, inf) = point_complex(&v);
        let m = mass.to_f64().unwrap_or(f64::NAN);
        out.push_str(&format!("{re},{im},{m},{}\n", if inf { 1 } else { 0 }));
    }
    out
}

#[derive(Serialize)]
pub struct CellMassJson {
    pub cell: String,
    pub mass: String,
}

#[derive(Serialize)]
pub struct QuantizedMeasureJson {
    pub gamma: String,
    pub cells: Vec<CellMassJson>,
    pub leftover: String,
}

pub fn quantized_json(m: &QuantizedMeasure) -> QuantizedMeasureJson {
    let gamma = match m.gamma() {
        berklim_core::measures::PartitionGamma::Gauss => String::from("Gamma_G"),
        berklim_core::measures::PartitionGamma::Pair { level, image, .. } => {
            format!("Gamma_f^{level} with S_n = {}", image.canonical_string())
        }
    };
    QuantizedMeasureJson {
        gamma,
        cells: m
            .support()
            .into_iter()
            .map(|(c, mass)| CellMassJson { cell: c.descriptor(), mass: rat_string(&mass) })
            .collect(),
        leftover: rat_string(m.leftover()),
    }
}

#[derive(Serialize)]
pub struct PolyJson {
    pub coefficients: Vec<String>,
}

fn poly_json(p: &berklim_core::poly::Poly<berklim_core::scalar::Scalar>) -> PolyJson {
    PolyJson {
        coefficients: p.coeffs().iter().map(|c| c.canonical_string()).collect(),
    }
}

#[derive(Serialize)]
pub struct ReduceJson {
    pub schema: String,
    pub family: String,
    pub degree: usize,
    pub h_degree: usize,
    pub h_infinity_multiplicity: usize,
    pub h_poly: PolyJson,
    pub divisor: Vec<AtomJson>,
    pub phi_num: PolyJson,
    pub phi_den: PolyJson,
    pub phi_degree: usize,
    pub good_reduction: bool,
    pub report: String,
}

pub fn reduce_json(
    family: &berklim_core::reduction::RationalMapFamily,
    r: &berklim_core::reduction::ReducedMap,
) -> ReduceJson {
    let divisor = r
        .divisor_support()
        .iter()
        .map(|(v, m)| {
            let (re, im, inf) = point_complex(v);
            AtomJson {
                point: point_string(v),
                re,
                im,
                is_infinity: inf,
                mass: format!("{m}/1"),
            }
        })
        .collect();
    ReduceJson {
        schema: schema("reduce"),
        family: format!("{family}"),
        degree: r.degree(),
        h_degree: r.h_degree(),
        h_infinity_multiplicity: r.h_inf_mult(),
        h_poly: poly_json(r.h_poly()),
        divisor,
        phi_num: poly_json(r.phi().num()),
        phi_den: poly_json(r.phi().den()),
        phi_degree: r.phi_degree(),
        good_reduction: r.good_reduction(),
        report: r.report_string(),
    }
}

#[derive(Serialize)]
pub struct OrbitStepJson {
    pub index: usize,
    pub center: String,
    pub radius_exp: String,
    pub local_degree: usize,
    pub rho_increment: String,
}

#[derive(Serialize)]
pub struct OrbitJson {
    pub schema: String,
    pub degree: usize,
    pub steps: Vec<OrbitStepJson>,
}

pub fn orbit_json(orbit: &GaussOrbit) -> OrbitJson {
    OrbitJson {
        schema: schema("orbit"),
        degree: orbit.degree(),
        steps: orbit
            .steps()
            .iter()
            .map(|s| OrbitStepJson {
                index: s.index,
                center: s.point.center().canonical_string(),
                radius_exp: rat_string(s.point.radius_exp()),
                local_degree: s.local_degree,
                rho_increment: rat_string(&s.rho_increment),
            })
            .collect(),
    }
}

pub fn orbit_text(orbit: &GaussOrbit) -> String {
    let mut out = String::from("  j  deg_{S_j}(f)  q_j           rho(S_j, S_{j+1})  center\n");
    for s in orbit.steps() {
        out.push_str(&format!(
            "{:>3}  {:>12}  {:<12}  {:<17}  {}\n",
            s.index,
            s.local_degree,
            rat_string(s.point.radius_exp()),
            rat_string(&s.rho_increment),
            s.point.center().canonical_string(),
        ));
    }
    out
}

#[derive(Serialize)]
pub struct DirectionRowJson {
    pub label: String,
    pub m: String,
    pub s: String,
    pub pushforward: String,
}

#[derive(Serialize)]
pub struct DegreesStepJson {
    pub index: usize,
    pub local_degree: usize,
    pub divisor: Vec<CellMassJson>,
    pub directions: Vec<DirectionRowJson>,
}

#[derive(Serialize)]
pub struct DegreesJson {
    pub schema: String,
    pub steps: Vec<DegreesStepJson>,
}

#[derive(Serialize)]
pub struct LimitRowJson {
    pub n: usize,
    pub atoms: Vec<AtomJson>,
}

#[derive(Serialize)]
pub struct LimitJson {
    pub schema: String,
    pub atoms: Vec<AtomJson>,
    pub leftover: String,
    pub n_used: usize,
    pub table: Vec<LimitRowJson>,
}

pub fn limit_json(result: &LimitMeasureResult) -> LimitJson {
    LimitJson {
        schema: schema("limit"),
        atoms: atoms_json(&result.measure),
        leftover: rat_string(result.measure.leftover()),
        n_used: result.n_used,
        table: result
            .table
            .iter()
            .map(|row| LimitRowJson { n: row.n, atoms: atoms_json(&row.approximation) })
            .collect(),
    }
}

pub fn limit_text(result: &LimitMeasureResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("atomic limit measure (n = {}):\n", result.n_used));
    for (v, mass) in result.measure.support() {
        out.push_str(&format!("  {:<24} {}\n", point_string(&v), rat_string(&mass)));
    }
    out.push_str(&format!("  leftover  {}\n", rat_string(result.measure.leftover())));
    out
}

#[derive(Serialize)]
pub struct EvidenceJson {
    pub index: usize,
    pub local_degree: usize,
    pub radius_exp: String,
    pub rho_increment: String,
}

#[derive(Serialize)]
pub struct WitnessJson {
    pub s: String,
    pub s_prime: String,
    pub level: usize,
    pub omega_n: QuantizedMeasureJson,
    pub omega: QuantizedMeasureJson,
    pub pullback_exact: bool,
    pub projection_exact: bool,
}

#[derive(Serialize)]
pub struct DeltaJson {
    pub schema: String,
    pub case: String,
    pub window: usize,
    pub horizon: usize,
    pub exceptional: Option<String>,
    pub nu: Option<String>,
    pub identically_ramified: Option<bool>,
    pub dagger_proper: Option<bool>,
    pub s_prime_bound: Option<String>,
    pub projection_atoms: Vec<AtomJson>,
    pub projection_leftover: String,
    pub evidence: Vec<EvidenceJson>,
    pub witness: Option<WitnessJson>,
}

pub fn evidence_json(report: &CaseReport) -> Vec<EvidenceJson> {
    report
        .evidence
        .iter()
        .map(|e| EvidenceJson {
            index: e.index,
            local_degree: e.local_degree,
            radius_exp: rat_string(&e.radius_exp),
            rho_increment: rat_string(&e.rho_increment),
        })
        .collect()
}

pub fn case_string(case: &CaseKind) -> String {
    match case {
        CaseKind::I { .. } => String::from("I"),
        CaseKind::II(_) => String::from("II"),
        CaseKind::Undetermined { .. } => String::from("undetermined"),
    }
}

pub fn witness_json(s: &Rat, s_prime: &Rat, level: usize, w: &DeltaWitness) -> WitnessJson {
    WitnessJson {
        s: rat_string(s),
        s_prime: rat_string(s_prime),
        level,
        omega_n: quantized_json(&w.omega_n),
        omega: quantized_json(&w.omega),
        pullback_exact: w.pullback_exact,
        projection_exact: w.projection_exact,
    }
}

#[derive(Serialize)]
pub struct AtomComparisonJson {
    pub point: String,
    pub re: f64,
    pub im: f64,
    pub is_infinity: bool,
    pub predicted: f64,
    pub empirical: f64,
    pub deviation: f64,
}

#[derive(Serialize)]
pub struct VerifyJson {
    pub schema: String,
    pub t0: String,
    pub samples: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub eps: f64,
    pub atoms: Vec<AtomComparisonJson>,
    pub unassigned: f64,
    pub predicted_leftover: f64,
    pub max_deviation: f64,
}

fn sphere_strings(p: &SpherePoint) -> (String, f64, f64, bool) {
    match p {
        SpherePoint::Infinity => (String::from("inf"), 0.0, 0.0, true),
        SpherePoint::Finite(z) => (format!("{}", z), z.re, z.im, false),
    }
}

pub fn verify_json(
    t0: Complex64,
    samples: usize,
    burn_in: usize,
    seed: u64,
    report: &ComparisonReport,
) -> VerifyJson {
    VerifyJson {
        schema: schema("verify"),
        t0: format!("{t0}"),
        samples,
        burn_in,
        seed,
        eps: report.eps,
        atoms: report
            .atoms
            .iter()
            .map(|a| {
                let (point, re, im, inf) = sphere_strings(&a.point);
                AtomComparisonJson {
                    point,
                    re,
                    im,
                    is_infinity: inf,
                    predicted: a.predicted,
                    empirical: a.empirical,
                    deviation: (a.empirical - a.predicted).abs(),
                }
            })
            .collect(),
        unassigned: report.unassigned,
        predicted_leftover: report.predicted_leftover,
        max_deviation: report.max_deviation,
    }
}

#[derive(Serialize)]
pub struct StudyRowJson {
    pub t0: String,
    pub abs_t0: f64,
    pub max_deviation: f64,
    pub unassigned: f64,
}

#[derive(Serialize)]
pub struct StudyJson {
    pub schema: String,
    pub samples: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub eps: f64,
    pub rows: Vec<StudyRowJson>,
}

pub fn study_json(
    samples: usize,
    burn_in: usize,
    seed: u64,
    eps: f64,
    rows: &[StudyRow],
) -> StudyJson {
    StudyJson {
        schema: schema("study"),
        samples,
        burn_in,
        seed,
        eps,
        rows: rows
            .iter()
            .map(|r| StudyRowJson {
                t0: format!("{}", r.t0),
                abs_t0: r.t0.norm(),
                max_deviation: r.report.max_deviation,
                unassigned: r.report.unassigned,
            })
            .collect(),
    }
}

pub fn samples_csv(samples: &[SpherePoint]) -> String {
    let mut out = String::from("re,im,is_infinity\n");
    for s in samples {
        match s {
            SpherePoint::Finite(z) => out.push_str(&format!("{},{},0\n", z.re, z.im)),
            SpherePoint::Infinity => out.push_str("0,0,1\n"),
        }
    }
    out
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialisation")
}
