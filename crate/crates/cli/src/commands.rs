//! The seven commands: reduce, orbit, degrees, limit, delta, verify, study.
//! Each takes the parsed family plus the effective run options and returns
//! the rendered output; callers decide where it goes.

use num_complex::Complex64;

use berklim_core::dynamics::{orbit_of_gauss, GaussOrbit};
use berklim_core::geometry::ProjPoint;
use berklim_core::limit::{
    classify_case, delta_f_description, limit_measure, CaseKind, ExceptionalCandidate,
};
use berklim_core::measures::{delta_witness, ProjectedEquilibrium};
use berklim_core::puiseux::PuiseuxElem;
use berklim_core::reduction::{reduce_map, RationalMapFamily};
use berklim_core::scalar::{rat_string, Rat};
use berklim_core::CoreError;

use crate::family::FamilySpec;
use crate::report::{self, to_json_string};
use crate::verifier::{
    backward_orbit_measure, compare_measures, convergence_study, predicted_atoms, specialize,
};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Effective run options after merging file options and flags.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub n_max: usize,
    pub window: usize,
    pub tol: Rat,
    pub base: PuiseuxElem,
    pub t_list: Vec<Complex64>,
    pub samples: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub eps: f64,
    pub out: OutputFormat,
    pub s: Option<Rat>,
    pub s_prime: Option<Rat>,
    pub candidates: Vec<ExceptionalCandidate>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            n_max: 12,
            window: 6,
            tol: Rat::new(1.into(), 1_000_000.into()),
            base: PuiseuxElem::from_i64(2),
            t_list: vec![Complex64::new(1e-3, 0.0)],
            samples: 50_000,
            burn_in: 24,
            seed: 0xBE27,
            eps: 0.05,
            out: OutputFormat::Text,
            s: None,
            s_prime: None,
            candidates: Vec::new(),
        }
    }
}

/// Overlay file-level options (flags already won in the caller).
pub fn merge_file_options(opts: &mut RunOptions, spec: &FamilySpec, overridden: &[&str]) {
    let o = &spec.options;
    let free = |k: &str| !overridden.contains(&k);
    if let (Some(v), true) = (o.window, free("window")) {
        opts.window = v;
    }
    if let (Some(v), true) = (o.n_max, free("n_max")) {
        opts.n_max = v;
    }
    if let (Some(v), true) = (o.tol.clone(), free("tol")) {
        opts.tol = v;
    }
    if let (Some(v), true) = (o.base.clone(), free("base")) {
        opts.base = v;
    }
    if let (Some(v), true) = (o.seed, free("seed")) {
        opts.seed = v;
    }
    if let (Some(v), true) = (o.samples, free("samples")) {
        opts.samples = v;
    }
    if let (Some(v), true) = (o.burn_in, free("burn_in")) {
        opts.burn_in = v;
    }
    if let (Some(v), true) = (o.t_list.clone(), free("t")) {
        opts.t_list = v;
    }
    if let (Some(v), true) = (o.precision, free("precision")) {
        berklim_core::set_working_precision(v);
    }
}

fn base_point(opts: &RunOptions) -> ProjPoint {
    ProjPoint::finite(opts.base.clone())
}

pub fn run_reduce(family: &RationalMapFamily, opts: &RunOptions) -> Result<String, CliError> {
    let r = reduce_map(family)?;
    Ok(match opts.out {
        OutputFormat::Json => to_json_string(&report::reduce_json(family, &r)),
        _ => {
            let status = if r.good_reduction() {
                "good reduction: f^-1(S_G) = {S_G}"
            } else {
                "degenerate reduction: f^-1(S_G) != {S_G}"
            };
            format!("{}\n{status}\n", r.report_string())
        }
    })
}

pub fn run_orbit(family: &RationalMapFamily, opts: &RunOptions) -> Result<String, CliError> {
    let orbit = orbit_of_gauss(family, opts.n_max)?;
    Ok(match opts.out {
        OutputFormat::Json => to_json_string(&report::orbit_json(&orbit)),
        _ => report::orbit_text(&orbit),
    })
}

pub fn run_degrees(family: &RationalMapFamily, opts: &RunOptions) -> Result<String, CliError> {
    let orbit = orbit_of_gauss(family, opts.n_max)?;
    let steps = degrees_data(&orbit)?;
    Ok(match opts.out {
        OutputFormat::Json => {
            to_json_string(&report::DegreesJson { schema: report::schema("degrees"), steps })
        }
        _ => {
            let mut out = String::new();
            for s in &steps {
                out.push_str(&format!("step {}: deg_{{S_j}}(f) = {}\n", s.index, s.local_degree));
                for d in &s.divisor {
                    out.push_str(&format!("  [H = 0] at {:<20} ord {}\n", d.cell, d.mass));
                }
                for row in &s.directions {
                    out.push_str(&format!(
                        "  dir {:<20} m = {:<4} s = {:<4} push -> {}\n",
                        row.label, row.m, row.s, row.pushforward
                    ));
                }
            }
            out
        }
    })
}

fn degrees_data(orbit: &GaussOrbit) -> Result<Vec<report::DegreesStepJson>, CliError> {
    use berklim_core::algebraic::ResidueValue;
    let mut out = Vec::new();
    for step in orbit.steps() {
        let r = &step.reduction;
        let divisor = r
            .divisor_support()
            .iter()
            .map(|(v, m)| report::CellMassJson {
                cell: report::point_string(v),
                mass: format!("{m}"),
            })
            .collect();
        // directional rows: divisor labels plus the two coordinate
        // directions 0 and infinity
        let mut labels: Vec<ResidueValue> =
            vec![ResidueValue::zero(), ResidueValue::Infinity];
        for (v, _) in r.divisor_support() {
            if !labels.contains(v) {
                labels.push(v.clone());
            }
        }
        let mut directions = Vec::new();
        for v in labels {
            let m = r.phi().local_degree(&v)?;
            let s = r.divisor_order_at(&v)?;
            let push = r.phi().eval_value(&v)?;
            directions.push(report::DirectionRowJson {
                label: report::point_string(&v),
                m: format!("{m}"),
                s: format!("{s}"),
                pushforward: report::point_string(&push),
            });
        }
        out.push(report::DegreesStepJson {
            index: step.index,
            local_degree: step.local_degree,
            divisor,
            directions,
        });
    }
    Ok(out)
}

pub fn run_limit(family: &RationalMapFamily, opts: &RunOptions) -> Result<String, CliError> {
    let result = limit_measure(family, &base_point(opts), opts.n_max, &opts.tol)?;
    Ok(match opts.out {
        OutputFormat::Json => to_json_string(&report::limit_json(&result)),
        OutputFormat::Csv => report::atoms_csv(&result.measure),
        OutputFormat::Text => report::limit_text(&result),
    })
}

pub fn run_delta(family: &RationalMapFamily, opts: &RunOptions) -> Result<String, CliError> {
    let desc = delta_f_description(
        family,
        opts.window,
        &opts.candidates,
        &base_point(opts),
        opts.n_max,
        &opts.tol,
    )?;
    let mut witness = None;
    let mut text_extra = String::new();
    if let (Some(s), Some(s_prime)) = (&opts.s, &opts.s_prime) {
        let c2 = desc.case_two.as_ref().ok_or(CliError::Core(CoreError::NotCaseII))?;
        let orbit = classify_case(family, opts.window, &opts.candidates)?.orbit;
        let level = opts.n_max.clamp(2, 8);
        let w = delta_witness(&orbit, &c2.equilibrium, s, s_prime, level)?;
        text_extra = format!(
            "witness at n = {level}: pullback {}  projection {}\n",
            if w.pullback_exact { "exact" } else { "FAILED" },
            if w.projection_exact { "exact" } else { "FAILED" },
        );
        witness = Some(report::witness_json(s, s_prime, level, &w));
    }
    let (exceptional, nu, identically) = match &desc.report.case {
        CaseKind::II(data) => (
            Some(data.exceptional.display()),
            Some(rat_string(&data.nu)),
            Some(data.identically),
        ),
        _ => (None, None, None),
    };
    let bound = desc.case_two.as_ref().map(|c2| {
        format!("s' <= min{{s*{nu}, (1-s)*(1-{nu})}}", nu = rat_string(&c2.nu))
    });
    let json = report::DeltaJson {
        schema: report::schema("delta"),
        case: report::case_string(&desc.report.case),
        window: desc.report.window,
        horizon: desc.report.horizon,
        exceptional,
        nu,
        identically_ramified: identically,
        dagger_proper: desc.case_two.as_ref().map(|c| c.dagger_proper),
        s_prime_bound: bound,
        projection_atoms: report::atoms_json(&desc.projection),
        projection_leftover: rat_string(desc.projection.leftover()),
        evidence: report::evidence_json(&desc.report),
        witness,
    };
    Ok(match opts.out {
        OutputFormat::Json => to_json_string(&json),
        _ => {
            let mut out = String::new();
            match &desc.report.case {
                CaseKind::I { certificate } => {
                    out.push_str("case I: the limit set is the single projected measure\n");
                    out.push_str(&format!(
                        "  surplus certificate: deg_{{S_G}}(f^N)/d^N = {}\n",
                        rat_string(certificate)
                    ));
                }
                CaseKind::II(data) => {
                    out.push_str(&format!(
                        "case II: exceptional point a = {}\n",
                        data.exceptional.display()
                    ));
                    out.push_str(&format!(
                        "  nu = nu_f(U_(S_G -> a)) = {}\n",
                        rat_string(&data.nu)
                    ));
                    out.push_str(&format!(
                        "  maximally ramified for all n >= 0: {}\n",
                        data.identically
                    ));
                    out.push_str(&format!(
                        "  limit set: omega(U_v) = s*nu_f(U_v) off a, omega({{S_G}}) = s', \
                         0 <= s <= 1, 0 <= s' <= min{{s*nu, (1-s)(1-nu)}}\n"
                    ));
                    out.push_str(&format!(
                        "  dagger part proper subset: {}\n",
                        data.nu > Rat::new(0.into(), 1.into())
                    ));
                }
                CaseKind::Undetermined { .. } => {}
            }
            out.push_str("projected equilibrium measure:\n");
            for (v, mass) in desc.projection.support() {
                out.push_str(&format!(
                    "  {:<24} {}\n",
                    report::point_string(&v),
                    rat_string(&mass)
                ));
            }
            out.push_str(&text_extra);
            out
        }
    })
}

pub fn run_verify(family: &RationalMapFamily, opts: &RunOptions) -> Result<String, CliError> {
    let t0 = *opts.t_list.first().ok_or_else(|| {
        CliError::Io(String::from("verify needs at least one t value"))
    })?;
    let result = limit_measure(family, &base_point(opts), opts.n_max, &opts.tol)?;
    let atoms = predicted_atoms(&result.measure);
    let leftover = rat_to_f64(result.measure.leftover());
    let g = specialize(family, t0)?;
    let emp = backward_orbit_measure(&g, opts.samples, opts.burn_in, opts.seed)?;
    let cmp = compare_measures(&emp, &atoms, leftover, opts.eps)?;
    Ok(match opts.out {
        OutputFormat::Json => to_json_string(&report::verify_json(
            t0,
            opts.samples,
            opts.burn_in,
            opts.seed,
            &cmp,
        )),
        OutputFormat::Csv => report::samples_csv(&emp.samples),
        OutputFormat::Text => {
            let mut out = format!(
                "t0 = {t0}, {} samples, burn-in {}, seed {}\n",
                opts.samples, opts.burn_in, opts.seed
            );
            for a in &cmp.atoms {
                let p = match a.point {
                    crate::verifier::SpherePoint::Infinity => String::from("inf"),
                    crate::verifier::SpherePoint::Finite(z) => format!("{z}"),
                };
                out.push_str(&format!(
                    "  atom {:<22} predicted {:.6}  empirical {:.6}\n",
                    p, a.predicted, a.empirical
                ));
            }
            out.push_str(&format!(
                "  unassigned {:.6} (predicted leftover {:.6})\n  max deviation {:.6}\n",
                cmp.unassigned, cmp.predicted_leftover, cmp.max_deviation
            ));
            out
        }
    })
}

pub fn run_study(family: &RationalMapFamily, opts: &RunOptions) -> Result<String, CliError> {
    let result = limit_measure(family, &base_point(opts), opts.n_max, &opts.tol)?;
    let atoms = predicted_atoms(&result.measure);
    let leftover = rat_to_f64(result.measure.leftover());
    let rows = convergence_study(
        family,
        &opts.t_list,
        &atoms,
        leftover,
        opts.samples,
        opts.burn_in,
        opts.seed,
        opts.eps,
    )?;
    Ok(match opts.out {
        OutputFormat::Json => to_json_string(&report::study_json(
            opts.samples,
            opts.burn_in,
            opts.seed,
            opts.eps,
            &rows,
        )),
        _ => {
            let mut out = String::from("|t0|        max deviation   unassigned\n");
            for r in &rows {
                out.push_str(&format!(
                    "{:<10.3e}  {:<14.6}  {:<.6}\n",
                    r.t0.norm(),
                    r.report.max_deviation,
                    r.report.unassigned
                ));
            }
            out
        }
    })
}

fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Build the projected-equilibrium data for delta witnesses; exposed for
/// tests that drive the witness machinery directly.
pub fn equilibrium_from_limit(
    family: &RationalMapFamily,
    opts: &RunOptions,
) -> Result<(GaussOrbit, ProjectedEquilibrium), CliError> {
    let analysis = classify_case(family, opts.window, &opts.candidates)?;
    let data = match &analysis.report.case {
        CaseKind::II(data) => data.clone(),
        CaseKind::I { .. } => return Err(CliError::Core(CoreError::NotCaseII)),
        CaseKind::Undetermined { reason } => {
            return Err(CliError::Core(CoreError::Undetermined(reason.clone())))
        }
    };
    let lm = limit_measure(family, &base_point(opts), opts.n_max, &opts.tol)?;
    let eq = berklim_core::limit::projected_equilibrium(&lm.measure, &data)?;
    Ok((analysis.orbit, eq))
}
