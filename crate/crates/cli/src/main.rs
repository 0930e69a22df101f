use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use berklim::commands::{self, OutputFormat, RunOptions};
use berklim::family::{parse_complex, parse_family};
use berklim::{exit_code, CliError};
use berklim_core::limit::ExceptionalCandidate;
use berklim_core::puiseux::PuiseuxElem;
use berklim_core::scalar::parse_rat;

/// Exact degeneration limits for meromorphic families of rational maps,
/// with a Monte Carlo verifier for the complex side.
#[derive(Parser)]
#[command(name = "berklim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Family file (see README for the grammar)
    #[arg(long, value_name = "FILE")]
    map: String,
    /// Orbit horizon / iteration cap
    #[arg(long, value_name = "INT")]
    n_max: Option<usize>,
    /// Stabilisation tolerance, as an exact rational `p/q`
    #[arg(long, value_name = "RAT")]
    tol: Option<String>,
    /// Classification window
    #[arg(long, value_name = "INT")]
    window: Option<usize>,
    /// Base point for the equilibrium approximation (exact series expr)
    #[arg(long, value_name = "EXPR")]
    base: Option<String>,
    /// Comma-separated list of complex t values, e.g. `0.1,1e-2,1e-3`
    #[arg(long, value_name = "LIST")]
    t: Option<String>,
    /// Monte Carlo sample count
    #[arg(long, value_name = "INT")]
    samples: Option<usize>,
    /// Backward-orbit burn-in steps
    #[arg(long, value_name = "INT")]
    burn_in: Option<usize>,
    /// RNG seed
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Working precision (series terms past the leading exponent)
    #[arg(long, value_name = "INT")]
    precision: Option<u32>,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    out: OutFormat,
    /// Extra exceptional-point candidates (exact series exprs; repeatable)
    #[arg(long, value_name = "EXPR")]
    candidate: Vec<String>,
    /// Chordal radius for atom comparisons
    #[arg(long, value_name = "FLOAT")]
    eps: Option<f64>,
}

#[derive(clap::ValueEnum, Clone, Copy, PartialEq, Eq)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

#[derive(Args, Clone)]
struct DeltaArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Witness parameter s in [0, 1] (exact rational)
    #[arg(long, value_name = "RAT")]
    s: Option<String>,
    /// Witness parameter s' (exact rational)
    #[arg(long, value_name = "RAT")]
    s_prime: Option<String>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Reduction h~ = H·phi and the good-reduction test
    Reduce(CommonArgs),
    /// Orbit of the Gauss point with per-step degrees
    Orbit(CommonArgs),
    /// Directional and surplus local degrees along the orbit
    Degrees(CommonArgs),
    /// The atomic limit measure (projection of the equilibrium measure)
    Limit(CommonArgs),
    /// Classification and the closed-form limit-set description
    Delta(DeltaArgs),
    /// Monte Carlo comparison at a single t
    Verify(CommonArgs),
    /// Monte Carlo comparison across a list of t values
    Study(CommonArgs),
}

fn build_options(args: &CommonArgs) -> Result<(RunOptions, Vec<&'static str>), CliError> {
    let mut opts = RunOptions::default();
    let mut overridden: Vec<&'static str> = Vec::new();
    if let Some(v) = args.n_max {
        opts.n_max = v;
        overridden.push("n_max");
    }
    if let Some(v) = args.window {
        opts.window = v;
        overridden.push("window");
    }
    if let Some(v) = &args.tol {
        opts.tol = parse_rat(v).map_err(CliError::Core)?;
        overridden.push("tol");
    }
    if let Some(v) = &args.base {
        opts.base = PuiseuxElem::parse(v).map_err(CliError::Core)?;
        overridden.push("base");
    }
    if let Some(v) = &args.t {
        let mut list = Vec::new();
        for part in v.split(',') {
            list.push(parse_complex(part).map_err(CliError::Io)?);
        }
        opts.t_list = list;
        overridden.push("t");
    }
    if let Some(v) = args.samples {
        opts.samples = v;
        overridden.push("samples");
    }
    if let Some(v) = args.burn_in {
        opts.burn_in = v;
        overridden.push("burn_in");
    }
    if let Some(v) = args.seed {
        opts.seed = v;
        overridden.push("seed");
    }
    if let Some(v) = args.precision {
        berklim_core::set_working_precision(v);
        overridden.push("precision");
    }
    if let Some(v) = args.eps {
        opts.eps = v;
    }
    opts.out = match args.out {
        OutFormat::Json => OutputFormat::Json,
        OutFormat::Csv => OutputFormat::Csv,
        OutFormat::Text => OutputFormat::Text,
    };
    for c in &args.candidate {
        let cand = if c.trim() == "inf" {
            ExceptionalCandidate::Infinity
        } else {
            ExceptionalCandidate::Finite(PuiseuxElem::parse(c).map_err(CliError::Core)?)
        };
        opts.candidates.push(cand);
    }
    Ok((opts, overridden))
}

fn run(cli: Cli) -> Result<String, CliError> {
    let (common, s_params) = match &cli.command {
        Command::Delta(d) => (&d.common, Some((d.s.clone(), d.s_prime.clone()))),
        Command::Reduce(c)
        | Command::Orbit(c)
        | Command::Degrees(c)
        | Command::Limit(c)
        | Command::Verify(c)
        | Command::Study(c) => (c, None),
    };
    let text = std::fs::read_to_string(&common.map)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", common.map)))?;
    let spec = parse_family(&text)?;
    let (mut opts, overridden) = build_options(common)?;
    commands::merge_file_options(&mut opts, &spec, &overridden);
    if let Some((s, sp)) = s_params {
        if let Some(s) = s {
            opts.s = Some(parse_rat(&s).map_err(CliError::Core)?);
        }
        if let Some(sp) = sp {
            opts.s_prime = Some(parse_rat(&sp).map_err(CliError::Core)?);
        }
    }
    let family = spec.to_family().map_err(CliError::Core)?;
    match cli.command {
        Command::Reduce(_) => commands::run_reduce(&family, &opts),
        Command::Orbit(_) => commands::run_orbit(&family, &opts),
        Command::Degrees(_) => commands::run_degrees(&family, &opts),
        Command::Limit(_) => commands::run_limit(&family, &opts),
        Command::Delta(_) => commands::run_delta(&family, &opts),
        Command::Verify(_) => commands::run_verify(&family, &opts),
        Command::Study(_) => commands::run_study(&family, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
