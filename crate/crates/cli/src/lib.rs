//! Command implementations, file formats, and the Monte Carlo verifier on
//! top of the exact engine.

pub mod commands;
pub mod family;
pub mod report;
pub mod verifier;

use family::FamilyError;
use verifier::VerifierError;

/// Top-level error with a stable exit-code taxonomy: mathematical refusals
/// are distinguished from computational failures so callers can script over
/// the codes.
#[derive(Debug)]
pub enum CliError {
    Family(FamilyError),
    Core(berklim_core::CoreError),
    Verifier(VerifierError),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Family(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Verifier(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        CliError::Family(e)
    }
}

impl From<berklim_core::CoreError> for CliError {
    fn from(e: berklim_core::CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<VerifierError> for CliError {
    fn from(e: VerifierError) -> Self {
        CliError::Verifier(e)
    }
}

/// Exit codes: 0 ok; 2 parse/usage; 3 invalid family; 4 hypothesis
/// violated; 5 undetermined; 6 other mathematical refusals; 7 precision
/// exhaustion; 8 numeric failures; 1 IO/internal.
pub fn exit_code(e: &CliError) -> i32 {
    use berklim_core::CoreError as C;
    match e {
        CliError::Family(_) => 2,
        CliError::Io(_) => 1,
        CliError::Core(c) => match c {
            C::InvalidFamily(_) => 3,
            C::HypothesisViolated => 4,
            C::Undetermined(_) => 5,
            C::NotCaseII
            | C::NotStationary(_)
            | C::NotAdmissible { .. }
            | C::BoundViolated(_)
            | C::ExceptionalBase(_)
            | C::CellMismatch(_)
            | C::SamePoint
            | C::NotNested
            | C::UnsupportedPointType => 6,
            C::InsufficientPrecision(_)
            | C::PrecisionExceeded(_)
            | C::NotIntegral
            | C::DivisionByZero => 7,
        },
        CliError::Verifier(v) => match v {
            VerifierError::AtomsTooClose(_) => 6,
            _ => 8,
        },
    }
}
