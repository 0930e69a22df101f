//! Error taxonomy shared by every module of the exact engine.

use alloc::string::String;
use core::fmt;

/// Which branch of the admissibility condition a pair was checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdmissibilityBranch {
    /// `Gamma_f = Gamma_G`: the pullback of `mu_E` under the reduced
    /// rescaling must equal `mu_C`.
    GammaEqual,
    /// `Gamma_f != Gamma_G`: `mu_C({h_A}) + mu_E({a_A}) >= 1`.
    GammaDistinct,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoreError {
    /// Division by (exact) zero.
    DivisionByZero,
    /// A truncated series does not determine the requested datum.
    InsufficientPrecision(String),
    /// Reduction of an element with negative valuation.
    NotIntegral,
    /// An operation would produce a Berkovich point of type III or IV.
    UnsupportedPointType,
    /// A tangent direction was requested from a point to itself.
    SamePoint,
    /// The homogeneous resultant vanishes: the family degenerates for t != 0.
    InvalidFamily(String),
    /// A digit cap or the working precision was exhausted mid-computation.
    PrecisionExceeded(String),
    /// A cell does not belong to the partition it was used with.
    CellMismatch(String),
    /// Projection requested onto a partition that is not a coarsening.
    NotNested,
    /// An admissibility branch failed for a measure pair.
    NotAdmissible {
        branch: AdmissibilityBranch,
        detail: String,
    },
    /// The `s'` parameter violates the witness bound.
    BoundViolated(String),
    /// The family is not in the established case II.
    NotCaseII,
    /// Orbit degrees did not stabilise within the window.
    NotStationary(String),
    /// `f^{-1}(S_G) = {S_G}`: the degeneration hypothesis fails.
    HypothesisViolated,
    /// Classification could not decide a case within the window.
    Undetermined(String),
    /// The requested base point is (or maps into) an exceptional point.
    ExceptionalBase(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::DivisionByZero => write!(f, "division by zero"),
            CoreError::InsufficientPrecision(d) => write!(f, "insufficient precision: {d}"),
            CoreError::NotIntegral => write!(f, "element has negative valuation"),
            CoreError::UnsupportedPointType => {
                write!(f, "operation would leave the type-II locus")
            }
            CoreError::SamePoint => write!(f, "direction from a point to itself"),
            CoreError::InvalidFamily(d) => write!(f, "invalid family: {d}"),
            CoreError::PrecisionExceeded(d) => write!(f, "precision exceeded: {d}"),
            CoreError::CellMismatch(d) => write!(f, "cell mismatch: {d}"),
            CoreError::NotNested => write!(f, "partitions are not nested"),
            CoreError::NotAdmissible { branch, detail } => {
                let b = match branch {
                    AdmissibilityBranch::GammaEqual => "Gamma_f = Gamma_G",
                    AdmissibilityBranch::GammaDistinct => "Gamma_f != Gamma_G",
                };
                write!(f, "inadmissible pair ({b} branch): {detail}")
            }
            CoreError::BoundViolated(d) => write!(f, "witness bound violated: {d}"),
            CoreError::NotCaseII => write!(f, "family is not in case II"),
            CoreError::NotStationary(d) => write!(f, "degrees did not stabilise: {d}"),
            CoreError::HypothesisViolated => {
                write!(f, "f^-1(S_G) = {{S_G}}: hypothesis of the limit theorem fails")
            }
            CoreError::Undetermined(d) => write!(f, "classification undetermined: {d}"),
            CoreError::ExceptionalBase(d) => write!(f, "base point is exceptional: {d}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, CoreError>;
