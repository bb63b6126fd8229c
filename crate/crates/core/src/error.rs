use thiserror::Error;

/// Errors reported by the assessment routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CbiError {
    /// An input violates one of its invariants.
    #[error("invalid {field}: {constraint}")]
    InvalidParameter {
        field: &'static str,
        constraint: String,
    },

    /// The requested bound is not above the engineering goal, so no amount of
    /// testing can support it under the stated prior knowledge.
    #[error("infeasible claim: bound {bound:e} does not exceed the engineering goal {epsilon:e}")]
    InfeasibleClaim { bound: f64, epsilon: f64 },

    /// Cross-confidence too weak: with phi <= 1 - theta the worst-case
    /// confidence is identically zero.
    #[error("vacuous prior knowledge: phi = {phi} <= 1 - theta = {one_minus_theta}; infimum confidence is 0")]
    Vacuous { phi: f64, one_minus_theta: f64 },

    /// Every atom of the prior has zero likelihood for the observation.
    #[error("degenerate likelihood: no atom of the prior can produce the observation")]
    DegenerateLikelihood,

    /// A solve-for routine found no root in its admissible interval.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// Inputs outside the regime the closed forms were derived for.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// Special-function argument outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
}

impl CbiError {
    pub(crate) fn invalid(field: &'static str, constraint: impl Into<String>) -> Self {
        CbiError::InvalidParameter {
            field,
            constraint: constraint.into(),
        }
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            CbiError::InvalidParameter { .. } => "invalid_parameter",
            CbiError::InfeasibleClaim { .. } => "infeasible_claim",
            CbiError::Vacuous { .. } => "vacuous",
            CbiError::DegenerateLikelihood => "degenerate_likelihood",
            CbiError::NoSolution(_) => "no_solution",
            CbiError::UnsupportedRegime(_) => "unsupported_regime",
            CbiError::Domain(_) => "domain",
        }
    }
}

pub type Result<T> = std::result::Result<T, CbiError>;
