//! Conservative Bayesian reliability claims from operational testing counts.
//!
//! Given only partial prior knowledge about a per-mile failure probability
//! (a floor it cannot beat, an engineering goal and the confidence that the
//! goal was met) the routines here compute the lowest posterior confidence
//! any consistent prior can give, and invert it for miles or bounds. A
//! two-system variant transfers evidence from an old environment to a new
//! one. Classical and conjugate-prior baselines and brute-force oracles are
//! included for comparison and verification.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bivariate;
pub mod error;
pub mod fallacy;
pub mod numeric;
pub mod oracle;
pub mod posterior;
pub mod types;
pub mod univariate;

pub use error::{CbiError, Result};
pub use posterior::{
    posterior_confidence_bivariate, posterior_confidence_discrete,
    posterior_confidence_partitioned, posterior_mean_discrete,
};
pub use types::{
    validate_partial_prior, AssessmentResult, Atom, BivariateAtom, BivariateDiscretePrior,
    BivariateKnowledge, Claim, DiscretePrior, Observation, PartialPrior, Quantity, Region,
    RegionMasses, Witness,
};
