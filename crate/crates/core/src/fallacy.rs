//! What goes wrong when the worst-case prior for one quantity is reused for
//! another. The prior minimizing confidence in a bound and the prior
//! maximizing the expected failure rate differ; swapping them gives
//! optimistic answers for both.
//!
//! Failure-free evidence only.

use serde::{Deserialize, Serialize};

use crate::error::{CbiError, Result};
use crate::numeric::{golden_max, ln_mass, log_likelihood, log_space, share};
use crate::posterior::posterior_mean_discrete;
use crate::types::{
    validate_bound, validate_miles, Atom, DiscretePrior, Observation, PartialPrior,
};

const SCAN_POINTS: usize = 1000;

/// The prior maximizing the posterior mean failure rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationWorstCase {
    pub expectation: f64,
    /// Location of the free mass `1 - theta`, in `(eps, 1]`.
    pub q: f64,
    /// `{(eps, theta), (q, 1 - theta)}`.
    pub witness: DiscretePrior,
}

/// Posterior weight of an atom at `q` (mass `1 - theta`) against one at
/// `eps` (mass `theta`) after `n` failure-free miles.
fn upper_weight(pp: &PartialPrior, n: f64, q: f64) -> f64 {
    share(
        ln_mass(1.0 - pp.theta) + log_likelihood(q, 0, n),
        ln_mass(pp.theta) + log_likelihood(pp.epsilon, 0, n),
    )
}

/// Posterior mean under `{(eps, theta), (q, 1 - theta)}`.
fn mean_with_upper_atom(pp: &PartialPrior, n: f64, q: f64) -> f64 {
    let w = upper_weight(pp, n, q);
    pp.epsilon * (1.0 - w) + q * w
}

fn two_point(pp: &PartialPrior, upper: f64) -> Result<DiscretePrior> {
    let mut atoms = vec![Atom {
        location: pp.epsilon,
        mass: pp.theta,
    }];
    if pp.theta < 1.0 {
        atoms.push(Atom {
            location: upper,
            mass: 1.0 - pp.theta,
        });
    }
    DiscretePrior::new(atoms)
}

/// Largest posterior mean failure rate after `n` failure-free miles over
/// all priors satisfying `pp`. The maximizer keeps `theta` at `eps` and puts
/// the rest at a point `q` found by a log-spaced scan of `(eps, 1]` refined
/// by golden-section search.
pub fn worst_case_expected_rate(pp: &PartialPrior, n: f64) -> Result<ExpectationWorstCase> {
    pp.validate()?;
    validate_miles("n", n)?;
    let f = |q: f64| mean_with_upper_atom(pp, n, q);
    let start = pp.epsilon * (1.0 + 1e-9);
    let grid = log_space(start, 1.0, SCAN_POINTS);
    let best = grid.iter().enumerate().map(|(i, &q)| (i, f(q))).fold(
        (0, f64::NEG_INFINITY),
        |acc, cur| if cur.1 > acc.1 { cur } else { acc },
    );
    let (q, expectation) = if best.0 == grid.len() - 1 {
        (1.0, best.1)
    } else {
        let lo = grid[best.0.saturating_sub(1)];
        let hi = grid[best.0 + 1];
        let (q, v) = golden_max(f, lo, hi, 1e-13);
        if v >= best.1 {
            (q, v)
        } else {
            (grid[best.0], best.1)
        }
    };
    Ok(ExpectationWorstCase {
        expectation,
        q,
        witness: two_point(pp, q)?,
    })
}

fn check_claim(pp: &PartialPrior, n: f64, p: f64) -> Result<()> {
    pp.validate()?;
    validate_miles("n", n)?;
    validate_bound(p)?;
    if p <= pp.epsilon {
        return Err(CbiError::InfeasibleClaim {
            bound: p,
            epsilon: pp.epsilon,
        });
    }
    Ok(())
}

/// Confidence in `X <= p` an assessor would report after `n` failure-free
/// miles if they used the expectation-maximizing prior instead of the
/// confidence-minimizing one. An upper atom exactly at `p` counts as
/// exceeding it, as in the confidence worst case.
pub fn misused_confidence(pp: &PartialPrior, n: f64, p: f64) -> Result<f64> {
    check_claim(pp, n, p)?;
    let q = worst_case_expected_rate(pp, n)?.q;
    if q < p {
        return Ok(1.0);
    }
    Ok(1.0 - upper_weight(pp, n, q))
}

/// Posterior mean failure rate under the confidence-minimizing prior
/// `{(eps, theta), (p, 1 - theta)}` after `n` failure-free miles.
pub fn misused_expectation(pp: &PartialPrior, n: f64, p: f64) -> Result<f64> {
    check_claim(pp, n, p)?;
    posterior_mean_discrete(&two_point(pp, p)?, Observation::failure_free(n))
}
