//! Exact posterior evaluation for finite discrete priors. Every other module
//! reduces its answers to these kernels.

use crate::error::{CbiError, Result};
use crate::numeric::{ln_mass, log_likelihood, log_sum_exp, share};
use crate::types::{Atom, BivariateDiscretePrior, DiscretePrior, Observation};

/// Posterior `Pr(X <= p | k failures in n miles)` under a discrete prior.
pub fn posterior_confidence_discrete(
    prior: &DiscretePrior,
    obs: Observation,
    p: f64,
) -> Result<f64> {
    posterior_confidence_partitioned(prior, obs, |_, atom| atom.location <= p)
}

/// Posterior mass of the atoms selected by `below`, evaluated in log space.
///
/// Used directly when an atom sits exactly on the claim boundary and must be
/// attributed to the exceedance side (the worst-case witness places its upper
/// atom at the limit point `p`).
pub fn posterior_confidence_partitioned<F>(
    prior: &DiscretePrior,
    obs: Observation,
    below: F,
) -> Result<f64>
where
    F: Fn(usize, &Atom) -> bool,
{
    let obs = obs.validate()?;
    let mut inside = Vec::with_capacity(prior.atoms().len());
    let mut outside = Vec::with_capacity(prior.atoms().len());
    for (i, atom) in prior.atoms().iter().enumerate() {
        let w = ln_mass(atom.mass) + log_likelihood(atom.location, obs.k, obs.n);
        if below(i, atom) {
            inside.push(w);
        } else {
            outside.push(w);
        }
    }
    let (num, rest) = (log_sum_exp(&inside), log_sum_exp(&outside));
    if num == f64::NEG_INFINITY && rest == f64::NEG_INFINITY {
        return Err(CbiError::DegenerateLikelihood);
    }
    Ok(share(num, rest))
}

/// Posterior mean of X under a discrete prior.
pub fn posterior_mean_discrete(prior: &DiscretePrior, obs: Observation) -> Result<f64> {
    let obs = obs.validate()?;
    let weights: Vec<f64> = prior
        .atoms()
        .iter()
        .map(|a| ln_mass(a.mass) + log_likelihood(a.location, obs.k, obs.n))
        .collect();
    let total = log_sum_exp(&weights);
    if total == f64::NEG_INFINITY {
        return Err(CbiError::DegenerateLikelihood);
    }
    Ok(prior
        .atoms()
        .iter()
        .zip(&weights)
        .map(|(a, w)| a.location * (w - total).exp())
        .sum())
}

/// Posterior `Pr(Y <= p_B | n_a failure-free miles of A, n_b of B)` under a
/// region-labelled joint prior. Atoms in regions 4–7 form the numerator.
pub fn posterior_confidence_bivariate(
    prior: &BivariateDiscretePrior,
    n_a: f64,
    n_b: f64,
) -> Result<f64> {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for a in prior.atoms() {
        let w = ln_mass(a.mass) + log_likelihood(a.x, 0, n_a) + log_likelihood(a.y, 0, n_b);
        if a.region.meets_bound() {
            inside.push(w);
        } else {
            outside.push(w);
        }
    }
    let (num, rest) = (log_sum_exp(&inside), log_sum_exp(&outside));
    if num == f64::NEG_INFINITY && rest == f64::NEG_INFINITY {
        return Err(CbiError::DegenerateLikelihood);
    }
    Ok(share(num, rest))
}
