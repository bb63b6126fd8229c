//! Worst-case posterior confidence for a single system given partial prior
//! knowledge, and the inversions built on it: miles needed for a claim, the
//! best bound supported by given evidence, and the miles needed to make up
//! for a newly observed failure.

use serde::{Deserialize, Serialize};

use crate::error::{CbiError, Result};
use crate::numeric::{
    bisect_increasing, expand_upper, ln_mass, log_likelihood, share, SOLVE_REL_TOL,
};
use crate::types::{
    validate_bound, validate_confidence, validate_miles, Atom, DiscretePrior, Observation,
    PartialPrior,
};

/// Which side of the floor, goal and bound the observed rate `k/n` falls on.
/// Ties go to the earlier variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// `k/n <= p_l`: likelihood falls across `[p_l, eps]`, lower atom at `eps`.
    RateUpToFloor,
    /// `p_l < k/n <= eps` and the likelihood at `p_l` is at least that at `eps`.
    RateUpToGoalFloorLikelier,
    /// `p_l < k/n <= eps` and the likelihood at `eps` is larger.
    RateUpToGoalGoalLikelier,
    /// `eps < k/n <= p`.
    RateUpToBound,
    /// `p < k/n`: the upper atom moves to the likelihood peak `k/n`.
    RateAboveBound,
}

/// Atom locations of the two-point worst-case prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseCase {
    pub tag: CaseTag,
    /// Carries mass `theta`; one of `p_l`, `eps`.
    pub x1: f64,
    /// Carries mass `1 - theta`; one of `p`, `k/n`. When it equals `p` it
    /// stands for the limit from above and counts as exceeding the bound.
    pub x3: f64,
}

/// The prior attaining (or approaching) the infimum confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCasePrior {
    pub prior: DiscretePrior,
    /// `None` for the degenerate witness returned when `p <= eps`.
    pub case: Option<WorstCaseCase>,
}

impl WorstCasePrior {
    pub fn is_degenerate(&self) -> bool {
        self.case.is_none()
    }
}

/// Selects the worst-case atom locations for `p > eps`.
pub fn worst_case_case(pp: &PartialPrior, obs: Observation, p: f64) -> WorstCaseCase {
    let rate = obs.rate();
    let (p_l, eps) = (pp.p_l, pp.epsilon);
    let (tag, x1) = if rate <= p_l {
        (CaseTag::RateUpToFloor, eps)
    } else if rate <= eps {
        if log_likelihood(p_l, obs.k, obs.n) >= log_likelihood(eps, obs.k, obs.n) {
            (CaseTag::RateUpToGoalFloorLikelier, eps)
        } else {
            (CaseTag::RateUpToGoalGoalLikelier, p_l)
        }
    } else if rate <= p {
        (CaseTag::RateUpToBound, p_l)
    } else {
        (CaseTag::RateAboveBound, p_l)
    };
    let x3 = if rate > p { rate } else { p };
    WorstCaseCase { tag, x1, x3 }
}

fn check_inputs(pp: &PartialPrior, obs: Observation, p: f64) -> Result<Observation> {
    pp.validate()?;
    validate_bound(p)?;
    obs.validate()
}

/// The two-point prior minimizing `Pr(X <= p | obs)` subject to `pp`.
///
/// For `p <= eps` no prior attains the infimum of 0 and a degenerate witness
/// `{(eps, theta), (1, 1 - theta)}` is returned; it puts no mass at or below
/// `p` when `p < eps`.
pub fn worst_case_prior(pp: &PartialPrior, obs: Observation, p: f64) -> Result<WorstCasePrior> {
    let obs = check_inputs(pp, obs, p)?;
    let (lower, upper, case) = if p <= pp.epsilon {
        (pp.epsilon, 1.0, None)
    } else {
        let case = worst_case_case(pp, obs, p);
        (case.x1, case.x3, Some(case))
    };
    let mut atoms = vec![Atom {
        location: lower,
        mass: pp.theta,
    }];
    if pp.theta < 1.0 {
        atoms.push(Atom {
            location: upper,
            mass: 1.0 - pp.theta,
        });
    }
    Ok(WorstCasePrior {
        prior: DiscretePrior::new(atoms)?,
        case,
    })
}

/// Two-point confidence without the `p > eps` indicator. Continuous in `p`
/// for `p >= eps`; at `p = eps` it gives the limit from above.
fn confidence_above_goal(pp: &PartialPrior, obs: Observation, p: f64) -> f64 {
    let case = worst_case_case(pp, obs, p);
    let below = ln_mass(pp.theta) + log_likelihood(case.x1, obs.k, obs.n);
    let above = ln_mass(1.0 - pp.theta) + log_likelihood(case.x3, obs.k, obs.n);
    share(below, above)
}

/// Infimum of `Pr(X <= p | k failures in n miles)` over all priors
/// satisfying `pp`. Zero whenever `p <= eps`.
pub fn infimum_confidence(pp: &PartialPrior, obs: Observation, p: f64) -> Result<f64> {
    let obs = check_inputs(pp, obs, p)?;
    if p <= pp.epsilon {
        return Ok(0.0);
    }
    Ok(confidence_above_goal(pp, obs, p))
}

/// Miles at which the worst-case confidence in `X <= p` reaches `c` with `k`
/// failures, together with the closed-form value when one applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MilesSolution {
    /// Root of the monotone confidence curve.
    pub miles: f64,
    /// Closed form with the lower atom fixed, when the solution keeps the
    /// observed rate inside a single case (upper atom at `p`).
    pub closed_form: Option<f64>,
}

/// Closed form for the miles that bring the two-point confidence with atoms
/// `x1` and `p` to `c` after `k` failures:
/// `k + (k ln(x1/p) + ln(theta(1-c)/(c(1-theta)))) / ln((1-p)/(1-x1))`.
pub fn miles_for_lower_atom(pp: &PartialPrior, c: f64, p: f64, x1: f64, k: u64) -> f64 {
    let kf = k as f64;
    let odds = pp.log_odds_term(c);
    let log_ratio = if k == 0 { 0.0 } else { kf * (x1 / p).ln() };
    // (1-p)/(1-x1) = 1 - (p-x1)/(1-x1), exact for p close to x1
    let denom = (-(p - x1) / (1.0 - x1)).ln_1p();
    kf + (log_ratio + odds) / denom
}

/// Closed-form required miles, picking the lower atom by the crossover
/// `n = k n*`. `None` when no branch is self-consistent.
pub fn closed_form_required_miles(pp: &PartialPrior, c: f64, p: f64, k: u64) -> Option<f64> {
    if pp.theta >= 1.0 || p <= pp.epsilon {
        return None;
    }
    if k == 0 {
        return Some(miles_for_lower_atom(pp, c, p, pp.epsilon, 0).max(0.0));
    }
    let kf = k as f64;
    let switch = kf * n_star(pp);
    let consistent = |n: f64, x1: f64| {
        let at_goal = n >= switch;
        n.is_finite() && n >= kf / p && (x1 == pp.epsilon) == at_goal
    };
    [pp.p_l, pp.epsilon]
        .into_iter()
        .map(|x1| (x1, miles_for_lower_atom(pp, c, p, x1, k)))
        .find(|&(x1, n)| consistent(n, x1))
        .map(|(_, n)| n)
}

/// Smallest `n` with `infimum_confidence(pp, (k, n), p) >= c`, with the
/// closed-form cross-check.
pub fn solve_required_miles(pp: &PartialPrior, c: f64, p: f64, k: u64) -> Result<MilesSolution> {
    pp.validate()?;
    validate_confidence(c)?;
    validate_bound(p)?;
    if p <= pp.epsilon {
        return Err(CbiError::InfeasibleClaim {
            bound: p,
            epsilon: pp.epsilon,
        });
    }
    let confidence = |n: f64| confidence_above_goal(pp, Observation { k, n }, p);
    let lo = k as f64;
    let miles = if confidence(lo) >= c {
        lo
    } else {
        let hi = expand_upper(&confidence, (2.0 * lo).max(1.0), c)?;
        bisect_increasing(&confidence, lo, hi, c, SOLVE_REL_TOL)
    };
    Ok(MilesSolution {
        miles,
        closed_form: closed_form_required_miles(pp, c, p, k),
    })
}

/// Smallest number of miles with `k` failures for which every prior
/// satisfying `pp` gives confidence at least `c` in `X <= p`.
///
/// Errors with [`CbiError::InfeasibleClaim`] when `p <= eps`.
pub fn required_miles(pp: &PartialPrior, c: f64, p: f64, k: u64) -> Result<f64> {
    solve_required_miles(pp, c, p, k).map(|s| s.miles)
}

/// Smallest bound `p` with `infimum_confidence(pp, obs, p) >= c`.
pub fn best_supported_bound(pp: &PartialPrior, c: f64, obs: Observation) -> Result<f64> {
    pp.validate()?;
    validate_confidence(c)?;
    let obs = obs.validate()?;
    let confidence = |p: f64| confidence_above_goal(pp, obs, p);
    if confidence(pp.epsilon) >= c {
        return Err(CbiError::NoSolution(format!(
            "confidence {c} is already reached as the bound approaches the goal {}",
            pp.epsilon
        )));
    }
    if confidence(1.0) < c {
        return Err(CbiError::NoSolution(format!(
            "confidence {c} is not reached by any bound below 1"
        )));
    }
    Ok(bisect_increasing(
        confidence,
        pp.epsilon,
        1.0,
        c,
        f64::EPSILON,
    ))
}

/// Miles beyond which, with one failure, the worst-case lower atom moves from
/// `p_l` to `eps`: the solution of `eps (1-eps)^(n-1) = p_l (1-p_l)^(n-1)`.
/// Does not depend on `theta` or any confidence level.
pub fn n_star(pp: &PartialPrior) -> f64 {
    let gap = (-(pp.epsilon - pp.p_l) / (1.0 - pp.p_l)).ln_1p();
    1.0 - (pp.epsilon / pp.p_l).ln() / gap
}

/// Bound at which the required miles for one failure equal `n_star`. For
/// bounds above it the one-failure worst case puts its lower atom at `p_l`.
///
/// At `c = theta` the only root is `eps`; `c < theta` is outside the regime
/// this quantity is defined for.
pub fn p_star(pp: &PartialPrior, c: f64) -> Result<f64> {
    pp.validate()?;
    validate_confidence(c)?;
    if pp.theta >= 1.0 {
        return Err(CbiError::UnsupportedRegime(
            "theta = 1 leaves no free prior mass".into(),
        ));
    }
    let odds = pp.log_odds_term(c);
    if odds > 0.0 {
        return Err(CbiError::UnsupportedRegime(format!(
            "confidence {c} below prior confidence {}",
            pp.theta
        )));
    }
    if odds == 0.0 {
        return Ok(pp.epsilon);
    }
    let target = n_star(pp);
    let eps = pp.epsilon;
    // miles needed with one failure and the lower atom at eps; decreasing in p
    let miles = |p: f64| {
        let log_ratio = -((p - eps) / eps).ln_1p();
        let denom = (-(p - eps) / (1.0 - eps)).ln_1p();
        1.0 + (log_ratio + odds) / denom
    };
    Ok(bisect_increasing(
        |p| -miles(p),
        eps,
        1.0,
        -target,
        f64::EPSILON,
    ))
}

/// Result of the two-step compensation procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compensation {
    /// Bound supported by the `n1` failure-free miles.
    pub bound: f64,
    /// Miles needed in total to keep that bound after one failure.
    pub total_miles: f64,
    /// Extra failure-free miles beyond `n1`.
    pub extra_miles: f64,
}

/// After `n1` failure-free miles, finds the bound they support at
/// confidence `c`, then the extra miles needed to keep supporting it once a
/// single failure is observed.
pub fn compensation(pp: &PartialPrior, c: f64, n1: f64) -> Result<Compensation> {
    validate_miles("n1", n1)?;
    let bound = best_supported_bound(pp, c, Observation::failure_free(n1))?;
    let total_miles = required_miles(pp, c, bound, 1)?;
    Ok(Compensation {
        bound,
        total_miles,
        extra_miles: total_miles - n1,
    })
}

/// Extra failure-free miles needed after one failure; see [`compensation`].
pub fn compensation_miles(pp: &PartialPrior, c: f64, n1: f64) -> Result<f64> {
    compensation(pp, c, n1).map(|r| r.extra_miles)
}
