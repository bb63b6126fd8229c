//! Worst-case confidence for a new system or environment B when failure-free
//! miles from an old one A are available, together with the prior belief
//! `phi` that B is no worse than A.
//!
//! Only failure-free evidence is handled in either environment.

use serde::{Deserialize, Serialize};

use crate::error::{CbiError, Result};
use crate::numeric::{bisect_increasing, expand_upper, ln_mass, log_add_exp, share, SOLVE_REL_TOL};
use crate::types::{
    validate_bound, validate_confidence, validate_miles, BivariateAtom, BivariateDiscretePrior,
    BivariateKnowledge, Region,
};

/// The joint prior attaining the bivariate infimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointWorstCase {
    pub prior: BivariateDiscretePrior,
    /// True when `phi <= 1 - theta`: no mass can be placed where B meets
    /// the bound and the infimum is 0.
    pub vacuous: bool,
}

/// Masses `(M1, M3, M5)` of the three-point worst case. `M5` is formed as
/// `(phi - 1) + theta` so that `phi = 1` reproduces `theta` exactly.
fn worst_case_masses(bk: &BivariateKnowledge) -> (f64, f64, f64) {
    let theta = bk.marginal.theta;
    (1.0 - bk.phi, 1.0 - theta, (bk.phi - 1.0) + theta)
}

fn check(bk: &BivariateKnowledge, p_b: f64) -> Result<()> {
    bk.validate()?;
    validate_bound(p_b)?;
    if p_b <= bk.marginal.epsilon {
        return Err(CbiError::InfeasibleClaim {
            bound: p_b,
            epsilon: bk.marginal.epsilon,
        });
    }
    Ok(())
}

fn vacuous_error(bk: &BivariateKnowledge) -> CbiError {
    CbiError::Vacuous {
        phi: bk.phi,
        one_minus_theta: 1.0 - bk.marginal.theta,
    }
}

/// Joint prior minimizing `Pr(Y <= p_b | failure-free miles in A and B)`.
///
/// Informative case: `(p_l, p_b)` with mass `1 - phi` (region 1),
/// `(p_b, p_b)` with mass `1 - theta` (region 3) and `(eps, eps)` with mass
/// `phi - 1 + theta` (region 5). Atoms at `y = p_b` outside regions 4–7
/// stand for limits from above. When `phi <= 1 - theta` the witness puts
/// `theta` in region 1, `phi` in region 3 and the rest in region 2.
pub fn worst_case_joint_prior(bk: &BivariateKnowledge, p_b: f64) -> Result<JointWorstCase> {
    check(bk, p_b)?;
    let pp = bk.marginal;
    let atom = |x: f64, y: f64, mass: f64, region: Region| BivariateAtom { x, y, mass, region };
    let (atoms, vacuous) = if bk.is_informative() {
        let (m1, m3, m5) = worst_case_masses(bk);
        (
            vec![
                atom(pp.p_l, p_b, m1, Region::R1),
                atom(p_b, p_b, m3, Region::R3),
                atom(pp.epsilon, pp.epsilon, m5, Region::R5),
            ],
            false,
        )
    } else {
        let rest = (1.0 - pp.theta - bk.phi).max(0.0);
        (
            vec![
                atom(pp.p_l, p_b, pp.theta, Region::R1),
                atom(p_b, p_b, rest, Region::R2),
                atom(p_b, p_b, bk.phi, Region::R3),
            ],
            true,
        )
    };
    Ok(JointWorstCase {
        prior: BivariateDiscretePrior::new(atoms)?,
        vacuous,
    })
}

/// Infimum of `Pr(Y <= p_b | n_a failure-free miles of A, n_b of B)` over
/// all joint priors consistent with `bk`. Zero when `phi <= 1 - theta`.
///
/// With `phi = 1` it equals the single-system infimum for `n_a + n_b`
/// failure-free miles.
pub fn infimum_confidence_bivariate(
    bk: &BivariateKnowledge,
    n_a: f64,
    n_b: f64,
    p_b: f64,
) -> Result<f64> {
    check(bk, p_b)?;
    validate_miles("n_a", n_a)?;
    validate_miles("n_b", n_b)?;
    if !bk.is_informative() {
        return Ok(0.0);
    }
    Ok(informative_confidence(bk, n_a, n_b, p_b))
}

fn informative_confidence(bk: &BivariateKnowledge, n_a: f64, n_b: f64, p_b: f64) -> f64 {
    let pp = bk.marginal;
    let (m1, m3, m5) = worst_case_masses(bk);
    let total = n_a + n_b;
    let survive_b = (-p_b).ln_1p();
    let meets = ln_mass(m5) + total * (-pp.epsilon).ln_1p();
    let same = ln_mass(m3) + total * survive_b;
    let split = ln_mass(m1) + n_a * (-pp.p_l).ln_1p() + n_b * survive_b;
    share(meets, log_add_exp(same, split))
}

/// Unclamped closed-form miles of B reaching confidence `c`; negative
/// values mean A's evidence alone already suffices.
fn unclamped_miles_b(bk: &BivariateKnowledge, c: f64, p_b: f64, n_a: f64) -> f64 {
    let pp = bk.marginal;
    let (m1, m3, m5) = worst_case_masses(bk);
    let survive_goal = (-pp.epsilon).ln_1p();
    let survive_b = (-p_b).ln_1p();
    let mix = log_add_exp(
        ln_mass(m3) + n_a * survive_b,
        ln_mass(m1) + n_a * (-pp.p_l).ln_1p(),
    );
    let log_arg = mix + c.ln() - m5.ln() - (1.0 - c).ln();
    // ln(1-eps) - ln(1-p_b) written as ln(1 + (p_b-eps)/(1-p_b))
    let gap = ((p_b - pp.epsilon) / (1.0 - p_b)).ln_1p();
    (log_arg - n_a * survive_goal) / gap
}

/// Miles of B needed for confidence `c` in `Y <= p_b` after `n_a` miles of A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MilesB {
    /// Closed form clamped at 0 (the flat stretch where A's miles suffice).
    pub miles: f64,
    /// Closed form before clamping, for plotting.
    pub unclamped: f64,
    /// Root of the confidence curve in `n_b`, as a cross-check.
    pub root: f64,
}

/// Closed-form miles of B plus a root-find cross-check.
pub fn solve_required_miles_b(
    bk: &BivariateKnowledge,
    c: f64,
    p_b: f64,
    n_a: f64,
) -> Result<MilesB> {
    check(bk, p_b)?;
    validate_confidence(c)?;
    validate_miles("n_a", n_a)?;
    if !bk.is_informative() {
        return Err(vacuous_error(bk));
    }
    let unclamped = unclamped_miles_b(bk, c, p_b, n_a);
    let confidence = |n_b: f64| informative_confidence(bk, n_a, n_b, p_b);
    let root = if confidence(0.0) >= c {
        0.0
    } else {
        let hi = expand_upper(confidence, unclamped.max(1.0), c)?;
        bisect_increasing(confidence, 0.0, hi, c, SOLVE_REL_TOL)
    };
    Ok(MilesB {
        miles: unclamped.max(0.0),
        unclamped,
        root,
    })
}

/// Failure-free miles of B needed, after `n_a` failure-free miles of A, for
/// worst-case confidence `c` that `Y <= p_b`. Zero when A's miles suffice.
pub fn required_miles_b(bk: &BivariateKnowledge, c: f64, p_b: f64, n_a: f64) -> Result<f64> {
    solve_required_miles_b(bk, c, p_b, n_a).map(|s| s.miles)
}

/// Miles of A that minimize the miles of B needed, for any confidence level.
/// Clamped at 0 when the unconstrained optimum is negative.
pub fn optimal_n_a(bk: &BivariateKnowledge, p_b: f64) -> Result<f64> {
    check(bk, p_b)?;
    if !bk.is_informative() {
        return Err(vacuous_error(bk));
    }
    if bk.phi >= 1.0 {
        return Err(CbiError::UnsupportedRegime(
            "phi = 1: miles of A and B are interchangeable, no interior optimum".into(),
        ));
    }
    let pp = bk.marginal;
    let eps = pp.epsilon;
    // ln((1-p_b)/(1-eps)) < 0 and ln((1-p_l)/(1-eps)) > 0
    let b_vs_goal = (-(p_b - eps) / (1.0 - eps)).ln_1p();
    let floor_vs_goal = ((eps - pp.p_l) / (1.0 - eps)).ln_1p();
    let arg = -(1.0 - pp.theta) / (1.0 - bk.phi) * b_vs_goal / floor_vs_goal;
    let floor_vs_b = ((p_b - pp.p_l) / (1.0 - p_b)).ln_1p();
    Ok((arg.ln() / floor_vs_b).max(0.0))
}

/// Finite-difference slopes of the unclamped miles-of-B curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// `(n_a, unclamped n_b)` per grid point.
    pub points: Vec<(f64, f64)>,
    /// Slope over each consecutive pair of grid points.
    pub slopes: Vec<f64>,
    /// Limit of the slope as `n_a` grows.
    pub asymptotic_slope: f64,
}

/// Slopes of `n_b(n_a)` over `n_a_grid`, to compare with the linear growth
/// rate `ln((1-p_l)/(1-eps)) / (ln(1-eps) - ln(1-p_b))` (or `-1` when
/// `phi = 1`).
pub fn growth_check(
    bk: &BivariateKnowledge,
    c: f64,
    p_b: f64,
    n_a_grid: &[f64],
) -> Result<GrowthReport> {
    check(bk, p_b)?;
    validate_confidence(c)?;
    if !bk.is_informative() {
        return Err(vacuous_error(bk));
    }
    let mut points = Vec::with_capacity(n_a_grid.len());
    for &n_a in n_a_grid {
        validate_miles("n_a", n_a)?;
        points.push((n_a, unclamped_miles_b(bk, c, p_b, n_a)));
    }
    let slopes = points
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let pp = bk.marginal;
    let asymptotic_slope = if bk.phi >= 1.0 {
        -1.0
    } else {
        let floor_vs_goal = ((pp.epsilon - pp.p_l) / (1.0 - pp.epsilon)).ln_1p();
        let gap = ((p_b - pp.epsilon) / (1.0 - p_b)).ln_1p();
        floor_vs_goal / gap
    };
    Ok(GrowthReport {
        points,
        slopes,
        asymptotic_slope,
    })
}
