//! Brute-force checks that do not rely on the worst-case constructions:
//! grid minimization of the posterior confidence over explicit feasible
//! priors, and simulation of the classical zero-failure test.
//!
//! The grids are log-spaced per constraint interval and include every
//! interval endpoint. Open endpoints are approached to a relative distance of
//! [`OPEN_NUDGE`]. Doubling [`GridSpec::resolution`] adds points without
//! moving existing ones, so refinement can only lower a grid minimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::classical_required_miles;
use crate::error::{CbiError, Result};
use crate::numeric::{ln_mass, log_add_exp, log_likelihood, log_space, share};
use crate::types::{
    validate_bound, validate_miles, Atom, BivariateAtom, BivariateDiscretePrior,
    BivariateKnowledge, DiscretePrior, Observation, PartialPrior, Region, RegionMasses,
};

/// Relative offset used to step inside an open interval endpoint.
pub const OPEN_NUDGE: f64 = 1e-12;

/// Resolution of the brute-force grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Log-spaced intervals per constraint interval of the rate axis.
    pub resolution: usize,
    /// Steps used to split free prior mass.
    pub beta_steps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution: 64,
            beta_steps: 16,
        }
    }
}

impl GridSpec {
    pub fn new(resolution: usize, beta_steps: usize) -> Result<Self> {
        GridSpec {
            resolution,
            beta_steps,
        }
        .validate()
    }

    pub fn validate(self) -> Result<Self> {
        if self.resolution < 8 {
            return Err(CbiError::invalid(
                "resolution",
                format!("must be >= 8, got {}", self.resolution),
            ));
        }
        if self.beta_steps < 8 {
            return Err(CbiError::invalid(
                "beta_steps",
                format!("must be >= 8, got {}", self.beta_steps),
            ));
        }
        Ok(self)
    }

    /// Same spec with twice the rate resolution.
    pub fn doubled(self) -> Self {
        GridSpec {
            resolution: self.resolution * 2,
            ..self
        }
    }
}

/// Smallest posterior confidence found and the prior attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMinimum<P> {
    pub confidence: f64,
    pub prior: P,
}

/// Log grid over an interval; `open_lo`/`open_hi` move that end inward.
/// `anchor` is added when it lies inside.
fn interval_grid(
    lo: f64,
    hi: f64,
    open_lo: bool,
    open_hi: bool,
    resolution: usize,
    anchor: Option<f64>,
) -> Vec<f64> {
    let lo = if open_lo { lo * (1.0 + OPEN_NUDGE) } else { lo };
    let hi = if open_hi { hi * (1.0 - OPEN_NUDGE) } else { hi };
    if !(lo <= hi) {
        return Vec::new();
    }
    if lo == hi {
        return vec![lo];
    }
    let mut g = log_space(lo, hi, resolution + 1);
    if let Some(a) = anchor {
        if a > lo && a < hi {
            g.push(a);
            g.sort_by(f64::total_cmp);
        }
    }
    g
}

struct Candidate {
    ln_like: f64,
    location: f64,
}

fn candidates(grid: Vec<f64>, obs: Observation) -> Vec<Candidate> {
    grid.into_iter()
        .map(|location| Candidate {
            ln_like: log_likelihood(location, obs.k, obs.n),
            location,
        })
        .collect()
}

fn mass_steps(total: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| total * i as f64 / steps as f64)
        .collect()
}

/// Minimum of `Pr(X <= p | obs)` over three-point priors satisfying `pp`
/// with atoms on the grid.
///
/// For `p > eps` the atoms are `x1` in `[p_l, eps]` with mass `theta`, `x2`
/// in `(eps, p]` and `x3` in `(p, 1]` sharing `1 - theta`. For `p <= eps`
/// the mass `theta` is split between `[p_l, p]` and `(p, eps]` and `x3` in
/// `(eps, 1]` carries `1 - theta`.
pub fn grid_min_confidence_univariate(
    pp: &PartialPrior,
    obs: Observation,
    p: f64,
    grid: GridSpec,
) -> Result<GridMinimum<DiscretePrior>> {
    pp.validate()?;
    let obs = obs.validate()?;
    validate_bound(p)?;
    let grid = grid.validate()?;
    let anchor = (obs.n > 0.0).then(|| obs.rate());
    let res = grid.resolution;
    let theta = pp.theta;

    let (first, second, third, first_mass, split_total, split_first) = if p > pp.epsilon {
        (
            interval_grid(pp.p_l, pp.epsilon, false, false, res, anchor),
            interval_grid(pp.epsilon, p, true, false, res, anchor),
            interval_grid(p, 1.0, true, false, res, anchor),
            theta,
            1.0 - theta,
            false,
        )
    } else {
        (
            if p >= pp.p_l {
                interval_grid(pp.p_l, p, false, false, res, anchor)
            } else {
                Vec::new()
            },
            interval_grid(p.max(pp.p_l), pp.epsilon, true, false, res, anchor),
            interval_grid(pp.epsilon, 1.0, true, false, res, anchor),
            1.0 - theta,
            theta,
            true,
        )
    };
    let (first, second, third) = (
        candidates(first, obs),
        candidates(second, obs),
        candidates(third, obs),
    );
    let splits = mass_steps(split_total, grid.beta_steps);

    // Each configuration is (atom locations, masses, below-p flags).
    struct Best {
        confidence: f64,
        atoms: [(f64, f64, bool); 3],
    }
    let evaluate = |a: &Candidate, b: &Candidate, c: &Candidate, split: f64| -> Best {
        // p > eps: a (theta, below), b (split, below), c (rest, above)
        // p <= eps: a (split, below), b (theta - split, above), c (1 - theta, above)
        let atoms = if split_first {
            [
                (a.location, split, true),
                (b.location, theta - split, false),
                (c.location, first_mass, false),
            ]
        } else {
            [
                (a.location, first_mass, true),
                (b.location, split, true),
                (c.location, split_total - split, false),
            ]
        };
        let lls = [a.ln_like, b.ln_like, c.ln_like];
        let (mut below, mut above) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (&(_, mass, is_below), ll) in atoms.iter().zip(lls) {
            let w = ln_mass(mass) + ll;
            if is_below {
                below = log_add_exp(below, w);
            } else {
                above = log_add_exp(above, w);
            }
        }
        let confidence = if below == f64::NEG_INFINITY && above == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            share(below, above)
        };
        Best { confidence, atoms }
    };

    let first_empty = first.is_empty();
    let placeholder = [Candidate {
        ln_like: f64::NEG_INFINITY,
        location: f64::NAN,
    }];
    let first_iter: &[Candidate] = if first_empty { &placeholder } else { &first };
    let best = first_iter
        .par_iter()
        .map(|a| {
            let mut best = Best {
                confidence: f64::INFINITY,
                atoms: [(0.0, 0.0, false); 3],
            };
            for b in &second {
                for c in &third {
                    for &split in &splits {
                        if first_empty && split > 0.0 {
                            continue;
                        }
                        let cand = evaluate(a, b, c, split);
                        if cand.confidence < best.confidence {
                            best = cand;
                        }
                    }
                }
            }
            best
        })
        .reduce_with(|x, y| if y.confidence < x.confidence { y } else { x })
        .ok_or_else(|| CbiError::NoSolution("empty grid".into()))?;
    if !best.confidence.is_finite() {
        return Err(CbiError::DegenerateLikelihood);
    }
    Ok(GridMinimum {
        confidence: best.confidence,
        prior: merge_atoms(&best.atoms)?,
    })
}

fn merge_atoms(atoms: &[(f64, f64, bool)]) -> Result<DiscretePrior> {
    let mut kept: Vec<Atom> = atoms
        .iter()
        .filter(|a| a.1 > 0.0)
        .map(|&(location, mass, _)| Atom { location, mass })
        .collect();
    kept.sort_by(|x, y| x.location.total_cmp(&y.location));
    let mut merged: Vec<Atom> = Vec::with_capacity(kept.len());
    for a in kept {
        match merged.last_mut() {
            Some(last) if last.location == a.location => last.mass += a.mass,
            _ => merged.push(a),
        }
    }
    DiscretePrior::new(merged)
}

/// Rate axis for the bivariate grid: every constraint interval of
/// `[p_l, 1]` gridded separately, with points just above `eps` and `p_b`.
fn bivariate_axis(pp: &PartialPrior, p_b: f64, resolution: usize) -> Vec<f64> {
    let mut axis = interval_grid(pp.p_l, pp.epsilon, false, false, resolution, None);
    axis.extend(interval_grid(
        pp.epsilon, p_b, true, false, resolution, None,
    ));
    axis.extend(interval_grid(p_b, 1.0, true, false, resolution, None));
    axis.sort_by(f64::total_cmp);
    axis.dedup();
    axis
}

fn in_region(r: Region, x: f64, y: f64, eps: f64, p_b: f64) -> bool {
    let goal = x <= eps;
    let meets = y <= p_b;
    match r {
        Region::R1 => goal && !meets && y > x,
        Region::R2 => !goal && !meets && y > x,
        Region::R3 => !meets && y <= x,
        Region::R4 => goal && meets && y > x,
        Region::R5 => goal && meets && y <= x,
        Region::R6 => !goal && meets && y > x,
        Region::R7 => !goal && meets && y <= x,
    }
}

/// Mass vectors at the vertices of `{M >= 0, sum M = 1, M1+M4+M5 = theta,
/// M3+M5+M7 = phi}`.
fn polytope_vertices(theta: f64, phi: f64) -> Vec<[f64; 7]> {
    let rows: [[f64; 7]; 3] = [
        [1.0; 7],
        [1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
    ];
    let rhs = [1.0, theta, phi];
    let mut out = Vec::new();
    for i in 0..7 {
        for j in i + 1..7 {
            for k in j + 1..7 {
                let cols = [i, j, k];
                let m = |r: usize, c: usize| rows[r][cols[c]];
                let det3 = |a: [[f64; 3]; 3]| {
                    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
                };
                let base = [
                    [m(0, 0), m(0, 1), m(0, 2)],
                    [m(1, 0), m(1, 1), m(1, 2)],
                    [m(2, 0), m(2, 1), m(2, 2)],
                ];
                let det = det3(base);
                if det.abs() < 1e-12 {
                    continue;
                }
                let mut v = [0.0; 7];
                let mut ok = true;
                for (c, &col) in cols.iter().enumerate() {
                    let mut replaced = base;
                    for r in 0..3 {
                        replaced[r][c] = rhs[r];
                    }
                    let value = det3(replaced) / det;
                    if value < -1e-12 {
                        ok = false;
                    }
                    v[col] = value.max(0.0);
                }
                if ok {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Mass vectors on a simplex grid: `M3, M4, M5, M6` in steps of
/// `1 / steps`, the rest determined by the constraints.
fn simplex_grid(theta: f64, phi: f64, steps: usize) -> Vec<[f64; 7]> {
    let h = 1.0 / steps as f64;
    let mut out = Vec::new();
    for a in 0..=steps {
        for b in 0..=steps {
            for c in 0..=steps {
                for d in 0..=steps {
                    let (m3, m4, m5, m6) = (a as f64 * h, b as f64 * h, c as f64 * h, d as f64 * h);
                    let m1 = theta - m4 - m5;
                    let m7 = phi - m3 - m5;
                    let m2 = 1.0 - theta - phi + m5 - m6;
                    if m1 >= 0.0 && m7 >= 0.0 && m2 >= 0.0 {
                        out.push([m1, m2, m3, m4, m5, m6, m7]);
                    }
                }
            }
        }
    }
    out
}

/// Minimum of `Pr(Y <= p_b | n_a, n_b failure-free miles)` over joint
/// priors with one grid atom per region.
///
/// For fixed region masses the confidence falls as likelihood moves out of
/// regions 4–7 and into regions 1–3, so each region's atom is placed at its
/// least (regions 4–7) or most (regions 1–3) likely grid point. Region masses
/// are then searched over the vertices of the constraint polytope and a
/// simplex grid of `beta_steps`.
pub fn grid_min_confidence_bivariate(
    bk: &BivariateKnowledge,
    n_a: f64,
    n_b: f64,
    p_b: f64,
    grid: GridSpec,
) -> Result<GridMinimum<BivariateDiscretePrior>> {
    let bk = bk.validate()?;
    validate_miles("n_a", n_a)?;
    validate_miles("n_b", n_b)?;
    validate_bound(p_b)?;
    let grid = grid.validate()?;
    let pp = bk.marginal;
    if p_b <= pp.epsilon {
        return Err(CbiError::InfeasibleClaim {
            bound: p_b,
            epsilon: pp.epsilon,
        });
    }
    let axis = bivariate_axis(&pp, p_b, grid.resolution);
    let ln_a: Vec<f64> = axis.iter().map(|&x| log_likelihood(x, 0, n_a)).collect();
    let ln_b: Vec<f64> = axis.iter().map(|&y| log_likelihood(y, 0, n_b)).collect();

    let extremes: Vec<Option<(f64, f64, f64)>> = Region::ALL
        .par_iter()
        .map(|&r| {
            let want_max = !r.meets_bound();
            let mut best: Option<(f64, f64, f64)> = None;
            for (i, &x) in axis.iter().enumerate() {
                for (j, &y) in axis.iter().enumerate() {
                    if !in_region(r, x, y, pp.epsilon, p_b) {
                        continue;
                    }
                    let ll = ln_a[i] + ln_b[j];
                    let better = match best {
                        None => true,
                        Some((_, _, v)) => (want_max && ll > v) || (!want_max && ll < v),
                    };
                    if better {
                        best = Some((x, y, ll));
                    }
                }
            }
            best
        })
        .collect();

    let mut masses = polytope_vertices(pp.theta, bk.phi);
    masses.extend(simplex_grid(pp.theta, bk.phi, grid.beta_steps));

    let confidence_of = |m: &[f64; 7]| -> f64 {
        let (mut inside, mut outside) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for r in Region::ALL {
            let mass = m[r.index()];
            if mass <= 0.0 {
                continue;
            }
            let Some((_, _, ll)) = extremes[r.index()] else {
                continue;
            };
            let w = ln_mass(mass) + ll;
            if r.meets_bound() {
                inside = log_add_exp(inside, w);
            } else {
                outside = log_add_exp(outside, w);
            }
        }
        if inside == f64::NEG_INFINITY && outside == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            share(inside, outside)
        }
    };
    // a region without grid points cannot carry mass
    let feasible = |m: &[f64; 7]| {
        Region::ALL
            .iter()
            .all(|r| m[r.index()] <= 0.0 || extremes[r.index()].is_some())
    };
    let (confidence, best) = masses
        .par_iter()
        .filter(|m| feasible(m))
        .map(|m| (confidence_of(m), *m))
        .reduce_with(|x, y| if y.0 < x.0 { y } else { x })
        .ok_or_else(|| CbiError::NoSolution("no feasible region masses on the grid".into()))?;
    if !confidence.is_finite() {
        return Err(CbiError::DegenerateLikelihood);
    }
    let atoms = Region::ALL
        .iter()
        .filter(|r| best[r.index()] > 0.0)
        .map(|&r| {
            let (x, y, _) = extremes[r.index()].expect("feasible masses only use gridded regions");
            BivariateAtom {
                x,
                y,
                mass: best[r.index()],
                region: r,
            }
        })
        .collect();
    debug_assert!(RegionMasses(best).satisfies(pp.theta, bk.phi));
    Ok(GridMinimum {
        confidence,
        prior: BivariateDiscretePrior::new(atoms)?,
    })
}

/// Outcome of simulating the classical zero-failure demonstration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    /// Miles per trial: the classical zero-failure requirement.
    pub miles: f64,
    pub trials: u64,
    /// Fraction of trials with no failure.
    pub pass_fraction: f64,
    /// `1 - c`, the pass probability the classical bound promises.
    pub expected: f64,
    /// Binomial standard error of the pass fraction at `expected`.
    pub standard_error: f64,
}

const TRIALS_PER_STREAM: u64 = 4096;

/// Drives `n = classical_required_miles(c, p, 0)` miles at true rate `p`,
/// mile by mile, in each of `trials` runs, and reports how often no failure
/// occurred. A fractional last mile of length `f` fails with probability
/// `1 - (1 - p)^f`.
///
/// Trials are split into fixed-size blocks, each drawing from its own
/// ChaCha8 stream of `seed`, so the result does not depend on thread count.
pub fn monte_carlo_classical_semantics(
    p: f64,
    c: f64,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let miles = classical_required_miles(c, p, 0)?;
    if trials == 0 {
        return Err(CbiError::invalid("trials", "must be >= 1"));
    }
    let whole = miles.floor() as u64;
    let partial_fail = -((miles - miles.floor()) * (-p).ln_1p()).exp_m1();
    let blocks = trials.div_ceil(TRIALS_PER_STREAM);
    let passes: u64 = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block);
            let count = TRIALS_PER_STREAM.min(trials - block * TRIALS_PER_STREAM);
            (0..count)
                .filter(|_| {
                    let failed = (0..whole).any(|_| rng.random::<f64>() < p);
                    !failed && rng.random::<f64>() >= partial_fail
                })
                .count() as u64
        })
        .sum();
    let expected = 1.0 - c;
    Ok(SimulationReport {
        miles,
        trials,
        pass_fraction: passes as f64 / trials as f64,
        expected,
        standard_error: (expected * c / trials as f64).sqrt(),
    })
}
