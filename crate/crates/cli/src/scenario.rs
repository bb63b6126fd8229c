//! Scenario inputs: a flat set of optional fields filled from a JSON file,
//! then command-line flags, then per-mode defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Which question a scenario asks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Miles needed to support a claim.
    Q1,
    /// Best bound supported by given evidence.
    Q2,
    /// Extra miles needed after a single failure.
    Q3,
    /// Miles needed in a new environment given miles in an old one.
    Q4,
    /// Old-environment miles minimizing the new-environment requirement.
    Q5,
    /// Classical, conjugate and conservative requirements side by side.
    Compare,
    /// Consequences of reusing the wrong worst-case prior.
    Fallacy,
    /// Brute-force and simulation checks.
    Oracle,
    /// A sweep of one input, one row per point.
    Curve,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Q1 => "q1",
            Mode::Q2 => "q2",
            Mode::Q3 => "q3",
            Mode::Q4 => "q4",
            Mode::Q5 => "q5",
            Mode::Compare => "compare",
            Mode::Fallacy => "fallacy",
            Mode::Oracle => "oracle",
            Mode::Curve => "curve",
        }
    }
}

/// Input swept by `curve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Claimed bound: miles by method.
    Bound,
    /// Failure-free miles before a failure: compensation miles.
    N1,
    /// Old-environment miles: new-environment miles per `phis`.
    Na,
    /// Failure-free miles: conservative and misused quantities.
    N,
    /// Confidence level: miles by method.
    Confidence,
    /// Prior confidence in the goal: conservative miles.
    Theta,
}

impl Axis {
    /// Default range and whether it is log-spaced.
    fn default_range(self) -> (f64, f64, bool) {
        match self {
            Axis::Bound => (1.09e-10, 1.09e-7, true),
            Axis::N1 => (1e6, 1e13, true),
            Axis::Na | Axis::N => (1e6, 1e12, true),
            Axis::Confidence => (0.5, 0.999, false),
            Axis::Theta => (0.05, 0.99, false),
        }
    }

    pub fn is_log(self) -> bool {
        self.default_range().2
    }
}

/// A sweep of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl Sweep {
    /// Sweep points, log-spaced for rates and miles, linear otherwise.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        let step = |i: usize| i as f64 / (self.points - 1) as f64;
        let mut out: Vec<f64> = if self.axis.is_log() {
            let (a, b) = (self.from.ln(), self.to.ln());
            (0..self.points)
                .map(|i| (a + (b - a) * step(i)).exp())
                .collect()
        } else {
            (0..self.points)
                .map(|i| self.from + (self.to - self.from) * step(i))
                .collect()
        };
        out[0] = self.from;
        out[self.points - 1] = self.to;
        out
    }
}

/// Every input any mode reads. Field names match the command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub na: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nb: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<f64>,
    /// Benchmark rate of the classical power calculation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// True rate used by the classical-semantics simulation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phis: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

macro_rules! overlay_fields {
    ($base:expr, $top:expr, $($field:ident),*) => {
        Scenario { $($field: $top.$field.or($base.$field)),* }
    };
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fields set in `top` win over those in `self`.
    pub fn overlay(self, top: Scenario) -> Scenario {
        overlay_fields!(
            self, top, mode, pl, epsilon, theta, phi, bound, confidence, k, n, na, nb, n1,
            reference, seed, trials, sim_rate, resolution, beta_steps, thetas, phis, axis, from,
            to, points
        )
    }

    /// Fills every input `mode` reads with its default. Defaults are the
    /// fatality scenario: `p_l = 1e-15`, `epsilon = 1.09e-10`, `theta = 0.9`,
    /// `c = 0.95`, bound `1.09e-8`.
    pub fn resolve(mut self, mode: Mode) -> Scenario {
        fn fill<T>(slot: &mut Option<T>, value: T) {
            if slot.is_none() {
                *slot = Some(value);
            }
        }
        self.mode = Some(mode);
        fill(&mut self.pl, 1e-15);
        fill(&mut self.epsilon, 1.09e-10);
        fill(&mut self.theta, 0.9);
        fill(&mut self.confidence, 0.95);
        let bound = if mode == Mode::Compare {
            8.72e-9
        } else {
            1.09e-8
        };
        fill(&mut self.bound, bound);
        match mode {
            Mode::Q1 => fill(&mut self.k, 0),
            Mode::Q2 => {
                fill(&mut self.k, 0);
                fill(&mut self.n, 6.9e7);
            }
            Mode::Q3 => fill(&mut self.n1, 1e9),
            Mode::Q4 => {
                fill(&mut self.phi, 0.99);
                fill(&mut self.na, 6.9e7);
            }
            Mode::Q5 => fill(&mut self.phi, 0.8),
            Mode::Compare => fill(&mut self.reference, 1.09e-8),
            Mode::Fallacy => fill(&mut self.n, 1e8),
            Mode::Oracle => {
                fill(&mut self.k, 0);
                fill(&mut self.n, 6.92e7);
                fill(&mut self.resolution, 64);
                fill(&mut self.beta_steps, 16);
                fill(&mut self.sim_rate, 1e-3);
                fill(&mut self.trials, 100_000);
                fill(&mut self.seed, 0);
                if self.phi.is_some() {
                    fill(&mut self.na, 6.9e7);
                    fill(&mut self.nb, 1.9e7);
                }
            }
            Mode::Curve => {
                let axis = *self.axis.get_or_insert(Axis::Bound);
                let (from, to, _) = axis.default_range();
                fill(&mut self.from, from);
                fill(&mut self.to, to);
                fill(&mut self.points, 50);
                fill(&mut self.k, 0);
                match axis {
                    Axis::Bound => fill(&mut self.thetas, vec![0.1, 0.9]),
                    Axis::Na => fill(&mut self.phis, vec![0.8, 0.99, 1.0]),
                    _ => {}
                }
            }
        }
        self
    }

    /// Sweep described by a resolved `curve` scenario.
    pub fn sweep(&self) -> Result<Sweep, CliError> {
        let sweep = Sweep {
            axis: require(self.axis, "axis")?,
            from: require(self.from, "from")?,
            to: require(self.to, "to")?,
            points: require(self.points, "points")?,
        };
        if sweep.points == 0 {
            return Err(CliError::scenario("points", "must be >= 1"));
        }
        if !(sweep.from.is_finite() && sweep.to.is_finite()) {
            return Err(CliError::scenario("from", "sweep range must be finite"));
        }
        if sweep.axis.is_log() && !(sweep.from > 0.0 && sweep.to > 0.0) {
            return Err(CliError::scenario(
                "from",
                "log-spaced sweep range must be positive",
            ));
        }
        Ok(sweep)
    }
}

/// Value of a field that `resolve` fills or the mode requires.
pub fn require<T>(value: Option<T>, field: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::scenario(field, "required for this mode"))
}
