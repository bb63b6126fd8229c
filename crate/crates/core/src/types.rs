//! Domain types shared by every assessment routine.

use serde::{Deserialize, Serialize};

use crate::error::{CbiError, Result};

/// Tolerance on the total mass of a discrete prior.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Partial prior knowledge about an unknown per-mile failure probability X:
/// `Pr(X <= epsilon) = theta` and `Pr(X >= p_l) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialPrior {
    /// Best failure probability the technology can possibly reach.
    pub p_l: f64,
    /// Engineering goal.
    pub epsilon: f64,
    /// Prior confidence that the goal has been met.
    pub theta: f64,
}

impl PartialPrior {
    pub fn new(p_l: f64, epsilon: f64, theta: f64) -> Result<Self> {
        PartialPrior {
            p_l,
            epsilon,
            theta,
        }
        .validate()
    }

    /// Returns `self` when `0 < p_l < epsilon < 1` and `0 < theta <= 1`,
    /// otherwise the first violated invariant.
    pub fn validate(self) -> Result<Self> {
        let PartialPrior {
            p_l,
            epsilon,
            theta,
        } = self;
        if !(p_l > 0.0 && p_l.is_finite()) {
            return Err(CbiError::invalid("p_l", format!("must be > 0, got {p_l}")));
        }
        if !(epsilon > p_l) {
            return Err(CbiError::invalid(
                "epsilon",
                format!("must exceed p_l = {p_l}, got {epsilon}"),
            ));
        }
        if !(epsilon < 1.0) {
            return Err(CbiError::invalid(
                "epsilon",
                format!("must be < 1, got {epsilon}"),
            ));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(CbiError::invalid(
                "theta",
                format!("must lie in (0, 1], got {theta}"),
            ));
        }
        Ok(self)
    }

    /// `ln(theta (1 - c) / (c (1 - theta)))`, the prior-odds term of the
    /// solve-for-miles closed form.
    pub fn log_odds_term(&self, confidence: f64) -> f64 {
        (self.theta * (1.0 - confidence)).ln() - (confidence * (1.0 - self.theta)).ln()
    }
}

/// Validates a [`PartialPrior`], reporting the first violated invariant.
pub fn validate_partial_prior(pp: PartialPrior) -> Result<PartialPrior> {
    pp.validate()
}

/// Prior knowledge for two systems or environments A and B: the marginal
/// knowledge about A plus `Pr(Y <= X) = phi`, with the same lower bound on Y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateKnowledge {
    pub marginal: PartialPrior,
    /// Prior confidence that B is no worse than A.
    pub phi: f64,
}

impl BivariateKnowledge {
    pub fn new(marginal: PartialPrior, phi: f64) -> Result<Self> {
        BivariateKnowledge { marginal, phi }.validate()
    }

    pub fn validate(self) -> Result<Self> {
        self.marginal.validate()?;
        if !(0.0..=1.0).contains(&self.phi) {
            return Err(CbiError::invalid(
                "phi",
                format!("must lie in [0, 1], got {}", self.phi),
            ));
        }
        Ok(self)
    }

    /// True when `phi > 1 - theta`, the only regime with a nonzero infimum.
    pub fn is_informative(&self) -> bool {
        self.phi > 1.0 - self.marginal.theta
    }
}

/// Operational evidence: `k` failures in `n` miles. Miles are real-valued.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub k: u64,
    pub n: f64,
}

impl Observation {
    pub fn new(k: u64, n: f64) -> Result<Self> {
        Observation { k, n }.validate()
    }

    pub fn failure_free(n: f64) -> Self {
        Observation { k: 0, n }
    }

    pub fn validate(self) -> Result<Self> {
        if !(self.n >= 0.0 && self.n.is_finite()) {
            return Err(CbiError::invalid(
                "n",
                format!("must be finite and >= 0, got {}", self.n),
            ));
        }
        if self.k > 0 && (self.k as f64) > self.n {
            return Err(CbiError::invalid(
                "k",
                format!("{} failures cannot occur in {} miles", self.k, self.n),
            ));
        }
        Ok(self)
    }

    /// Observed failure frequency `k/n`, taken as 0 when nothing was driven.
    pub fn rate(&self) -> f64 {
        if self.k == 0 {
            0.0
        } else {
            self.k as f64 / self.n
        }
    }
}

/// A reliability claim `X <= bound` held with the given confidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub bound: f64,
    pub confidence: f64,
}

impl Claim {
    pub fn new(bound: f64, confidence: f64) -> Result<Self> {
        Claim { bound, confidence }.validate()
    }

    pub fn validate(self) -> Result<Self> {
        validate_bound(self.bound)?;
        validate_confidence(self.confidence)?;
        Ok(self)
    }
}

pub(crate) fn validate_bound(bound: f64) -> Result<f64> {
    if bound > 0.0 && bound < 1.0 {
        Ok(bound)
    } else {
        Err(CbiError::invalid(
            "bound",
            format!("must lie in (0, 1), got {bound}"),
        ))
    }
}

pub(crate) fn validate_confidence(c: f64) -> Result<f64> {
    if c > 0.0 && c < 1.0 {
        Ok(c)
    } else {
        Err(CbiError::invalid(
            "confidence",
            format!("must lie in (0, 1), got {c}"),
        ))
    }
}

pub(crate) fn validate_miles(field: &'static str, n: f64) -> Result<f64> {
    if n >= 0.0 && n.is_finite() {
        Ok(n)
    } else {
        Err(CbiError::invalid(
            field,
            format!("must be finite and >= 0, got {n}"),
        ))
    }
}

/// A point mass of a univariate prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// A finite-support prior on `[0, 1]` with strictly increasing locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePrior {
    atoms: Vec<Atom>,
}

impl DiscretePrior {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(CbiError::invalid("atoms", "prior needs at least one atom"));
        }
        for a in &atoms {
            if !(0.0..=1.0).contains(&a.location) {
                return Err(CbiError::invalid(
                    "atoms",
                    format!("location {} outside [0, 1]", a.location),
                ));
            }
            if !(a.mass >= 0.0) {
                return Err(CbiError::invalid(
                    "atoms",
                    format!("negative mass {}", a.mass),
                ));
            }
        }
        if atoms.windows(2).any(|w| w[0].location >= w[1].location) {
            return Err(CbiError::invalid(
                "atoms",
                "locations must be strictly increasing",
            ));
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(CbiError::invalid(
                "atoms",
                format!("masses sum to {total}, not 1"),
            ));
        }
        Ok(DiscretePrior { atoms })
    }

    /// Builds a prior from `(location, mass)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(location, mass)| Atom { location, mass })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Prior mass on `[lo, hi]`.
    pub fn mass_within(&self, lo: f64, hi: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.location >= lo && a.location <= hi)
            .map(|a| a.mass)
            .sum()
    }

    /// True when the prior satisfies `Pr(X <= eps) = theta` (within
    /// [`MASS_TOLERANCE`]) and puts no mass below `p_l`.
    pub fn satisfies(&self, pp: &PartialPrior) -> bool {
        let below_goal = self.mass_within(0.0, pp.epsilon);
        let below_floor: f64 = self
            .atoms
            .iter()
            .filter(|a| a.location < pp.p_l)
            .map(|a| a.mass)
            .sum();
        (below_goal - pp.theta).abs() <= MASS_TOLERANCE && below_floor <= MASS_TOLERANCE
    }
}

/// The seven regions of the unit square used by the bivariate analysis.
///
/// With X the rate of A, Y the rate of B, goal `eps` and bound `p_B`:
///
/// | region | X          | Y            | Y vs X  |
/// |--------|------------|--------------|---------|
/// | 1      | `<= eps`   | `> p_B`      | `Y > X` |
/// | 2      | `> eps`    | `> p_B`      | `Y > X` |
/// | 3      | any        | `> p_B`      | `Y <= X`|
/// | 4      | `<= eps`   | `<= p_B`     | `Y > X` |
/// | 5      | `<= eps`   | `<= p_B`     | `Y <= X`|
/// | 6      | `> eps`    | `<= p_B`     | `Y > X` |
/// | 7      | `> eps`    | `<= p_B`     | `Y <= X`|
///
/// Regions 1, 4, 5 carry `theta`; regions 3, 5, 7 carry `phi`; regions 4–7
/// make up the event `Y <= p_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
}

impl Region {
    pub const ALL: [Region; 7] = [
        Region::R1,
        Region::R2,
        Region::R3,
        Region::R4,
        Region::R5,
        Region::R6,
        Region::R7,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Region lies inside `Y <= p_B`.
    pub fn meets_bound(self) -> bool {
        matches!(self, Region::R4 | Region::R5 | Region::R6 | Region::R7)
    }

    /// Region lies inside `X <= eps`.
    pub fn meets_goal(self) -> bool {
        matches!(self, Region::R1 | Region::R4 | Region::R5)
    }

    /// Region lies inside `Y <= X`.
    pub fn b_no_worse(self) -> bool {
        matches!(self, Region::R3 | Region::R5 | Region::R7)
    }

    /// Whether `(x, y)` lies in the closure of the region.
    pub fn contains_closure(self, x: f64, y: f64, epsilon: f64, p_b: f64) -> bool {
        let x_goal = x <= epsilon;
        let x_above = x >= epsilon;
        let y_meets = y <= p_b;
        let y_above = y >= p_b;
        match self {
            Region::R1 => x_goal && y_above && y >= x,
            Region::R2 => x_above && y_above && y >= x,
            Region::R3 => y_above && y <= x,
            Region::R4 => x_goal && y_meets && y >= x,
            Region::R5 => x_goal && y_meets && y <= x,
            Region::R6 => x_above && y_meets && y >= x,
            Region::R7 => x_above && y_meets && y <= x,
        }
    }
}

/// A point mass of a bivariate prior, attributed to a region. Atoms on a
/// region boundary count toward the labelled region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateAtom {
    pub x: f64,
    pub y: f64,
    pub mass: f64,
    pub region: Region,
}

/// A finite-support joint prior on the unit square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateDiscretePrior {
    atoms: Vec<BivariateAtom>,
}

impl BivariateDiscretePrior {
    pub fn new(atoms: Vec<BivariateAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(CbiError::invalid("atoms", "prior needs at least one atom"));
        }
        for a in &atoms {
            if !((0.0..=1.0).contains(&a.x) && (0.0..=1.0).contains(&a.y)) {
                return Err(CbiError::invalid(
                    "atoms",
                    format!("({}, {}) outside the unit square", a.x, a.y),
                ));
            }
            if !(a.mass >= 0.0) {
                return Err(CbiError::invalid(
                    "atoms",
                    format!("negative mass {}", a.mass),
                ));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(CbiError::invalid(
                "atoms",
                format!("masses sum to {total}, not 1"),
            ));
        }
        Ok(BivariateDiscretePrior { atoms })
    }

    pub fn atoms(&self) -> &[BivariateAtom] {
        &self.atoms
    }

    /// Total mass per region, `M1..M7`.
    pub fn region_masses(&self) -> RegionMasses {
        let mut m = [0.0; 7];
        for a in &self.atoms {
            m[a.region.index()] += a.mass;
        }
        RegionMasses(m)
    }

    /// Checks region labels against coordinates and the marginal, cross and
    /// floor constraints.
    pub fn satisfies(&self, bk: &BivariateKnowledge, p_b: f64) -> bool {
        let pp = bk.marginal;
        let located = self.atoms.iter().all(|a| {
            a.region.contains_closure(a.x, a.y, pp.epsilon, p_b) && a.x >= pp.p_l && a.y >= pp.p_l
        });
        located && self.region_masses().satisfies(pp.theta, bk.phi)
    }
}

/// Masses of the seven regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionMasses(pub [f64; 7]);

impl RegionMasses {
    pub fn get(&self, r: Region) -> f64 {
        self.0[r.index()]
    }

    /// Nonnegative, sums to one, `M1+M4+M5 = theta`, `M3+M5+M7 = phi`.
    pub fn satisfies(&self, theta: f64, phi: f64) -> bool {
        let m = &self.0;
        let tol = 1e-12;
        m.iter().all(|&v| v >= -tol)
            && (m.iter().sum::<f64>() - 1.0).abs() <= tol
            && (m[0] + m[3] + m[4] - theta).abs() <= tol
            && (m[2] + m[4] + m[6] - phi).abs() <= tol
    }
}

/// The extremal prior attached to a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Univariate(DiscretePrior),
    Bivariate(BivariateDiscretePrior),
}

/// What [`AssessmentResult::value`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Confidence,
    Miles,
    Bound,
    Expectation,
}

/// A computed quantity together with the prior that produced it and the
/// inputs it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentResult {
    pub quantity: Quantity,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Input echo, as `(name, value)` pairs in a stable order.
    pub scenario: Vec<(String, f64)>,
}

impl AssessmentResult {
    pub fn new(quantity: Quantity, value: f64) -> Self {
        AssessmentResult {
            quantity,
            value,
            witness: None,
            scenario: Vec::new(),
        }
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_input(mut self, name: &str, value: f64) -> Self {
        self.scenario.push((name.to_string(), value));
        self
    }
}
