//! Classical and conjugate-prior comparators on the same Bernoulli evidence,
//! and the special functions they need.

use serde::{Deserialize, Serialize};

use crate::error::{CbiError, Result};
use crate::numeric::{bisect_increasing, expand_upper};
use crate::types::{validate_bound, validate_confidence, Observation};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

/// Remainder of Stirling's series, `ln Γ(x) - (x - 1/2) ln x + x - ln(2π)/2`,
/// accurate to double precision for `x >= 15`.
fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}

/// `ln B(a, b)`. When the larger argument is big, `ln Γ(b) - ln Γ(a + b)` is
/// formed directly from Stirling's series so that no two huge terms cancel.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    let (small, large) = if a <= b { (a, b) } else { (b, a) };
    if large < 15.0 {
        return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    }
    let sum = small + large;
    let ratio =
        -(large - 0.5) * (small / large).ln_1p() - small * sum.ln() + small + stirling_tail(large)
            - stirling_tail(sum);
    ln_gamma(small) + ratio
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// Relative error is around 1e-13 for results above about 1e-50, including
/// shapes up to 1e10 with `x` near the mean as in the conjugate baselines.
/// Deep-tail values lose a few more digits to the size of the log prefactor.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(CbiError::Domain(format!(
            "I_x(a, b) needs a, b > 0, got a = {a}, b = {b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(CbiError::Domain(format!(
            "I_x(a, b) needs x in [0, 1], got {x}"
        )));
    }
    Ok(inc_beta(a, b, x, 1.0 - x))
}

/// `I_x(a, b)` with `y = 1 - x` supplied by the caller so that whichever of
/// the two is small keeps full relative precision.
fn inc_beta(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let (ln_x, ln_y) = if x < 0.5 {
        (x.ln(), (-x).ln_1p())
    } else {
        ((-y).ln_1p(), y.ln())
    };
    if b == 1.0 {
        return (a * ln_x).exp();
    }
    if a == 1.0 {
        return -(b * ln_y).exp_m1();
    }
    if a <= 1.0 && b <= 1.0 {
        // small shapes: the classic fraction is well conditioned
        if x > (a + 1.0) / (a + b + 2.0) {
            return 1.0 - inc_beta(b, a, y, x);
        }
        return lentz_fraction(a, b, x) * (a * ln_x + b * ln_y - ln_beta(a, b)).exp() / a;
    }
    // step a shape above 1: I_x(a, b) = I_x(a + 1, b) + x^a y^b / (a B(a, b))
    if a <= 1.0 {
        let step = (a * ln_x + b * ln_y - a.ln() - ln_beta(a, b)).exp();
        return inc_beta(a + 1.0, b, x, y) + step;
    }
    if b <= 1.0 {
        let step = (a * ln_x + b * ln_y - b.ln() - ln_beta(a, b)).exp();
        return inc_beta(a, b + 1.0, x, y) - step;
    }
    let lambda = if a > b {
        (a + b) * y - b
    } else {
        a - (a + b) * x
    };
    if lambda < 0.0 {
        return 1.0 - scaled_fraction(b, a, y, x, ln_y, ln_x, -lambda);
    }
    scaled_fraction(a, b, x, y, ln_x, ln_y, lambda)
}

/// Continued fraction for `I_x(a, b)` with `a, b > 1` and
/// `lambda = a - (a + b) x >= 0`, in the form of DiDonato and Morris (ACM
/// TOMS 708, `BFRAC`). Written in terms of `lambda` and `y`, it keeps full
/// precision when `x` is within a few multiples of the mean and one shape is
/// huge.
#[allow(clippy::too_many_arguments)]
fn scaled_fraction(a: f64, b: f64, x: f64, y: f64, ln_x: f64, ln_y: f64, lambda: f64) -> f64 {
    const TOL: f64 = 1e-15;
    const MAX_TERMS: usize = 1_000_000;
    let front = (a * ln_x + b * ln_y - ln_beta(a, b)).exp();
    if front == 0.0 {
        return 0.0;
    }
    let c = 1.0 + lambda;
    let c0 = b / a;
    let c1 = 1.0 + 1.0 / a;
    let yp1 = y + 1.0;
    let (mut p, mut s) = (1.0, a + 1.0);
    let (mut an, mut bn, mut anp1, mut bnp1) = (0.0, 1.0, 1.0, c / c1);
    let mut r = c1 / c;
    for n in 1..=MAX_TERMS {
        let n = n as f64;
        let t = n / a;
        let w = n * (b - n) * x;
        let e = a / s;
        let alpha = p * (p + c0) * e * e * (w * x);
        let e = (1.0 + t) / (c1 + t + t);
        let beta = n + w / s + e * (c + n * yp1);
        p = 1.0 + t;
        s += 2.0;
        let next_a = alpha * an + beta * anp1;
        an = anp1;
        anp1 = next_a;
        let next_b = alpha * bn + beta * bnp1;
        bn = bnp1;
        bnp1 = next_b;
        let previous = r;
        r = anp1 / bnp1;
        if (r - previous).abs() <= TOL * r {
            break;
        }
        an /= bnp1;
        bn /= bnp1;
        anp1 = r;
        bnp1 = 1.0;
    }
    front * r
}

/// Continued fraction for the incomplete beta function, modified Lentz.
fn lentz_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const MAX_TERMS: usize = 100_000;
    let clamp = |v: f64| if v.abs() < TINY { TINY } else { v };
    let (sum, up, down) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - sum * x / up);
    let mut h = d;
    for m in 1..MAX_TERMS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let even = m * (b - m) * x / ((down + m2) * (a + m2));
        d = 1.0 / clamp(1.0 + even * d);
        c = clamp(1.0 + even / c);
        h *= d * c;
        let odd = -(a + m) * (sum + m) * x / ((a + m2) * (up + m2));
        d = 1.0 / clamp(1.0 + odd * d);
        c = clamp(1.0 + odd / c);
        let step = d * c;
        h *= step;
        if (step - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h
}

/// Standard normal quantile by Acklam's rational approximation (relative
/// error below 1.2e-9).
pub fn normal_quantile(prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(CbiError::Domain(format!(
            "normal quantile needs p in (0, 1), got {prob}"
        )));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const LOW: f64 = 0.024_25;
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let z = if prob < LOW {
        tail((-2.0 * prob.ln()).sqrt())
    } else if prob <= 1.0 - LOW {
        let q = prob - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (-prob).ln_1p()).sqrt())
    };
    Ok(z)
}

/// `P(K <= k)` for `K ~ Binomial(n, p)`, with real `n` through
/// `I_{1-p}(n - k, k + 1)`.
pub fn binomial_tail_leq(k: u64, n: f64, p: f64) -> Result<f64> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(CbiError::Domain(format!(
            "binomial tail needs n > 0, got {n}"
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(CbiError::Domain(format!(
            "binomial tail needs p in (0, 1), got {p}"
        )));
    }
    let kf = k as f64;
    if kf >= n {
        return Ok(1.0);
    }
    Ok(inc_beta(n - kf, kf + 1.0, 1.0 - p, p))
}

/// Smallest real `n` for which seeing at most `k` failures would have
/// probability at most `1 - c` if the rate were `p`. For `k = 0` this is
/// `ln(1 - c) / ln(1 - p)`.
pub fn classical_required_miles(c: f64, p: f64, k: u64) -> Result<f64> {
    validate_confidence(c)?;
    validate_bound(p)?;
    if k == 0 {
        return Ok((-c).ln_1p() / (-p).ln_1p());
    }
    let kf = k as f64;
    let rejects = |n: f64| {
        if n <= kf {
            -1.0
        } else {
            -inc_beta(n - kf, kf + 1.0, 1.0 - p, p)
        }
    };
    let target = -(1.0 - c);
    let hi = expand_upper(rejects, (kf + 1.0) / p, target)?;
    Ok(bisect_increasing(rejects, kf, hi, target, 0.0))
}

/// Normal-approximation sample size for showing a rate below `p0` when the
/// true rate is `r_true`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSampleSize {
    pub miles: f64,
    /// Expected failures `(z / delta)^2` over those miles.
    pub expected_failures: f64,
    /// `expected_failures` rounded to the nearest count.
    pub failures: u64,
}

/// Sample size from `delta = (p0 - r_true) / r_true` and the standard normal
/// `c`-quantile `z`: expected failures `(z / delta)^2`, miles that over
/// `r_true`.
pub fn classical_sample_size_power(r_true: f64, p0: f64, c: f64) -> Result<PowerSampleSize> {
    validate_confidence(c)?;
    if !(r_true > 0.0 && r_true < p0 && p0 < 1.0) {
        return Err(CbiError::Domain(format!(
            "power sample size needs 0 < r_true < p0 < 1, got r_true = {r_true}, p0 = {p0}"
        )));
    }
    let delta = (p0 - r_true) / r_true;
    let z = normal_quantile(c)?;
    let expected_failures = (z / delta).powi(2);
    Ok(PowerSampleSize {
        miles: expected_failures / r_true,
        expected_failures,
        failures: expected_failures.round() as u64,
    })
}

/// Shape parameters of a Beta prior on the failure rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub a: f64,
    pub b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(CbiError::invalid("a", format!("must be > 0, got {a}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(CbiError::invalid("b", format!("must be > 0, got {b}")));
        }
        Ok(BetaParams { a, b })
    }

    /// Beta(1, 1).
    pub fn uniform() -> Self {
        BetaParams { a: 1.0, b: 1.0 }
    }

    /// Beta(1/2, 1/2).
    pub fn jeffreys() -> Self {
        BetaParams { a: 0.5, b: 0.5 }
    }
}

/// Posterior `Pr(X <= p)` under a Beta prior: `I_p(a + k, b + n - k)`.
pub fn beta_posterior_confidence(prior: BetaParams, obs: Observation, p: f64) -> Result<f64> {
    let prior = BetaParams::new(prior.a, prior.b)?;
    let obs = obs.validate()?;
    validate_bound(p)?;
    let b = prior.b + obs.n - obs.k as f64;
    if b <= 0.0 {
        return Err(CbiError::Domain(format!(
            "posterior shape b + n - k = {b} is not positive"
        )));
    }
    Ok(inc_beta(prior.a + obs.k as f64, b, p, 1.0 - p))
}

/// Smallest real `n` with `beta_posterior_confidence >= c` after `k`
/// failures.
pub fn beta_required_miles(prior: BetaParams, c: f64, p: f64, k: u64) -> Result<f64> {
    validate_confidence(c)?;
    validate_bound(p)?;
    let prior = BetaParams::new(prior.a, prior.b)?;
    let kf = k as f64;
    let confidence = |n: f64| inc_beta(prior.a + kf, prior.b + n - kf, p, 1.0 - p);
    if confidence(kf) >= c {
        return Ok(kf);
    }
    let hi = expand_upper(confidence, (kf + 1.0) / p, c)?;
    // bisect to machine precision; the uniform-prior answer is compared with
    // the classical one to the unit
    Ok(bisect_increasing(confidence, kf, hi, c, 0.0))
}
