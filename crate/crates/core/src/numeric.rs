//! Log-space helpers and bracketing solvers shared by the assessment modules.
//!
//! Rates go down to 1e-15 and mileages up to 1e13, so every likelihood is
//! handled as a logarithm and only exponentiated inside ratios.

use crate::error::{CbiError, Result};

/// Iteration cap for every bisection in the crate.
pub const MAX_BISECTION_ITERS: usize = 200;

/// Relative bracket width at which root finds on miles and bounds stop.
/// Tighter than the 1e-9 the results are quoted to, so that differences of
/// two solved mileages (compensation miles) stay accurate.
pub const SOLVE_REL_TOL: f64 = 1e-12;

/// `ln(x^k (1-x)^(n-k))` with the limit conventions `0^0 = 1` and
/// `0 * ln 0 = 0`. An atom at `x = 0` with `k > 0` (or at `x = 1` with
/// `n > k`) has likelihood exactly zero, i.e. `-inf` here.
pub fn log_likelihood(x: f64, k: u64, n: f64) -> f64 {
    let kf = k as f64;
    let failures = if k == 0 { 0.0 } else { kf * x.ln() };
    let rest = n - kf;
    let survivals = if rest <= 0.0 {
        0.0
    } else {
        rest * (-x).ln_1p()
    };
    failures + survivals
}

/// `ln(sum(exp(v)))`, ignoring `-inf` terms. Returns `-inf` for an empty or
/// all-`-inf` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `exp(num) / (exp(num) + exp(other))` evaluated without overflow.
pub fn share(num: f64, other: f64) -> f64 {
    if num == f64::NEG_INFINITY {
        return 0.0;
    }
    if other == f64::NEG_INFINITY {
        return 1.0;
    }
    1.0 / (1.0 + (other - num).exp())
}

/// Natural log of a mass, with `ln 0 = -inf`.
pub fn ln_mass(m: f64) -> f64 {
    if m <= 0.0 {
        f64::NEG_INFINITY
    } else {
        m.ln()
    }
}

/// Finds the smallest `x` in `[lo, hi]` with `f(x) >= target` for a
/// nondecreasing `f`, assuming `f(lo) < target <= f(hi)`.
///
/// Stops when the bracket is narrower than `rel_tol * hi` or after
/// [`MAX_BISECTION_ITERS`] halvings. Returns the upper end of the final
/// bracket, so the result always satisfies `f(x) >= target`.
pub fn bisect_increasing<F>(mut f: F, mut lo: f64, mut hi: f64, target: f64, rel_tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    for _ in 0..MAX_BISECTION_ITERS {
        if hi - lo <= rel_tol * hi.abs() {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Doubles `start` until `f(x) >= target`. Errors when no such point exists
/// below `f64::MAX`.
pub fn expand_upper<F>(mut f: F, start: f64, target: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut hi = start.max(1.0);
    for _ in 0..2000 {
        if f(hi) >= target {
            return Ok(hi);
        }
        hi *= 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    Err(CbiError::NoSolution(format!(
        "target {target} not reached for any finite argument"
    )))
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_BISECTION_ITERS {
        if (b - a).abs() <= tol * (a.abs() + b.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `count` points log-spaced over `[lo, hi]`, both ends included exactly.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (count - 1) as f64;
            let mut out: Vec<f64> = (0..count).map(|i| (a + step * i as f64).exp()).collect();
            out[0] = lo;
            out[count - 1] = hi;
            out
        }
    }
}
