use cbi_core::fallacy::{misused_confidence, misused_expectation, worst_case_expected_rate};
use cbi_core::univariate::infimum_confidence;
use cbi_core::{posterior_mean_discrete, DiscretePrior, Observation, PartialPrior};

fn fatality() -> PartialPrior {
    PartialPrior::new(1e-15, 1.09e-10, 0.9).unwrap()
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Posterior mean of `{(eps, theta), (q, 1 - theta)}` written out directly,
/// with survival terms relative to the atom at `eps`.
fn direct_mean(pp: &PartialPrior, n: f64, q: f64) -> f64 {
    let rel_survival = (n * ((-q).ln_1p() - (-pp.epsilon).ln_1p())).exp();
    let upper = (1.0 - pp.theta) * rel_survival;
    (pp.epsilon * pp.theta + q * upper) / (pp.theta + upper)
}

/// Best point of a million-point log grid over `(eps, 1]`.
fn dense_maximum(pp: &PartialPrior, n: f64) -> (f64, f64, f64) {
    let grid = log_grid(pp.epsilon * (1.0 + 1e-9), 1.0, 1_000_000);
    let step = grid[1].ln() - grid[0].ln();
    let (q, v) =
        grid.iter()
            .map(|&q| (q, direct_mean(pp, n, q)))
            .fold(
                (0.0, f64::NEG_INFINITY),
                |a, b| if b.1 > a.1 { b } else { a },
            );
    (q, v, step)
}

#[test]
fn maximizer_matches_dense_grid() {
    for (pp, n) in [
        (fatality(), 1e8),
        (PartialPrior::new(1e-4, 1e-3, 0.5).unwrap(), 1e4),
        (fatality(), 3e10),
    ] {
        let w = worst_case_expected_rate(&pp, n).unwrap();
        let (q, v, step) = dense_maximum(&pp, n);
        assert!(
            ((w.expectation - v) / v).abs() < 1e-6,
            "n={n}: {} vs {v}",
            w.expectation
        );
        assert!(w.expectation >= v * (1.0 - 1e-12));
        assert!((w.q.ln() - q.ln()).abs() <= step, "n={n}: {} vs {q}", w.q);
        let witness =
            DiscretePrior::from_pairs(&[(pp.epsilon, pp.theta), (w.q, 1.0 - pp.theta)]).unwrap();
        assert_eq!(w.witness, witness);
        let mean = posterior_mean_discrete(&witness, Observation::failure_free(n)).unwrap();
        assert!(((mean - w.expectation) / mean).abs() < 1e-12);
    }
}

#[test]
fn no_evidence() {
    let pp = fatality();
    let w = worst_case_expected_rate(&pp, 0.0).unwrap();
    assert_eq!(w.q, 1.0);
    let e = misused_expectation(&pp, 0.0, 1.09e-8).unwrap();
    assert!(e <= w.expectation);
    assert_eq!(misused_confidence(&pp, 0.0, 1.09e-8).unwrap(), 0.9);
}

#[test]
fn conservative_mean_beats_feasible_priors() {
    let pp = fatality();
    let lower = [1e-15, 1e-12, 5e-11, 1.09e-10];
    let upper = [2e-10, 1e-9, 1e-8, 1e-6, 1e-3, 0.5, 1.0];
    for n in [0.0, 1e6, 1e8, 1e10] {
        let bound = worst_case_expected_rate(&pp, n).unwrap().expectation;
        for &a in &lower {
            for &b in &upper {
                for &c in upper.iter().filter(|&&c| c > b) {
                    let prior =
                        DiscretePrior::from_pairs(&[(a, 0.9), (b, 0.04), (c, 0.06)]).unwrap();
                    let mean =
                        posterior_mean_discrete(&prior, Observation::failure_free(n)).unwrap();
                    assert!(mean <= bound * (1.0 + 1e-9), "n={n} ({a}, {b}, {c})");
                }
            }
        }
    }
}

#[test]
fn conservative_mean_falls_with_evidence() {
    let pp = fatality();
    let values: Vec<f64> = log_grid(1e6, 1e12, 60)
        .into_iter()
        .map(|n| worst_case_expected_rate(&pp, n).unwrap().expectation)
        .collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0]));
}

/// Miles at which the mean-maximizing atom crosses `p`, by bisection in log n.
fn crossover(pp: &PartialPrior, p: f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if worst_case_expected_rate(pp, m.exp()).unwrap().q > p {
            a = m;
        } else {
            b = m;
        }
    }
    (0.5 * (a + b)).exp()
}

#[test]
fn misuse_is_optimistic_with_one_crossover() {
    let pp = fatality();
    let p = 1.09e-8;
    let grid = log_grid(1e6, 1e12, 50);
    let mut above = Vec::new();
    for &n in &grid {
        let w = worst_case_expected_rate(&pp, n).unwrap();
        let inf = infimum_confidence(&pp, Observation::failure_free(n), p).unwrap();
        let misused = misused_confidence(&pp, n, p).unwrap();
        assert!(misused >= inf - 1e-12, "n={n}");
        let e = misused_expectation(&pp, n, p).unwrap();
        assert!(e <= w.expectation * (1.0 + 1e-12), "n={n}");
        above.push(w.q > p);
    }
    let switches = above.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(switches, 1);
    assert!(above[0] && !above[above.len() - 1]);

    let i = above.iter().position(|&a| !a).unwrap();
    let n = crossover(&pp, p, grid[i - 1], grid[i]);
    let w = worst_case_expected_rate(&pp, n).unwrap();
    assert!(((w.q - p) / p).abs() < 1e-6);
    let inf = infimum_confidence(&pp, Observation::failure_free(n), p).unwrap();
    // just before the crossover the misused atom sits above p; the maximizer
    // is only located to about 1e-8 relative, so step back well past that
    let before = n * (1.0 - 1e-6);
    let misused = misused_confidence(&pp, before, p).unwrap();
    assert!((misused - inf).abs() < 1e-6, "{misused} vs {inf}");
    let e = misused_expectation(&pp, n, p).unwrap();
    assert!(((e - w.expectation) / e).abs() < 1e-6);
}

#[test]
fn misused_expectation_example() {
    let pp = fatality();
    let e = misused_expectation(&pp, 1e9, 1.09e-8).unwrap();
    assert!(e <= worst_case_expected_rate(&pp, 1e9).unwrap().expectation);
}
