use cbi_core::bivariate::infimum_confidence_bivariate;
use cbi_core::oracle::{
    grid_min_confidence_bivariate, grid_min_confidence_univariate, monte_carlo_classical_semantics,
    GridSpec,
};
use cbi_core::univariate::infimum_confidence;
use cbi_core::{BivariateKnowledge, Observation, PartialPrior};

fn fatality(theta: f64) -> PartialPrior {
    PartialPrior::new(1e-15, 1.09e-10, theta).unwrap()
}

#[test]
fn univariate_grid_certifies_infimum() {
    let cases = [
        (fatality(0.9), Observation::failure_free(6.92e7), 1.09e-8),
        (fatality(0.9), Observation::new(1, 3.88e9).unwrap(), 4.12e-9),
        (fatality(0.5), Observation::new(3, 2e10).unwrap(), 1e-9),
        (
            PartialPrior::new(1e-4, 1e-3, 0.5).unwrap(),
            Observation::new(2, 1500.0).unwrap(),
            5e-3,
        ),
    ];
    for (pp, obs, p) in cases {
        let inf = infimum_confidence(&pp, obs, p).unwrap();
        let mut grid = GridSpec::new(16, 8).unwrap();
        let mut last = f64::INFINITY;
        for _ in 0..4 {
            let g = grid_min_confidence_univariate(&pp, obs, p, grid).unwrap();
            assert!(
                g.confidence >= inf - 1e-9,
                "{obs:?}: {} < {inf}",
                g.confidence
            );
            assert!(g.confidence <= last + 1e-15);
            assert!(g.prior.satisfies(&pp));
            last = g.confidence;
            grid = grid.doubled();
        }
        assert!(last - inf < 1e-3, "{obs:?}: {last} vs {inf}");
    }
}

#[test]
fn univariate_grid_below_goal() {
    let pp = fatality(0.9);
    let g = grid_min_confidence_univariate(
        &pp,
        Observation::failure_free(1e9),
        1e-11,
        GridSpec::default(),
    )
    .unwrap();
    assert!(g.confidence < 1e-9);
}

#[test]
fn bivariate_grid_certifies_infimum() {
    let pp = fatality(0.9);
    for (phi, n_a, n_b) in [(0.99, 6.9e7, 1.9e7), (0.8, 6.9e7, 1.7e8), (0.95, 1e9, 1e8)] {
        let bk = BivariateKnowledge::new(pp, phi).unwrap();
        let inf = infimum_confidence_bivariate(&bk, n_a, n_b, 1.09e-8).unwrap();
        let mut grid = GridSpec::new(8, 8).unwrap();
        let mut last = f64::INFINITY;
        for _ in 0..3 {
            let g = grid_min_confidence_bivariate(&bk, n_a, n_b, 1.09e-8, grid).unwrap();
            assert!(g.confidence >= inf - 1e-9);
            assert!(g.confidence <= last + 1e-15);
            assert!(g.prior.satisfies(&bk, 1.09e-8));
            last = g.confidence;
            grid = grid.doubled();
        }
        assert!(last - inf < 5e-3, "phi={phi}: {last} vs {inf}");
    }
}

#[test]
fn bivariate_grid_reduces_to_univariate() {
    let pp = fatality(0.9);
    let bk = BivariateKnowledge::new(pp, 1.0).unwrap();
    let grid = GridSpec::new(32, 8).unwrap();
    let joint = grid_min_confidence_bivariate(&bk, 3e7, 4e7, 1.09e-8, grid).unwrap();
    let single =
        grid_min_confidence_univariate(&pp, Observation::failure_free(7e7), 1.09e-8, grid).unwrap();
    let inf = infimum_confidence(&pp, Observation::failure_free(7e7), 1.09e-8).unwrap();
    assert!((joint.confidence - single.confidence).abs() < 1e-3);
    assert!(joint.confidence >= inf - 1e-9 && single.confidence >= inf - 1e-9);
}

#[test]
fn simulation_matches_classical_promise() {
    for (p, c) in [(1e-3, 0.95), (0.5, 0.9), (0.5, 0.95)] {
        let r = monte_carlo_classical_semantics(p, c, 100_000, 7).unwrap();
        assert!(
            (r.pass_fraction - r.expected).abs() <= 3.0 * r.standard_error,
            "p={p} c={c}: {} vs {}",
            r.pass_fraction,
            r.expected
        );
    }
}

#[test]
fn simulation_is_reproducible() {
    let a = monte_carlo_classical_semantics(1e-2, 0.9, 20_000, 42).unwrap();
    let b = monte_carlo_classical_semantics(1e-2, 0.9, 20_000, 42).unwrap();
    let c = monte_carlo_classical_semantics(1e-2, 0.9, 20_000, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.pass_fraction, c.pass_fraction);
}

#[test]
fn simulation_without_miles_always_passes() {
    let r = monte_carlo_classical_semantics(0.1, 1e-9, 10_000, 1).unwrap();
    assert!(r.miles < 1e-6);
    assert_eq!(r.pass_fraction, 1.0);
}
