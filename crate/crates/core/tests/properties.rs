use cbi_core::baselines::{
    binomial_tail_leq, classical_required_miles, regularized_incomplete_beta,
};
use cbi_core::bivariate::{infimum_confidence_bivariate, required_miles_b};
use cbi_core::fallacy::{misused_confidence, misused_expectation, worst_case_expected_rate};
use cbi_core::univariate::{infimum_confidence, required_miles};
use cbi_core::{
    posterior_confidence_bivariate, posterior_confidence_discrete, posterior_mean_discrete,
    BivariateAtom, BivariateDiscretePrior, BivariateKnowledge, DiscretePrior, Observation,
    PartialPrior, Region,
};
use proptest::prelude::*;

/// Point `t` of the way from `lo` to `hi` in log space.
fn log_lerp(lo: f64, hi: f64, t: f64) -> f64 {
    (lo.ln() + t * (hi.ln() - lo.ln())).exp().clamp(lo, hi)
}

fn partial_prior() -> impl Strategy<Value = PartialPrior> {
    (-11.0..-2.0f64, 0.5..5.0f64, 0.05..0.99f64).prop_map(|(goal, gap, theta)| {
        let epsilon = 10f64.powf(goal);
        PartialPrior::new(epsilon / 10f64.powf(gap), epsilon, theta).unwrap()
    })
}

/// Two atoms sharing `theta` on `[p_l, eps]` and two sharing the rest on
/// `(eps, 1]`.
fn feasible_prior(pp: &PartialPrior, t: [f64; 4], split: [f64; 2]) -> DiscretePrior {
    let (a, b) = (
        log_lerp(pp.p_l, pp.epsilon, t[0]),
        log_lerp(pp.p_l, pp.epsilon, t[1]),
    );
    let above = pp.epsilon * (1.0 + 1e-9);
    let (c, d) = (log_lerp(above, 1.0, t[2]), log_lerp(above, 1.0, t[3]));
    let mut pairs = vec![
        (a.min(b), pp.theta * split[0]),
        (a.max(b), pp.theta * (1.0 - split[0])),
        (c.min(d), (1.0 - pp.theta) * split[1]),
        (c.max(d), (1.0 - pp.theta) * (1.0 - split[1])),
    ];
    pairs.dedup_by(|x, y| {
        if x.0 == y.0 {
            y.1 += x.1;
            true
        } else {
            false
        }
    });
    DiscretePrior::from_pairs(&pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn infimum_lower_bounds_feasible_posteriors(
        pp in partial_prior(),
        t in prop::array::uniform4(0.0..=1.0f64),
        split in prop::array::uniform2(0.0..=1.0f64),
        k in 0u64..20,
        log_n in 0.0..13.0f64,
        bound_pos in 0.0..1.0f64,
    ) {
        let n = (k as f64).max(10f64.powf(log_n));
        let obs = Observation::new(k, n).unwrap();
        let p = log_lerp(pp.p_l, 0.5, bound_pos);
        let prior = feasible_prior(&pp, t, split);
        prop_assert!(prior.satisfies(&pp));
        let inf = infimum_confidence(&pp, obs, p).unwrap();
        prop_assert!((0.0..=1.0).contains(&inf));
        if p <= pp.epsilon {
            prop_assert_eq!(inf, 0.0);
        }
        let post = posterior_confidence_discrete(&prior, obs, p).unwrap();
        prop_assert!(post >= inf - 1e-9, "{} < {}", post, inf);
    }

    #[test]
    fn required_miles_round_trip(pp in partial_prior(), k in 0u64..30, c_pos in 0.0..1.0f64, p_pos in 0.01..1.0f64) {
        let c = pp.theta + (0.9999 - pp.theta) * c_pos;
        prop_assume!(c > pp.theta + 1e-6);
        let p = log_lerp(pp.epsilon, 0.5, p_pos);
        let n = required_miles(&pp, c, p, k).unwrap();
        prop_assert!(n >= k as f64);
        let back = infimum_confidence(&pp, Observation::new(k, n).unwrap(), p).unwrap();
        prop_assert!((back - c).abs() < 1e-6, "{} vs {}", back, c);
    }

    #[test]
    fn infimum_grows_with_clean_miles(pp in partial_prior(), a in 0.0..12.0f64, b in 0.0..12.0f64, p_pos in 0.01..1.0f64) {
        let p = log_lerp(pp.epsilon, 0.5, p_pos);
        let (lo, hi) = (10f64.powf(a.min(b)), 10f64.powf(a.max(b)));
        let at_lo = infimum_confidence(&pp, Observation::failure_free(lo), p).unwrap();
        let at_hi = infimum_confidence(&pp, Observation::failure_free(hi), p).unwrap();
        prop_assert!(at_hi >= at_lo - 1e-12);
    }

    #[test]
    fn pooling_when_b_is_never_worse(pp in partial_prior(), a in 0.0..12.0f64, b in 0.0..12.0f64, p_pos in 0.01..1.0f64) {
        let p_b = log_lerp(pp.epsilon, 0.5, p_pos);
        let bk = BivariateKnowledge::new(pp, 1.0).unwrap();
        let (n_a, n_b) = (10f64.powf(a), 10f64.powf(b));
        let joint = infimum_confidence_bivariate(&bk, n_a, n_b, p_b).unwrap();
        let single = infimum_confidence(&pp, Observation::failure_free(n_a + n_b), p_b).unwrap();
        prop_assert!((joint - single).abs() <= 1e-12 * single.max(1e-300), "{} vs {}", joint, single);
    }

    #[test]
    fn joint_infimum_lower_bounds_feasible_posteriors(
        pp in partial_prior(),
        phi in 0.0..=1.0f64,
        p_pos in 0.01..1.0f64,
        cut in prop::array::uniform4(0.0..=1.0f64),
        spots in prop::array::uniform14(0.0..=1.0f64),
        a in 0.0..12.0f64,
        b in 0.0..12.0f64,
    ) {
        let p_b = log_lerp(pp.epsilon, 0.5, p_pos);
        let bk = BivariateKnowledge::new(pp, phi).unwrap();
        let prior = feasible_joint_prior(&bk, p_b, cut, spots);
        prop_assert!(prior.satisfies(&bk, p_b));
        let (n_a, n_b) = (10f64.powf(a), 10f64.powf(b));
        let inf = infimum_confidence_bivariate(&bk, n_a, n_b, p_b).unwrap();
        let post = posterior_confidence_bivariate(&prior, n_a, n_b).unwrap();
        prop_assert!(post >= inf - 1e-9, "{} < {}", post, inf);
    }

    #[test]
    fn miles_of_b_reach_confidence(pp in partial_prior(), phi_pos in 0.01..=1.0f64, a in 0.0..11.0f64, p_pos in 0.01..1.0f64) {
        let phi = (1.0 - pp.theta) + pp.theta * phi_pos;
        let bk = BivariateKnowledge::new(pp, phi).unwrap();
        let p_b = log_lerp(pp.epsilon, 0.5, p_pos);
        let c = 0.95f64.max(pp.theta);
        let n_a = 10f64.powf(a);
        let n_b = required_miles_b(&bk, c, p_b, n_a).unwrap();
        prop_assert!(n_b >= 0.0);
        let reached = infimum_confidence_bivariate(&bk, n_a, n_b, p_b).unwrap();
        prop_assert!(reached >= c - 1e-6, "{} < {}", reached, c);
    }

    #[test]
    fn misuse_is_optimistic(pp in partial_prior(), log_n in 0.0..12.0f64, p_pos in 0.01..1.0f64) {
        let p = log_lerp(pp.epsilon, 0.5, p_pos);
        let n = 10f64.powf(log_n);
        let w = worst_case_expected_rate(&pp, n).unwrap();
        prop_assert!(w.q > pp.epsilon && w.q <= 1.0);
        let inf = infimum_confidence(&pp, Observation::failure_free(n), p).unwrap();
        prop_assert!(misused_confidence(&pp, n, p).unwrap() >= inf - 1e-9);
        prop_assert!(misused_expectation(&pp, n, p).unwrap() <= w.expectation * (1.0 + 1e-9));
    }

    #[test]
    fn conservative_mean_bounds_feasible_means(
        pp in partial_prior(),
        t in prop::array::uniform4(0.0..=1.0f64),
        split in prop::array::uniform2(0.0..=1.0f64),
        log_n in 0.0..12.0f64,
    ) {
        let n = 10f64.powf(log_n);
        let prior = feasible_prior(&pp, t, split);
        let mean = posterior_mean_discrete(&prior, Observation::failure_free(n)).unwrap();
        let bound = worst_case_expected_rate(&pp, n).unwrap().expectation;
        prop_assert!(mean <= bound * (1.0 + 1e-7), "{} > {}", mean, bound);
    }

    #[test]
    fn incomplete_beta_reflection(a in 0.1..500.0f64, b in 0.1..500.0f64, x in 0.01..0.99f64) {
        let lhs = regularized_incomplete_beta(a, b, x).unwrap();
        let rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn classical_miles_meet_confidence(c in 0.5..0.999f64, log_p in -9.0..-1.0f64, k in 0u64..10) {
        let p = 10f64.powf(log_p);
        let n = classical_required_miles(c, p, k).unwrap();
        let tail = binomial_tail_leq(k, n, p).unwrap();
        prop_assert!((tail - (1.0 - c)).abs() < 1e-9, "{} vs {}", tail, 1.0 - c);
    }
}

/// A joint prior with one atom per region. Region masses are drawn from the
/// constraint set; `spots` place the atoms inside their regions.
fn feasible_joint_prior(
    bk: &BivariateKnowledge,
    p_b: f64,
    cut: [f64; 4],
    spots: [f64; 14],
) -> BivariateDiscretePrior {
    let (theta, phi) = (bk.marginal.theta, bk.phi);
    let (p_l, eps) = (bk.marginal.p_l, bk.marginal.epsilon);
    let lo5 = (theta + phi - 1.0).max(0.0);
    let m5 = lo5 + cut[0] * (theta.min(phi) - lo5);
    let m1 = (theta - m5) * cut[1];
    let m4 = theta - m5 - m1;
    let m3 = (phi - m5) * cut[2];
    let m7 = phi - m5 - m3;
    let m2 = (1.0 - m1 - m3 - m4 - m5 - m7).max(0.0) * cut[3];
    let m6 = (1.0 - m1 - m2 - m3 - m4 - m5 - m7).max(0.0);
    let s = |i: usize| spots[i];
    let above = eps * (1.0 + 1e-9);
    let points = [
        // R1: x in [p_l, eps], y in [p_b, 1]
        (
            log_lerp(p_l, eps, s(0)),
            log_lerp(p_b, 1.0, s(1)),
            m1,
            Region::R1,
        ),
        // R2: x in (eps, 1], y >= max(x, p_b)
        {
            let x = log_lerp(above, 1.0, s(2));
            (x, log_lerp(x.max(p_b), 1.0, s(3)), m2, Region::R2)
        },
        // R3: y in [p_b, 1], x >= y
        {
            let y = log_lerp(p_b, 1.0, s(4));
            (log_lerp(y, 1.0, s(5)), y, m3, Region::R3)
        },
        // R4: x in [p_l, eps], y in [x, p_b]
        {
            let x = log_lerp(p_l, eps, s(6));
            (x, log_lerp(x, p_b, s(7)), m4, Region::R4)
        },
        // R5: x in [p_l, eps], y in [p_l, x]
        {
            let x = log_lerp(p_l, eps, s(8));
            (x, log_lerp(p_l, x, s(9)), m5, Region::R5)
        },
        // R6: x in (eps, p_b], y in [x, p_b]
        {
            let x = log_lerp(above, p_b, s(10));
            (x, log_lerp(x, p_b, s(11)), m6, Region::R6)
        },
        // R7: x in (eps, 1], y in [p_l, min(x, p_b)]
        {
            let x = log_lerp(above, 1.0, s(12));
            (x, log_lerp(p_l, x.min(p_b), s(13)), m7, Region::R7)
        },
    ];
    BivariateDiscretePrior::new(
        points
            .into_iter()
            .map(|(x, y, mass, region)| BivariateAtom { x, y, mass, region })
            .collect(),
    )
    .unwrap()
}
