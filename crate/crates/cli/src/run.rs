//! Scenario evaluation.

use cbi_core::baselines::{
    beta_required_miles, classical_required_miles, classical_sample_size_power, BetaParams,
};
use cbi_core::bivariate::{
    growth_check, infimum_confidence_bivariate, optimal_n_a, required_miles_b,
    solve_required_miles_b, worst_case_joint_prior,
};
use cbi_core::fallacy::{misused_confidence, misused_expectation, worst_case_expected_rate};
use cbi_core::oracle::{
    grid_min_confidence_bivariate, grid_min_confidence_univariate, monte_carlo_classical_semantics,
    GridSpec,
};
use cbi_core::univariate::{
    best_supported_bound, compensation, infimum_confidence, n_star, p_star, solve_required_miles,
    worst_case_prior,
};
use cbi_core::{BivariateKnowledge, CbiError, Observation, PartialPrior, Witness};

use crate::error::CliError;
use crate::report::{Report, Row, Table};
use crate::scenario::{require, Axis, Mode, Scenario, Sweep};

type Result<T> = std::result::Result<T, CliError>;

/// Runs `scenario` in its own mode (`q1` when unset) after filling defaults.
pub fn run(scenario: &Scenario) -> Result<Report> {
    let mode = scenario.mode.unwrap_or(Mode::Q1);
    let s = scenario.clone().resolve(mode);
    match mode {
        Mode::Q1 => q1(s),
        Mode::Q2 => q2(s),
        Mode::Q3 => q3(s),
        Mode::Q4 => q4(s),
        Mode::Q5 => q5(s),
        Mode::Compare => compare(s),
        Mode::Fallacy => fallacy(s),
        Mode::Oracle => oracle(s),
        Mode::Curve => {
            let sweep = s.sweep()?;
            let table = emit_curve(&s, &sweep)?;
            let mut r = Report::new(s);
            r.table = Some(table);
            Ok(r)
        }
    }
}

fn partial_prior(s: &Scenario) -> Result<PartialPrior> {
    PartialPrior::new(
        require(s.pl, "pl")?,
        require(s.epsilon, "epsilon")?,
        require(s.theta, "theta")?,
    )
    .map_err(|e| match e {
        CbiError::InvalidParameter {
            field: "p_l",
            constraint,
        } => CliError::scenario("pl", constraint),
        other => other.into(),
    })
}

fn knowledge(s: &Scenario) -> Result<BivariateKnowledge> {
    Ok(BivariateKnowledge::new(
        partial_prior(s)?,
        require(s.phi, "phi")?,
    )?)
}

fn q1(s: Scenario) -> Result<Report> {
    let pp = partial_prior(&s)?;
    let (c, p, k) = (
        require(s.confidence, "confidence")?,
        require(s.bound, "bound")?,
        require(s.k, "k")?,
    );
    let solution = solve_required_miles(&pp, c, p, k)?;
    let obs = Observation::new(k, solution.miles)?;
    let reached = infimum_confidence(&pp, obs, p)?;
    let witness = worst_case_prior(&pp, obs, p)?;
    let classical = classical_required_miles(c, p, k)?;
    let mut r = Report::new(s);
    r.value("required_miles", solution.miles);
    if let Some(closed) = solution.closed_form {
        r.value("closed_form_miles", closed);
    }
    r.value("confidence_reached", reached)
        .value("classical_miles", classical);
    r.witness = Some(Witness::Univariate(witness.prior));
    Ok(r)
}

fn q2(s: Scenario) -> Result<Report> {
    let pp = partial_prior(&s)?;
    let c = require(s.confidence, "confidence")?;
    let obs = Observation::new(require(s.k, "k")?, require(s.n, "n")?)?;
    let bound = best_supported_bound(&pp, c, obs)?;
    let witness = worst_case_prior(&pp, obs, bound)?;
    let mut r = Report::new(s);
    r.value("supported_bound", bound)
        .value("confidence_reached", infimum_confidence(&pp, obs, bound)?);
    r.witness = Some(Witness::Univariate(witness.prior));
    Ok(r)
}

fn q3(s: Scenario) -> Result<Report> {
    let pp = partial_prior(&s)?;
    let c = require(s.confidence, "confidence")?;
    let n1 = require(s.n1, "n1")?;
    let comp = compensation(&pp, c, n1)?;
    let witness = worst_case_prior(&pp, Observation::new(1, comp.total_miles)?, comp.bound)?;
    let mut r = Report::new(s);
    r.value("supported_bound", comp.bound)
        .value("total_miles", comp.total_miles)
        .value("extra_miles", comp.extra_miles)
        .value("n_star", n_star(&pp))
        .value("asymptotic_extra_miles", 1.0 / pp.epsilon);
    match p_star(&pp, c) {
        Ok(v) => {
            r.value("p_star", v);
        }
        Err(e) => r.notes.push(format!("p_star not reported: {e}")),
    }
    r.witness = Some(Witness::Univariate(witness.prior));
    Ok(r)
}

fn q4(s: Scenario) -> Result<Report> {
    let bk = knowledge(&s)?;
    let (c, p_b, n_a) = (
        require(s.confidence, "confidence")?,
        require(s.bound, "bound")?,
        require(s.na, "na")?,
    );
    let miles = solve_required_miles_b(&bk, c, p_b, n_a)?;
    let joint = worst_case_joint_prior(&bk, p_b)?;
    let mut r = Report::new(s);
    r.value("required_miles_b", miles.miles)
        .value("unclamped_miles_b", miles.unclamped)
        .value("root_miles_b", miles.root)
        .value(
            "confidence_reached",
            infimum_confidence_bivariate(&bk, n_a, miles.miles, p_b)?,
        );
    if miles.miles == 0.0 {
        r.notes
            .push("miles of the old environment already support the claim".into());
    }
    r.witness = Some(Witness::Bivariate(joint.prior));
    Ok(r)
}

fn q5(s: Scenario) -> Result<Report> {
    let bk = knowledge(&s)?;
    let (c, p_b) = (
        require(s.confidence, "confidence")?,
        require(s.bound, "bound")?,
    );
    let best = optimal_n_a(&bk, p_b)?;
    let at_best = required_miles_b(&bk, c, p_b, best)?;
    let growth = growth_check(&bk, c, p_b, &[best])?;
    let mut r = Report::new(s);
    r.value("optimal_miles_a", best)
        .value("required_miles_b", at_best)
        .value("total_miles", best + at_best)
        .value("asymptotic_slope", growth.asymptotic_slope);
    r.witness = Some(Witness::Bivariate(worst_case_joint_prior(&bk, p_b)?.prior));
    Ok(r)
}

fn compare(s: Scenario) -> Result<Report> {
    let pp = partial_prior(&s)?;
    let (c, rate, reference) = (
        require(s.confidence, "confidence")?,
        require(s.bound, "bound")?,
        require(s.reference, "reference")?,
    );
    let power = classical_sample_size_power(rate, reference, c)?;
    let k = power.failures;
    let rows = [
        ("classical", power.miles),
        (
            "uniform",
            beta_required_miles(BetaParams::uniform(), c, rate, k)?,
        ),
        (
            "jeffreys",
            beta_required_miles(BetaParams::jeffreys(), c, rate, k)?,
        ),
        ("conservative", solve_required_miles(&pp, c, rate, k)?.miles),
    ];
    let mut r = Report::new(s);
    r.value("expected_failures", power.expected_failures)
        .value("failures", k as f64);
    r.table = Some(Table {
        columns: vec!["miles".into()],
        rows: rows
            .into_iter()
            .map(|(label, miles)| Row {
                label: Some(label.into()),
                values: vec![Some(miles)],
            })
            .collect(),
    });
    Ok(r)
}

fn fallacy(s: Scenario) -> Result<Report> {
    let pp = partial_prior(&s)?;
    let (n, p) = (require(s.n, "n")?, require(s.bound, "bound")?);
    let w = worst_case_expected_rate(&pp, n)?;
    let mut r = Report::new(s);
    r.value("worst_case_expected_rate", w.expectation)
        .value("mean_maximizing_location", w.q)
        .value("misused_expectation", misused_expectation(&pp, n, p)?)
        .value(
            "infimum_confidence",
            infimum_confidence(&pp, Observation::failure_free(n), p)?,
        )
        .value("misused_confidence", misused_confidence(&pp, n, p)?);
    r.witness = Some(Witness::Univariate(w.witness));
    Ok(r)
}

fn oracle(s: Scenario) -> Result<Report> {
    let pp = partial_prior(&s)?;
    let p = require(s.bound, "bound")?;
    let obs = Observation::new(require(s.k, "k")?, require(s.n, "n")?)?;
    let grid = GridSpec::new(
        require(s.resolution, "resolution")?,
        require(s.beta_steps, "beta_steps")?,
    )?;
    let inf = infimum_confidence(&pp, obs, p)?;
    let found = grid_min_confidence_univariate(&pp, obs, p, grid)?;
    let mut r = Report::new(s.clone());
    r.value("infimum_confidence", inf)
        .value("grid_min_confidence", found.confidence)
        .value("grid_gap", found.confidence - inf);
    if s.phi.is_some() {
        let bk = knowledge(&s)?;
        let (n_a, n_b) = (require(s.na, "na")?, require(s.nb, "nb")?);
        let joint_inf = infimum_confidence_bivariate(&bk, n_a, n_b, p)?;
        let joint = grid_min_confidence_bivariate(&bk, n_a, n_b, p, grid)?;
        r.value("bivariate_infimum_confidence", joint_inf)
            .value("bivariate_grid_min_confidence", joint.confidence)
            .value("bivariate_grid_gap", joint.confidence - joint_inf);
    }
    let (rate, trials, seed) = (
        require(s.sim_rate, "sim_rate")?,
        require(s.trials, "trials")?,
        require(s.seed, "seed")?,
    );
    if trials > 0 {
        let c = require(s.confidence, "confidence")?;
        let sim = monte_carlo_classical_semantics(rate, c, trials, seed)?;
        r.value("simulated_miles", sim.miles)
            .value("pass_fraction", sim.pass_fraction)
            .value("expected_pass_fraction", sim.expected)
            .value("standard_error", sim.standard_error)
            .value(
                "z_score",
                (sim.pass_fraction - sim.expected) / sim.standard_error,
            );
    }
    r.witness = Some(Witness::Univariate(found.prior));
    Ok(r)
}

/// `Some(value)`, or `None` for inputs that have no finite answer.
fn cell(result: std::result::Result<f64, CbiError>) -> Result<Option<f64>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(
            CbiError::InfeasibleClaim { .. }
            | CbiError::NoSolution(_)
            | CbiError::UnsupportedRegime(_)
            | CbiError::Vacuous { .. }
            | CbiError::Domain(_),
        ) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn label(prefix: &str, v: f64) -> String {
    format!("{prefix}_{v}")
}

/// One row per sweep point: the swept value, then each method's output.
/// Other inputs come from `scenario`, which should be resolved.
pub fn emit_curve(scenario: &Scenario, sweep: &Sweep) -> Result<Table> {
    let s = scenario;
    let pp = partial_prior(s)?;
    let c = require(s.confidence, "confidence")?;
    let p = require(s.bound, "bound")?;
    let k = s.k.unwrap_or(0);
    let xs = sweep.values();
    let with_theta = |theta: f64| PartialPrior::new(pp.p_l, pp.epsilon, theta);
    let mut columns = vec![axis_name(sweep.axis).to_string()];
    let mut rows = Vec::with_capacity(xs.len());
    match sweep.axis {
        Axis::Bound => {
            let thetas = s.thetas.clone().unwrap_or_else(|| vec![pp.theta]);
            let priors = thetas
                .iter()
                .map(|&t| with_theta(t))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            columns.extend(thetas.iter().map(|&t| label("conservative_theta", t)));
            columns.extend(["classical", "uniform", "jeffreys"].map(String::from));
            for &x in &xs {
                let mut values = vec![Some(x)];
                for prior in &priors {
                    values.push(cell(solve_required_miles(prior, c, x, k).map(|m| m.miles))?);
                }
                values.push(cell(classical_required_miles(c, x, k))?);
                values.push(cell(beta_required_miles(BetaParams::uniform(), c, x, k))?);
                values.push(cell(beta_required_miles(BetaParams::jeffreys(), c, x, k))?);
                rows.push(values);
            }
        }
        Axis::N1 => {
            columns.extend(["supported_bound", "total_miles", "extra_miles"].map(String::from));
            for &x in &xs {
                let row = match compensation(&pp, c, x) {
                    Ok(r) => vec![
                        Some(x),
                        Some(r.bound),
                        Some(r.total_miles),
                        Some(r.extra_miles),
                    ],
                    Err(e) => {
                        cell(Err(e))?;
                        vec![Some(x), None, None, None]
                    }
                };
                rows.push(row);
            }
        }
        Axis::Na => {
            let phis = s
                .phis
                .clone()
                .unwrap_or_else(|| s.phi.into_iter().collect());
            if phis.is_empty() {
                return Err(CliError::scenario(
                    "phis",
                    "at least one value needed for the na axis",
                ));
            }
            let knowledge = phis
                .iter()
                .map(|&phi| BivariateKnowledge::new(pp, phi))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            columns.extend(phis.iter().map(|&phi| label("miles_b_phi", phi)));
            for &x in &xs {
                let mut values = vec![Some(x)];
                for bk in &knowledge {
                    values.push(cell(required_miles_b(bk, c, p, x))?);
                }
                rows.push(values);
            }
        }
        Axis::N => {
            columns.extend(
                [
                    "infimum_confidence",
                    "misused_confidence",
                    "worst_case_expected_rate",
                    "misused_expectation",
                    "mean_maximizing_location",
                ]
                .map(String::from),
            );
            for &x in &xs {
                let w = worst_case_expected_rate(&pp, x)?;
                rows.push(vec![
                    Some(x),
                    cell(infimum_confidence(&pp, Observation::failure_free(x), p))?,
                    cell(misused_confidence(&pp, x, p))?,
                    Some(w.expectation),
                    cell(misused_expectation(&pp, x, p))?,
                    Some(w.q),
                ]);
            }
        }
        Axis::Confidence => {
            columns.extend(["conservative", "classical", "uniform", "jeffreys"].map(String::from));
            for &x in &xs {
                rows.push(vec![
                    Some(x),
                    cell(solve_required_miles(&pp, x, p, k).map(|m| m.miles))?,
                    cell(classical_required_miles(x, p, k))?,
                    cell(beta_required_miles(BetaParams::uniform(), x, p, k))?,
                    cell(beta_required_miles(BetaParams::jeffreys(), x, p, k))?,
                ]);
            }
        }
        Axis::Theta => {
            columns.push("conservative".into());
            for &x in &xs {
                let prior = with_theta(x)?;
                rows.push(vec![
                    Some(x),
                    cell(solve_required_miles(&prior, c, p, k).map(|m| m.miles))?,
                ]);
            }
        }
    }
    Ok(Table {
        columns,
        rows: rows
            .into_iter()
            .map(|values| Row {
                label: None,
                values,
            })
            .collect(),
    })
}

fn axis_name(axis: Axis) -> &'static str {
    match axis {
        Axis::Bound => "bound",
        Axis::N1 => "n1",
        Axis::Na => "na",
        Axis::N => "n",
        Axis::Confidence => "confidence",
        Axis::Theta => "theta",
    }
}
