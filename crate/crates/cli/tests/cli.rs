use std::process::{Command, Output};

use cbi_cli::{emit_curve, run, Axis, Mode, Report, Scenario};
use serde_json::Value;

fn cbi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_report(args: &[&str]) -> Report {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = cbi(&all);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report parses")
}

fn json_error(args: &[&str]) -> (i32, Value) {
    let out = cbi(args);
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).expect("error is JSON");
    (out.status.code().expect("exit code"), err)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn scenario(mode: Mode) -> Scenario {
    Scenario::default().resolve(mode)
}

#[test]
fn fatality_claim_needs_about_69_million_miles() {
    let r = json_report(&["q1"]);
    let miles = r.get("required_miles").unwrap();
    assert!(rel(miles, 6.9e7) < 0.01, "{miles}");
    assert!(rel(r.get("confidence_reached").unwrap(), 0.95) < 1e-9);
    assert!(r.witness.is_some());
}

#[test]
fn compare_rows_match_reference_table() {
    let r = json_report(&["compare"]);
    let table = r.table.clone().expect("compare has a table");
    let expected = [
        ("classical", 4.96e9),
        ("uniform", 6.36e9),
        ("jeffreys", 6.29e9),
        ("conservative", 7.89e10),
    ];
    assert_eq!(table.rows.len(), expected.len());
    for (row, (label, miles)) in table.rows.iter().zip(expected) {
        assert_eq!(row.label.as_deref(), Some(label));
        let got = row.values[0].unwrap();
        assert!(rel(got, miles) < 0.02, "{label}: {got}");
    }
    assert_eq!(r.get("failures"), Some(43.0));
}

#[test]
fn new_environment_with_weak_cross_confidence() {
    let r = json_report(&["q4", "--phi", "0.8"]);
    let miles = r.get("required_miles_b").unwrap();
    assert!(rel(miles, 1.77e8) < 0.01, "{miles}");
}

#[test]
fn bound_curve_orders_methods() {
    let s = Scenario {
        points: Some(12),
        from: Some(1.1e-9),
        ..scenario(Mode::Curve)
    };
    let table = emit_curve(&s, &s.sweep().unwrap()).unwrap();
    assert_eq!(
        table.columns,
        [
            "bound",
            "conservative_theta_0.1",
            "conservative_theta_0.9",
            "classical",
            "uniform",
            "jeffreys"
        ]
    );
    for row in &table.rows {
        let v: Vec<f64> = row.values.iter().map(|c| c.unwrap()).collect();
        // Weaker prior confidence needs more miles than the classical answer,
        // which needs more than the strong prior.
        assert!(v[1] > v[3] && v[3] > v[2], "{v:?}");
        assert!(v[3] > v[5]);
    }
    let miles: Vec<f64> = table.rows.iter().map(|r| r.values[2].unwrap()).collect();
    assert!(miles.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn bound_curve_blanks_bounds_at_the_goal() {
    let s = Scenario {
        points: Some(3),
        ..scenario(Mode::Curve)
    };
    let table = emit_curve(&s, &s.sweep().unwrap()).unwrap();
    assert_eq!(table.rows[0].values[1], None);
    assert!(table.rows[0].values[3].is_some());
    assert!(table.rows[1].values[1].is_some());
}

#[test]
fn compensation_curve_dips_near_n_star() {
    let s = Scenario {
        axis: Some(Axis::N1),
        points: Some(141),
        ..Scenario::default()
    }
    .resolve(Mode::Curve);
    let table = emit_curve(&s, &s.sweep().unwrap()).unwrap();
    let extra: Vec<(f64, f64)> = table
        .rows
        .iter()
        .map(|r| (r.values[0].unwrap(), r.values[3].unwrap()))
        .collect();
    let peak = (1..extra.len() - 1)
        .find(|&i| extra[i].1 > extra[i - 1].1 && extra[i].1 > extra[i + 1].1)
        .expect("a peak");
    let trough = (peak + 1..extra.len() - 1)
        .find(|&i| extra[i].1 < extra[i - 1].1 && extra[i].1 < extra[i + 1].1)
        .expect("a trough after the peak");
    assert!(
        (extra[trough].0.log10() - 1.064e11_f64.log10()).abs() < 0.1,
        "{}",
        extra[trough].0
    );
}

#[test]
fn terrace_only_with_strong_cross_confidence() {
    let s = Scenario {
        axis: Some(Axis::Na),
        points: Some(49),
        ..Scenario::default()
    }
    .resolve(Mode::Curve);
    let table = emit_curve(&s, &s.sweep().unwrap()).unwrap();
    let zeros = |col: usize| {
        table
            .rows
            .iter()
            .filter(|r| r.values[col] == Some(0.0))
            .count()
    };
    assert_eq!(zeros(1), 0);
    assert!(zeros(2) > 0);
    assert!(zeros(3) > zeros(2));
    // Without a terrace the requirement falls, then rises.
    let col: Vec<f64> = table.rows.iter().map(|r| r.values[1].unwrap()).collect();
    let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min < col[0] && min < col[col.len() - 1]);
}

#[test]
fn json_report_scenario_runs_again_identically() {
    let first = json_report(&["q3", "--n1", "2.5e9", "--theta", "0.8"]);
    let again = run(&first.scenario).unwrap().rounded();
    assert_eq!(first, again);
}

#[test]
fn scenario_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    std::fs::write(&path, r#"{"theta": 0.5, "bound": 2e-8, "k": 1}"#).unwrap();
    let path = path.to_str().unwrap();
    let from_file = json_report(&["q1", "--scenario", path]);
    let from_flags = json_report(&["q1", "--theta", "0.5", "--bound", "2e-8", "--k", "1"]);
    assert_eq!(from_file, from_flags);

    let overridden = json_report(&["q1", "--scenario", path, "--theta", "0.9"]);
    assert_eq!(overridden.scenario.theta, Some(0.9));
    assert_eq!(overridden.scenario.bound, Some(2e-8));

    let echoed = dir.path().join("echo.json");
    std::fs::write(&echoed, serde_json::to_string(&from_file.scenario).unwrap()).unwrap();
    assert_eq!(
        json_report(&["q1", "--scenario", echoed.to_str().unwrap()]),
        from_file
    );
}

#[test]
fn unknown_scenario_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"thetaa": 0.5}"#).unwrap();
    let (code, err) = json_error(&["q1", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(err["error"]["kind"], "parse");
    assert!(err["error"]["message"].as_str().unwrap().contains("thetaa"));
}

#[test]
fn infeasible_inputs_fail_with_json() {
    let (code, err) = json_error(&["q1", "--bound", "1e-10"]);
    assert_eq!(code, 1);
    assert_eq!(err["error"]["kind"], "infeasible_claim");
    assert_eq!(err["error"]["epsilon"], 1.09e-10);

    let (code, err) = json_error(&["q4", "--phi", "0.05"]);
    assert_eq!(code, 1);
    assert_eq!(err["error"]["kind"], "vacuous");

    let (code, err) = json_error(&["q1", "--theta", "1.5"]);
    assert_eq!(code, 2);
    assert_eq!(err["error"]["field"], "theta");

    let (code, err) = json_error(&["q1", "--pl", "0"]);
    assert_eq!(code, 2);
    assert_eq!(err["error"]["field"], "pl");

    let (code, err) = json_error(&["q1", "--no-such-flag"]);
    assert_eq!(code, 2);
    assert_eq!(err["error"]["kind"], "usage");
}

#[test]
fn repeated_runs_are_identical() {
    let args = [
        "oracle",
        "--trials",
        "5000",
        "--resolution",
        "16",
        "--seed",
        "11",
        "--format",
        "csv",
    ];
    let a = cbi(&args);
    let b = cbi(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn every_mode_renders_every_format() {
    for mode in ["q1", "q2", "q3", "q4", "q5", "compare", "fallacy"] {
        for format in ["table", "csv", "json"] {
            let out = cbi(&[mode, "--format", format]);
            assert!(out.status.success(), "{mode} {format}");
            assert!(!out.stdout.is_empty());
        }
    }
}
