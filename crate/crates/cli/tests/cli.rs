use std::fs;
use std::path::Path;
use std::process::Command;

use lshawkes_core::model::{local_bartlett, local_mean_density, LsHawkesModel};

const BIN: &str = env!("CARGO_BIN_EXE_lshawkes");

fn model_path() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/synthetic_model.json")
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().unwrap()
}

#[test]
fn theory_prints_full_precision() {
    let out = run(&[
        "theory",
        "--model",
        &model_path(),
        "--u",
        "0.5",
        "--omega",
        "0",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} ")))
            .unwrap()
            .parse()
            .unwrap()
    };
    let model = LsHawkesModel::load(model_path()).unwrap();
    assert_eq!(value("m1"), local_mean_density(&model, 0.5).unwrap());
    assert_eq!(value("gamma"), local_bartlett(&model, 0.5, 0.0).unwrap());
}

#[test]
fn usage_errors_exit_nonzero() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["theory", "--model", &model_path(), "--u", "0.5", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(run(&["--help"]).status.success());
    assert!(run(&["analyze", "--help"]).status.success());
}

#[test]
fn failures_give_one_line_diagnostics() {
    let out = run(&["theory", "--model", "/nonexistent/model.json", "--u", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error:"));
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let events = dir.path().join("e.csv");
    let ev = events.to_str().unwrap();
    let out = run(&[
        "simulate",
        "--model",
        &model_path(),
        "--horizon",
        "5000",
        "--seed",
        "42",
        "--out",
        ev,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&events).unwrap();
    assert!(text.starts_with("# horizon=5000"));
    assert!(text.contains("# seed=42"));

    let out = run(&[
        "estimate-density",
        "--events",
        ev,
        "--u0",
        "0.5",
        "--b1",
        "0.2",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["m1_hat"].as_f64().unwrap() > 0.0);

    let out = run(&[
        "estimate-spectrum",
        "--events",
        ev,
        "--u0",
        "0.5",
        "--omega0-hz",
        "0.02",
        "--b1",
        "0.2",
        "--b2-hz",
        "0.005",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["gamma_hat"].as_f64().unwrap() >= 0.0);

    let grid = dir.path().join("grid.csv");
    let out = run(&[
        "estimate-spectrum",
        "--events",
        ev,
        "--times",
        "0.2:0.8:4",
        "--freqs-hz",
        "0:0.1:3",
        "--bandwidths",
        "auto",
        "--beta",
        "1",
        "--out",
        grid.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(&grid).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().all(|l| l.split(',').count() == 4));
}

#[test]
fn strict_clock_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("days.csv");
    fs::write(&input, "day_id,time_s\n1,3.5\n1,40000\n").unwrap();
    let out = run(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));
}

#[test]
fn validate_freqbias_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = run(&[
        "validate",
        "--suite",
        "freqbias",
        "--model",
        &model_path(),
        "--u0",
        "0.5",
        "--omega0",
        "1",
        "--b2s",
        "0.1,0.05,0.025",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["suite"], "freqbias");
    assert_eq!(v["report"]["records"].as_array().unwrap().len(), 3);
}
