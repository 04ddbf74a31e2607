use std::fs;
use std::process::Command;

use evpos_cli::{builtin_suite, execute, load_scenario, run_scenario, RunOptions};
use evpos_core::io::{matrix_from_csv, matrix_to_csv};
use evpos_core::Matrix;
use serde_json::Value;

fn evpos() -> Command {
    Command::new(env!("CARGO_BIN_EXE_evpos"))
}

fn suite_case(name: &str) -> evpos_cli::Scenario {
    builtin_suite().into_iter().find(|s| s.name == name).unwrap()
}

#[test]
fn summaries_are_deterministic() {
    for name in ["rotation-matrix", "perturbation-fragility", "neumann-antimax", "right-shift"] {
        let s = suite_case(name);
        let a = execute(&s, &RunOptions::default()).unwrap();
        let b = execute(&s, &RunOptions::default()).unwrap();
        assert_eq!(a.summary_json(), b.summary_json(), "{name}");
        assert_eq!(a.artifacts, b.artifacts, "{name}");
        assert_eq!(a.summary["schema"], "evpos/1");
    }
}

#[test]
fn written_matrices_reparse_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let s = suite_case("rotation-matrix");
    run_scenario(&s, dir.path(), &RunOptions::default()).unwrap();
    let back = matrix_from_csv(&fs::read_to_string(dir.path().join("matrix.csv")).unwrap()).unwrap();
    assert_eq!(back.to_row_major(), evpos_cli::rotation_example_matrix().to_row_major());
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let text = summary.to_string();
    assert!(!text.contains(dir.path().to_str().unwrap()));
}

#[test]
fn rotation_example_limit_is_one_third() {
    let r = execute(&suite_case("rotation-matrix"), &RunOptions::default()).unwrap();
    assert_eq!(r.summary["results"]["classification"], "EventuallyPositiveStrict");
    for p in r.summary["results"]["limit_projection"].as_array().unwrap() {
        assert!((p.as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    }
}

#[test]
fn analyze_matrix_command() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.csv");
    fs::write(&path, matrix_to_csv(&Matrix::zeros(3))).unwrap();
    let out = evpos().arg("analyze-matrix").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["classification"], "Positive");
    assert_eq!(v["results"]["t0"], 0.0);

    fs::write(&path, "1,2\n3\n").unwrap();
    let out = evpos().arg("analyze-matrix").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = evpos().arg("analyze-matrix").arg(dir.path().join("missing.csv")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_command_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("neumann.json");
    fs::write(
        &scenario,
        r#"{"name":"neumann","kind":"sweep-resolvent","input":{"operator":{"order":2,"bc":"Neumann","n":200}},
            "output_dir":"out"}"#,
    )
    .unwrap();
    let out = evpos().arg("run").arg(&scenario).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(v["results"]["left_window_verdict"], "UniformAntiMax");
    assert!(dir.path().join("out/sweep.csv").exists());
    assert_eq!(load_scenario(&scenario).unwrap().base_dir.as_deref(), Some(dir.path()));
}

#[test]
fn numerical_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    fs::write(
        &scenario,
        r#"{"name":"s","kind":"sweep-resolvent","input":{"matrix":{"rows":2,"cols":2,"entries":[0,0,0,-1]}},
            "parameters":{"lambda0":0,"window":0.9}}"#,
    )
    .unwrap();
    let out = evpos().arg("run").arg(&scenario).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("maxprinciple::resolvent_sign_sweep"));
}

#[test]
fn seed_override_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = evpos()
        .args(["suite", "--filter", "perturbation"])
        .arg("--out")
        .arg(dir.path())
        .env("EVPOS_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("perturbation-fragility/summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(v["results"]["seed"], 11);
    let bad = evpos().args(["suite", "--filter", "none"]).env("EVPOS_SEED", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
