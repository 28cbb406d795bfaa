//! End-to-end runs of the `nsqueeze` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn nsqueeze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsqueeze"))
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = nsqueeze(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn variances_follow_the_law() {
    let v = json(&["variances", "--n", "5", "--lambda", "-0.7"]);
    assert_eq!(v["schema_version"], 1);
    let x1 = v["var_x1"].as_f64().unwrap();
    let x2 = v["var_x2"].as_f64().unwrap();
    assert!((x1 - 1.4_f64.exp() / 4.0).abs() < 1e-12);
    assert!((x1 * x2 - 1.0 / 16.0).abs() < 1e-13);
}

#[test]
fn verify_passes_and_reports_every_check() {
    for n in ["2", "3", "4", "6"] {
        let v = json(&["verify", "--n", n, "--lambda", "0.8"]);
        assert_eq!(v["passed"], true);
        let checks = v["checks"].as_array().unwrap();
        assert!(checks.iter().all(|c| c["passed"] == true));
    }
    let v = json(&["verify", "--n", "3", "--lambda", "0.25", "--oracle", "--cutoff", "8"]);
    assert_eq!(v["passed"], true);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "oracle_pairs_vs_f"));
}

#[test]
fn failing_oracle_exits_one() {
    // cutoff 4 at λ = 1.5 leaks far past the default threshold
    let out = nsqueeze(&["verify", "--n", "2", "--lambda", "1.5", "--oracle", "--cutoff", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn bad_input_exits_two() {
    for args in [
        &["matrices", "--n", "1", "--lambda", "0.1"][..],
        &["matrices", "--n", "3", "--lambda", "400"],
        &["wigner", "--n", "2", "--lambda", "0.1", "--axes", "q1,q1"],
        &["wigner", "--n", "2", "--lambda", "0.1", "--axes", "q1,q5"],
        &["state", "--n", "2", "--lambda", "0.1", "--format", "csv"],
        &["frobnicate"],
    ] {
        let out = nsqueeze(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    assert!(nsqueeze(&["--help"]).status.success());
    assert!(nsqueeze(&["wigner", "--help"]).status.success());
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("slice.csv");
    let args = ["wigner", "--n", "3", "--lambda", "0.5", "--steps", "5", "--format", "csv"];
    let stdout = nsqueeze(&args).stdout;
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    let out = nsqueeze(&with_file);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn wigner_csv_layout() {
    let out = nsqueeze(&[
        "wigner", "--n", "2", "--lambda", "0.5", "--steps", "3,2", "--range-a", "-1,1",
        "--range-b", "0,2", "--format", "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert!(lines[0].starts_with("# schema_version=1"));
    assert_eq!(lines[1], "coord_a,coord_b,w");
    assert_eq!(lines.len(), 2 + 6);
    assert!(lines[2].starts_with("-1,0,"));
    assert!(lines[7].starts_with("1,2,"));
}

/// Strong squeezing at n = 2 concentrates the slice along q1 = -q2.
#[test]
fn wigner_ridge_is_anti_diagonal() {
    let v = json(&["wigner", "--n", "2", "--lambda", "1", "--steps", "3", "--range-a", "-1,1", "--range-b", "-1,1"]);
    let rows = v["rows"].as_array().unwrap();
    let at = |a: f64, b: f64| {
        rows.iter()
            .find(|r| r["coord_a"] == a && r["coord_b"] == b)
            .unwrap()["w"]
            .as_f64()
            .unwrap()
    };
    assert!(at(1.0, -1.0) > 1e3 * at(1.0, 1.0));
}

#[test]
fn identities_are_exact() {
    let v = json(&["identities", "--n", "8", "--l-max", "12"]);
    for row in v["power_sums"].as_array().unwrap() {
        assert_eq!(row["lhs"], row["rhs"]);
    }
}
