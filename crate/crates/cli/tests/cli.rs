use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strohhacker"))
        .args(args)
        .env("STROHHACKER_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

/// Data rows of a CSV body, skipping the `#` metadata lines and the header.
fn csv_rows(body: &str) -> Vec<Vec<String>> {
    body.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn t25_bounds_over_a_p_range() {
    let out = run(&["thresholds", "--theorem", "T25", "--p", "1..4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    assert!(body.starts_with("# strohhacker "));
    assert!(body.contains("# seed=1\n"));
    let bounds: Vec<String> = csv_rows(&body).into_iter().map(|r| r[4].clone()).collect();
    assert_eq!(bounds, ["0.500000000000", "0.707106781187", "0.866025403784", "1.00000000000"]);
}

#[test]
fn json_envelope_for_a_single_threshold() {
    let v = json(&["thresholds", "--theorem", "T31", "--p", "2", "--b", "2", "--beta", "1"]);
    assert_eq!(v["tool"], "strohhacker");
    assert_eq!(v["command"], "thresholds");
    assert_eq!(v["seed"], 1);
    let row = &v["results"][0];
    assert!((row["bound"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!(row["error"].is_null());
}

#[test]
fn empty_sweep_prints_only_the_header() {
    let out = run(&["thresholds", "--theorem", "T22", "--p", "3..2", "--beta", "0.3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(csv_rows(&stdout(&out)).is_empty());
}

#[test]
fn out_of_domain_parameters_become_error_rows() {
    let v = json(&["admissible", "--theorem", "T22", "--p", "1", "--beta", "1.5"]);
    let row = &v["results"][0];
    assert!(row["error"].as_str().unwrap().contains("beta"));
    assert!(row["sup"].is_null());
}

#[test]
fn admissible_output_carries_the_region_note() {
    let v = json(&["admissible", "--theorem", "T25", "--p", "1"]);
    assert!(v["note"].as_str().unwrap().contains("1 + rho^2"));
    assert_eq!(v["results"][0]["report"]["passed"], true);

    let out = run(&["admissible", "--theorem", "T25", "--p", "1", "--format", "csv"]);
    assert!(stdout(&out).lines().any(|l| l.starts_with("# note=")));
}

#[test]
fn infeasible_parameters_exit_with_three() {
    let out = run(&["verify", "--theorem", "T37", "--p", "1", "--b", "1.5", "--gamma", "0.1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["thresholds", "--bogus"][..],
        &["thresholds", "--theorem", "T99"],
        &["thresholds", "--format", "xml"],
        &["verify", "--theorem", "T22", "--p", "1", "--beta", "0.3", "--angles", "12"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn monomials_verify_every_default_case() {
    let out = run(&["verify", "--theorem", "all", "--p", "1..2", "--corpus", "monomials", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert!(!rows.is_empty());
    for row in &rows {
        assert_eq!(row[4], "Verified", "{row:?}");
        assert!(row[1].ends_with("Monomial-00"), "{row:?}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let manifest = dir.path().join("corpus.json");
    let base = ["verify", "--theorem", "T32", "--p", "1", "--b", "0.5", "--gamma", "0.4", "--seed", "7"];

    let mut args = base.to_vec();
    args.extend(["--output", first.to_str().unwrap(), "--corpus-out", manifest.to_str().unwrap()]);
    assert_eq!(run(&args).status.code(), Some(0));
    let mut args = base.to_vec();
    args.extend(["--output", second.to_str().unwrap()]);
    assert_eq!(run(&args).status.code(), Some(0));
    let a = std::fs::read(&first).unwrap();
    assert_eq!(a, std::fs::read(&second).unwrap());

    // replaying the saved manifest reproduces the reports
    let v: Value = serde_json::from_slice(&a).unwrap();
    let replay = json(&[&base[..], &["--corpus", manifest.to_str().unwrap()]].concat());
    assert_eq!(replay["results"]["reports"], v["results"]["reports"]);

    assert_eq!(v["seed"], 7);
    assert!(v["grid_fingerprint"].as_str().unwrap().contains("/m4096/"));
    assert_eq!(v["results"]["reports"].as_array().unwrap().len(), 20);
}

#[test]
fn warm_start_changes_only_the_start() {
    let base = ["sharpness", "--theorem", "T25", "--p", "1", "--budget", "40", "--format", "csv"];
    let cold = csv_rows(&stdout(&run(&base)));
    let warm = csv_rows(&stdout(&run(&[&base[..], &["--warm-start"]].concat())));
    assert_eq!(cold.len(), 1);
    assert_eq!(warm.len(), 1);
    assert_eq!(cold[0][0], warm[0][0]);
    assert_eq!(cold[0][1], "Monomial");
    assert_eq!(warm[0][1], "HalfPlaneKernel");
    assert_eq!(cold[0][2], "40");
    assert_eq!(warm[0][2], "40");
}

#[test]
fn params_file_mirrors_the_flags() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.json");
    std::fs::write(&params, r#"{"theorem": "T31", "p": [1, 2], "b": 0.5, "beta": 0.25, "format": "csv"}"#).unwrap();
    let from_file = run(&["--params", params.to_str().unwrap(), "thresholds"]);
    let from_flags = run(&[
        "thresholds", "--theorem", "T31", "--p", "1,2", "--b", "0.5", "--beta", "0.25", "--format", "csv",
    ]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_flags.stdout);

    // command-line flags win over the file
    let overridden = run(&["--params", params.to_str().unwrap(), "thresholds", "--p", "3"]);
    let rows = csv_rows(&stdout(&overridden));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], "3");

    std::fs::write(&params, "[1, 2]").unwrap();
    assert_eq!(run(&["--params", params.to_str().unwrap(), "thresholds"]).status.code(), Some(2));
}

#[test]
fn table_output_is_aligned() {
    let out = run(&["thresholds", "--theorem", "T25", "--p", "1..2", "--format", "table"]);
    let body = stdout(&out);
    let lines: Vec<&str> = body.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 3);
    let column = lines[0].find("bound").unwrap();
    assert_eq!(&lines[1][column..column + 3], "0.5");
    assert_eq!(&lines[2][column..column + 3], "0.7");
}
