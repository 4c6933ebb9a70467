//! End-to-end tests of the `fjkkt` binary: exit codes, JSON shape, and the
//! round trip from an emitted JSON certificate back into the verifier.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fjkkt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn certify_circle_exit_zero_with_exact_mu() {
    let output = run(&[
        "certify",
        data("circle.txt").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let json = stdout_json(&output);
    assert_eq!(json["status"], "certified");
    assert_eq!(json["mu"][0], "-1/2");
    assert_eq!(json["lambda"][0], "1");
    for flag in ["a", "b", "c", "d", "e"] {
        assert_eq!(json["flags"][flag], true, "flag {flag}");
    }
    assert_eq!(json["qualifications"]["licq"], true);
    assert_eq!(json["qualifications"]["mfcq"], "holds");
    assert_eq!(json["residuals"]["stationarity_exact"], "0");
}

#[test]
fn certify_interior_nonstationary_exit_one() {
    let output = run(&[
        "certify",
        data("interior_refuted.txt").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(1));
    let json = stdout_json(&output);
    assert_eq!(json["status"], "refuted");
}

#[test]
fn certify_infeasible_point_exit_two() {
    let output = run(&[
        "certify",
        data("circle.txt").to_str().unwrap(),
        "--point",
        "x = 2, y = 0",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn certify_missing_point_exit_three() {
    let output = run(&["certify", data("no_point.txt").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("point"), "{stderr}");
}

#[test]
fn certify_missing_file_exit_three() {
    let output = run(&["certify", "/nonexistent/problem.txt"]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn certify_dependent_equalities() {
    let output = run(&[
        "certify",
        data("dependent.txt").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let json = stdout_json(&output);
    assert_eq!(json["regime"], "dependent-equalities");
    assert_eq!(json["qualifications"]["licq"], false);
}

#[test]
fn json_certificate_round_trips_into_the_verifier() {
    let output = run(&[
        "certify",
        data("boundary.txt").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let json = stdout_json(&output);

    let text = std::fs::read_to_string(data("boundary.txt")).unwrap();
    let (problem, point) = fjkkt::problem::load_problem(&text).unwrap();
    let x = point.unwrap();

    let lambda: Vec<fjkkt::Rat> = json["lambda"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| fjkkt::rational::parse_rat(v.as_str().unwrap()).unwrap())
        .collect();
    let mu: Vec<fjkkt::Rat> = json["mu"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| fjkkt::rational::parse_rat(v.as_str().unwrap()).unwrap())
        .collect();
    let certificate = fjkkt::engine::FjCertificate {
        lambda,
        mu,
        normalization: fjkkt::engine::Normalization::MaxNormOne,
        regime: fjkkt::engine::Regime::Direct,
        flags: Default::default(),
    };
    let report = fjkkt::engine::verify_certificate(
        &problem,
        &x,
        &certificate,
        &fjkkt::engine::Tolerances::default(),
    )
    .unwrap();
    assert!(report.pass, "{report:?}");
}

#[test]
fn identical_runs_are_byte_identical() {
    let path = data("circle.txt");
    let args = [
        "certify",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--seed",
        "7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn farkas_combination_text() {
    let output = run(&["farkas", data("farkas_combination.txt").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert_eq!(stdout.trim(), "combination: 1, 1");
}

#[test]
fn farkas_separator_verifies() {
    let output = run(&[
        "farkas",
        data("farkas_separator.txt").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let json = stdout_json(&output);
    assert_eq!(json["variant"], "separator");
    // Any valid separator is accepted; check it against the instance.
    let x: Vec<fjkkt::Rat> = json["separator"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| fjkkt::rational::parse_rat(v.as_str().unwrap()).unwrap())
        .collect();
    let phi = fjkkt::LinFunc::from_integers(&[1, 0]);
    let a = fjkkt::LinFunc::from_integers(&[0, 1]);
    let cert = fjkkt::ConeCertificate::Separator { x };
    assert!(cert.verify(&[phi], &a));
}

#[test]
fn farkas_ragged_rows_exit_three() {
    let output = run(&["farkas", data("farkas_ragged.txt").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("ragged"), "{stderr}");
}

#[test]
fn qualify_reports_mfcq_witness() {
    let output = run(&[
        "qualify",
        data("boundary.txt").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let json = stdout_json(&output);
    assert_eq!(json["qualifications"]["mfcq"], "holds");
    assert_eq!(json["qualifications"]["variant"], "inequality-only");
    assert_eq!(json["active_set"]["labels"][0], "g1");
}

#[test]
fn gradcheck_circle_passes() {
    let output = run(&[
        "gradcheck",
        data("circle.txt").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let json = stdout_json(&output);
    assert_eq!(json["pass"], true);
}

#[test]
fn gradcheck_impossible_tolerance_fails() {
    // Transcendental gradients cannot match central differences to 1e-15.
    let dir = std::env::temp_dir().join("fjkkt_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("transcendental.txt");
    std::fs::write(&file, "vars: x\nmaximize: exp(x)*sin(x)\npoint: x = 0.7\n").unwrap();
    let output = run(&[
        "gradcheck",
        file.to_str().unwrap(),
        "--tol-stat",
        "1e-15",
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn gradcheck_domain_exit_two() {
    let dir = std::env::temp_dir().join("fjkkt_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("domain.txt");
    // The probe radius 1e-2 walks log's argument negative.
    std::fs::write(&file, "vars: x\nmaximize: log(x)\npoint: x = 1e-300\n").unwrap();
    let output = run(&["gradcheck", file.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}
