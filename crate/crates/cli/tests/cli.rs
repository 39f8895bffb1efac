use std::process::{Command, Output};

use serde_json::Value;

fn hyperu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperu"))
        .args(args)
        .output()
        .expect("spawn hyperu")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn stats_closed_matches_ginibre_mean() {
    let v = json(&hyperu(&["stats", "--dimension", "1", "--radius", "2"]));
    let row = &v["rows"][0];
    assert!((row["mean"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    let ratio = row["ratio"].as_f64().unwrap();
    let variance = row["variance"].as_f64().unwrap();
    assert!((ratio * 4.0 - variance).abs() < 1e-12);
    assert_eq!(v["meta"]["route"], "closed");
    assert_eq!(v["window"]["kind"], "ball");
}

#[test]
fn closed_and_integral_agree() {
    let closed = json(&hyperu(&["stats", "--dimension", "2", "--radius", "3"]));
    let integral = json(&hyperu(&[
        "stats",
        "--dimension",
        "2",
        "--radius",
        "3",
        "--route",
        "integral",
    ]));
    let a = closed["rows"][0]["variance"].as_f64().unwrap();
    let b = integral["rows"][0]["variance"].as_f64().unwrap();
    assert!(((a - b) / a).abs() < 1e-8, "{a} vs {b}");
}

#[test]
fn sweep_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = hyperu(&[
        "sweep",
        "--window",
        "polydisk",
        "--dimension",
        "2",
        "--level",
        "0,1",
        "--route",
        "spectrum",
        "--r-grid",
        "1,2,4",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("radius,mean,variance"));
}

#[test]
fn classify_ginibre_and_poisson_control() {
    let v = json(&hyperu(&["classify", "--dimension", "1"]));
    assert_eq!(v["rows"][0]["class_label"], "ClassI");
    let slope = v["rows"][0]["fitted_slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.1);

    let p = json(&hyperu(&[
        "classify",
        "--dimension",
        "2",
        "--poisson-control",
    ]));
    assert_eq!(p["rows"][0]["class_label"], "NotHyperuniform");
}

#[test]
fn mc_is_reproducible_and_near_exact() {
    let args = [
        "mc",
        "--dimension",
        "1",
        "--level",
        "1",
        "--radius",
        "2",
        "--replicas",
        "20000",
        "--seed",
        "7",
    ];
    let a = hyperu(&args);
    let b = hyperu(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let row = &v["rows"][0];
    let z = (row["mean_hat"].as_f64().unwrap() - row["exact_mean"].as_f64().unwrap())
        / row["se_mean"].as_f64().unwrap();
    assert!(z.abs() < 5.0, "z = {z}");
    assert_eq!(v["meta"]["seed"], 7);
}

#[test]
fn kernel_eval_hermitized_modulus() {
    let v = json(&hyperu(&[
        "kernel-eval",
        "--x",
        "0.5,0.25",
        "--y",
        "-0.5,1",
    ]));
    let row = &v["rows"][0];
    let d2: f64 = 1.0f64.powi(2) + 0.75f64.powi(2);
    let expected = (-d2 / 2.0).exp() / std::f64::consts::PI;
    assert!((row["hermitized_abs"].as_f64().unwrap() - expected).abs() < 1e-14);
}

#[test]
fn constants_ground_level() {
    let v = json(&hyperu(&["constants", "--level", "0"]));
    let c0 = v["rows"][0]["c_constant"].as_f64().unwrap();
    assert!((c0 - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
}

#[test]
fn verify_selected_checks_pass() {
    let out = hyperu(&[
        "verify",
        "--check",
        "alpha-coefficients",
        "--check",
        "ball-routes",
    ]);
    let v = json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["passed"] == true));
}

#[test]
fn verify_failure_exits_one() {
    let out = hyperu(&["verify", "--check", "ball-routes", "--tolerance-scale", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        hyperu(&["verify", "--check", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        hyperu(&[
            "stats",
            "--dimension",
            "1",
            "--level",
            "0,0",
            "--radius",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(hyperu(&["stats", "--radius", "-1"]).status.code(), Some(2));
    assert_eq!(
        hyperu(&["kernel-eval", "--x", "1", "--y", "0,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hyperu(&["stats", "--route", "sideways", "--radius", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn budget_failure_exits_three() {
    let out = hyperu(&[
        "stats",
        "--window",
        "polydisk",
        "--route",
        "spectrum",
        "--radius",
        "50",
        "--tail-tol",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(3));
}
