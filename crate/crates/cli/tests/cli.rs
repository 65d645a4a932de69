use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kahlerlab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn rows(v: &Value) -> &Vec<Value> {
    v["data"]["rows"].as_array().unwrap()
}

#[test]
fn profile_of_o_minus_one_is_linear() {
    let v = json(&["profile", "--ok", "1", "--tau", "0..3"]);
    assert_eq!(v["schema_version"], 1);
    for r in rows(&v) {
        let tau = r["tau"].as_f64().unwrap();
        assert!((r["phi"].as_f64().unwrap() - 2.0 * tau).abs() < 1e-13);
    }
}

#[test]
fn profile_values_at_the_zero_section() {
    let flat = json(&["profile", "--flat", "2", "-1", "--tau", "0"]);
    assert_eq!(rows(&flat)[0]["phi"].as_f64().unwrap(), 0.0);
    let ok2 = json(&["profile", "--ok", "2", "--tau", "0"]);
    assert!((rows(&ok2)[0]["phi_2"].as_f64().unwrap() + 2.0).abs() < 1e-13);
}

#[test]
fn curvature_checks_pass_on_ricci_flat_bundle() {
    let v = json(&["curvature", "--ok", "2", "--tau", "0..3", "--seed", "5"]);
    assert_eq!(v["checks_passed"], true);
    for r in rows(&v) {
        assert!(r["report"]["sigma"].as_f64().unwrap().abs() < 1e-7);
        assert!(r["report"]["ric_norm2"].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn csv_uses_seventeen_significant_digits() {
    let out = run(&["curvature", "--flat", "1", "-1", "--tau", "0.5", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("tau,sigma,"));
    let first = lines.next().unwrap().split(',').next().unwrap();
    assert_eq!(first, "5.0000000000000000e-1");
}

#[test]
fn a2_flat_reports_the_displayed_expression_separately() {
    let v = json(&["a2", "--flat", "2", "-1", "--tau", "2"]);
    let r = &rows(&v)[0];
    assert!(r["error"].as_f64().unwrap() < 1e-9);
    assert!(r["displayed_error"].as_f64().unwrap() > 0.1);
}

#[test]
fn obstruction_verdicts() {
    let ok3 = json(&["obstruct", "--ok", "3"]);
    assert_eq!(ok3["data"]["pk"]["pk_at_zero"], -18);
    assert_eq!(ok3["data"]["summary"], "not projectively induced");
    let ok1 = json(&["obstruct", "--ok", "1"]);
    assert_eq!(ok1["data"]["summary"], "no obstruction found up to order 4");
    let flat = json(&["obstruct", "--flat", "2", "-1.5"]);
    assert_eq!(flat["data"]["n_lambda_plus_2beta"].as_f64().unwrap(), -6.0);
    assert_eq!(flat["data"]["necessary_condition"]["verdict"], "violated");
}

#[test]
fn epsilon_of_o_minus_one_is_constant() {
    let v = json(&["epsilon", "--ok", "1", "--alpha", "4,6,8,10,12", "--tau", "0.5,2"]);
    let est = v["data"]["estimates"].as_array().unwrap();
    for row in est {
        let vals: Vec<f64> = row.as_array().unwrap().iter().map(|e| e["value"].as_f64().unwrap()).collect();
        let alpha = row[0]["alpha"].as_f64().unwrap();
        let want = (alpha / std::f64::consts::PI).powi(2);
        assert!(vals.iter().all(|x| (x / want - 1.0).abs() < 1e-9), "{vals:?} vs {want}");
    }
}

#[test]
fn verify_passes_and_detects_injected_fault() {
    assert!(run(&["verify"]).status.success());
    let faulty = run(&["verify", "--inject-fault", "a2-sign"]);
    assert_eq!(faulty.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&faulty.stdout).unwrap();
    let failed: Vec<&str> = v["data"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["a2 closed form for O(-k) matches the tensor path"]);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["profile"]).status.code(), Some(2));
    assert_eq!(run(&["profile", "--flat", "2"]).status.code(), Some(2));
    assert_eq!(run(&["profile", "--ok", "0"]).status.code(), Some(2));
    assert_eq!(run(&["profile", "--ok", "1", "--flat", "1", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["profile", "--ok", "1", "--tau", "3..1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_one() {
    let out = run(&["curvature", "--ok", "2", "--tau", "1e9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("range error"));
}

#[test]
fn config_echo_reproduces_the_run() {
    let dir = std::env::temp_dir().join(format!("kahlerlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let first = json(&["curvature", "--flat", "2", "-0.5", "--tau", "0.25,1", "--seed", "9"]);
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, serde_json::to_string(&first["config"]).unwrap()).unwrap();
    let second = json(&["curvature", "--config", cfg.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(first, second);
}

#[test]
fn output_is_deterministic_for_a_seed() {
    let a = run(&["curvature", "--ok", "4", "--tau", "0..2", "--seed", "3"]).stdout;
    let b = run(&["curvature", "--ok", "4", "--tau", "0..2", "--seed", "3"]).stdout;
    let c = run(&["curvature", "--ok", "4", "--tau", "0..2", "--seed", "4"]).stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("kahlerlab-out-{}.csv", std::process::id()));
    let out = run(&["solve", "--ok", "1", "--tau", "1", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(text, "tau,t,f\n1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0\n");
}
