use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dscharge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dscharge")).args(args).output().expect("spawn dscharge")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn mcvittie_charges_report_unit_energy() {
    let out = dscharge(&["charges", "--model", "mcvittie", "--m", "1", "--lambda", "10", "--t", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert!((v["charges"]["E"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["convention"]["psi_range"], "standard");
    assert!(v["diagnostics"]["radii"].as_array().unwrap().len() >= 3);
}

#[test]
fn chart_to_static_time() {
    let out = dscharge(&["chart", "--from", "planar-upper", "--to", "static", "--t", "0", "--r", "5", "--lambda", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert!((v["output"][0].as_f64().unwrap() - 1.43841036).abs() < 1e-8);
    assert!((v["output"][1].as_f64().unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn horizon_at_half_mass() {
    let out = dscharge(&["horizon", "--model", "mcvittie", "--m", "1", "--t", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json_stdout(&out)["radius"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn malformed_config_points_at_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    std::fs::write(&cfg, r#"{"task": "charges", "model": {"model": "mcvittie", "m": "heavy"}}"#).unwrap();
    let out = dscharge(&["charges", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("model.m"), "{err}");

    let out = dscharge(&["charges", "--model", "mcvittie", "--m", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = dscharge(&["charges", "--model", "mcvittie", "--m", "1", "--n-theta", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn singular_point_exits_with_domain_error() {
    let out = dscharge(&["chart", "--from", "planar-upper", "--to", "static", "--t", "0", "--r", "10", "--lambda", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["task"], "chart");
    assert!(v["error"].is_string() && v["message"].is_string());
}

#[test]
fn reports_are_deterministic_and_files_written() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("c{i}.json"))).collect();
    for p in &paths {
        let out = dscharge(&["constraints", "--model", "mcvittie", "--m", "1", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());

    let report = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let out = dscharge(&[
        "charges", "--model", "mcvittie", "--m", "1", "--out", report.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!((read_json(&report)["charges"]["E"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("charge,radius,value"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    std::fs::write(&cfg, r#"{"task": "charges", "model": {"model": "mcvittie", "m": 3.0, "lambda": 10.0, "t": 0.0}}"#).unwrap();
    let out = dscharge(&["charges", "--config", cfg.to_str().unwrap(), "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json_stdout(&out)["charges"]["E"].as_f64().unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn verify_passes_and_detects_lambda_mismatch() {
    let out = dscharge(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let out = dscharge(&["verify", "--n-theta", "8", "--n-psi", "16"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!json_stdout(&out)["warnings"].as_array().unwrap().is_empty());

    let out = dscharge(&["verify", "--lambda-mismatch", "1e-3"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_stdout(&out);
    let failed: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c["name"].as_str().unwrap().contains("constraints")));
}
