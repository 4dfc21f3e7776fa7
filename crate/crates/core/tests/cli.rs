use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use qfimirror::cli::config::RunConfig;

fn run(dir: &TempDir, config: &str, args: &[&str]) -> Output {
    let path = dir.path().join("run.json");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_qfimirror"))
        .args(&args[..1])
        .arg("--config")
        .arg(&path)
        .args(&args[1..])
        .output()
        .unwrap()
}

fn json_rows(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    doc["rows"].as_array().unwrap().clone()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn single_shot_optimum_in_free_space() {
    let dir = TempDir::new().unwrap();
    let rows = json_rows(&run(&dir, "{}", &["freq-opt", "--mode", "single", "--format", "json"]));
    let r = &rows[0];
    assert!((num(&r["tau_star"]) - 2.0).abs() < 1e-12);
    assert!((num(&r["tau_star_numeric"]) - 2.0).abs() < 1e-4);
    assert_eq!(r["shielded"], Value::Bool(false));
}

#[test]
fn transverse_dipole_at_the_mirror_is_shielded() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"environment": {"kind": "boundary", "zeta": 1e-6}, "polarization": {"x": 0.5, "y": 0.5, "z": 0}}"#;
    let out = run(&dir, cfg, &["freq-opt", "--format", "json"]);
    let rows = json_rows(&out);
    assert_eq!(rows[0]["shielded"], Value::Bool(true));
    assert!(rows[0]["tau_star"].is_null());
    assert!(String::from_utf8_lossy(&out.stderr).contains("shielded"));
}

#[test]
fn ramsey_plan_uses_the_whole_budget() {
    let dir = TempDir::new().unwrap();
    let rows = json_rows(&run(&dir, "{}", &["freq-opt", "--mode", "ramsey", "--total-time", "1000", "--format", "json"]));
    let r = &rows[0];
    assert!((num(&r["n_star"]) - 1000.0).abs() < 1e-9);
    assert!((num(&r["tau_star"]) - 1.0).abs() < 1e-12);
    assert!((num(&r["delta_omega_min"]) - (std::f64::consts::E / 1000.0).sqrt()).abs() < 1e-12);
}

#[test]
fn qfi_methods_agree_on_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"environment": {"kind": "boundary", "zeta": 0.7}, "grid": {"min": 0, "max": 8, "points": 41}}"#;
    for param in ["theta", "phi"] {
        let rows = json_rows(&run(&dir, cfg, &["qfi", "--param", param, "--format", "json"]));
        assert_eq!(rows.len(), 41);
        for r in &rows {
            assert!(num(&r["max_pairwise_diff"]) < 1e-8, "{param}: {r}");
        }
    }
}

#[test]
fn evolve_starts_at_initial_state_and_relaxes() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"atom": {"theta": 1.0, "phi": 0.5}, "grid": {"min": 0, "max": 40, "points": 81}}"#;
    let rows = json_rows(&run(&dir, cfg, &["evolve", "--format", "json"]));
    let first = &rows[0];
    assert!((num(&first["w1"]) - 1f64.sin() * 0.5f64.cos()).abs() < 1e-11);
    assert!((num(&first["w2"]) - 1f64.sin() * 0.5f64.sin()).abs() < 1e-11);
    assert!((num(&first["w3"]) - 1f64.cos()).abs() < 1e-11);
    assert!((num(&first["purity"]) - 1.0).abs() < 1e-11);
    let last = rows.last().unwrap();
    assert!((num(&last["w3"]) + 1.0).abs() < 1e-12);
}

#[test]
fn csv_goes_to_file() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("scan.csv");
    let cfg = r#"{"grid": {"min": 0.1, "max": 1, "points": 3}}"#;
    let out = run(&dir, cfg, &["scan-boundary", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "zeta,f_parallel,f_perp,f_eff,one_minus_f,gamma_over_gamma0");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1.00000000000e-1,"));
}

#[test]
fn dump_config_round_trips() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"atom": {"gamma_over_omega": 1e-5, "theta": 0.4}, "environment": {"kind": "boundary", "zeta": 2.0}, "grid": {"min": 0, "max": 3, "points": 7, "spacing": "linear"}}"#;
    let out = run(&dir, cfg, &["qfi", "--dump-config"]);
    assert!(out.status.success());
    let dumped = String::from_utf8(out.stdout).unwrap();
    let reparsed = RunConfig::from_json(&dumped).unwrap().resolve().unwrap();
    assert_eq!(RunConfig::from_json(&reparsed.to_json()).unwrap().resolve().unwrap(), reparsed);
    assert_eq!(reparsed.atom.theta, 0.4);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    // unknown key
    assert_eq!(run(&dir, r#"{"bogus": 1}"#, &["evolve"]).status.code(), Some(2));
    // negative mirror distance
    let bad_zeta = r#"{"environment": {"kind": "boundary", "zeta": -1}, "grid": {"min": 0, "max": 1, "points": 2}}"#;
    assert_eq!(run(&dir, bad_zeta, &["evolve"]).status.code(), Some(2));
    // unwritable output path
    let missing = Path::new("/nonexistent-dir/out.csv");
    let cfg = r#"{"grid": {"min": 0.1, "max": 1, "points": 2}}"#;
    assert_eq!(run(&dir, cfg, &["scan-boundary", "--out", missing.to_str().unwrap()]).status.code(), Some(4));
    // missing config file
    let out = Command::new(env!("CARGO_BIN_EXE_qfimirror"))
        .args(["evolve", "--config", "/nonexistent-dir/cfg.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
