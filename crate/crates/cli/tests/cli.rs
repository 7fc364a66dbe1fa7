use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let path = dir.join("run.json");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_horoscope"))
        .arg("--config")
        .arg(&path)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad report {e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn ladder_atlas_has_five_clusters() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), r#"{"space": "ladder", "analysis": "atlas", "seed": 7}"#, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"][0]["cluster_count"], 5);
    assert_eq!(r["status"], "pass");
}

#[test]
fn identity_julia_passes() {
    let dir = TempDir::new().unwrap();
    for cfg in [
        r#"{"space": "poincare_disc", "map": "identity", "analysis": "julia", "R": 2}"#,
        r#"{"space": "poincare_disc", "map": "identity", "analysis": "julia", "params": {"R": 2}}"#,
    ] {
        let out = run(dir.path(), cfg, &[]);
        assert_eq!(out.status.code(), Some(0));
        let r = report(&out);
        assert_eq!(r["results"][0]["violations"], 0);
        assert_eq!(r["results"][0]["radius"].as_f64(), Some(2.0));
    }
}

#[test]
fn rays_on_a_graph_is_a_configuration_error() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": {"kind": "finite_graph", "edges": [[0, 1, 1], [1, 2, 1], [2, 0, 1]]}, "analysis": "rays"}"#;
    let out = run(dir.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not supported"));
}

#[test]
fn malformed_json_reports_its_position() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "{\n  \"space\": \"ladder\",\n  \"analysis\" \"delta\"\n}", &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn expanding_map_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": "right_half_plane", "map": {"rule": "half_plane_affine", "k": 2, "c": [-1, 0]}, "analysis": "dynamics"}"#;
    assert_eq!(run(dir.path(), cfg, &[]).status.code(), Some(3));
}

#[test]
fn ladder_dynamics_fields() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": "ladder", "map": "ladder_f1", "analysis": "dynamics", "params": {"basepoint": [0, 1]}}"#;
    let out = run(dir.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let d = &report(&out)["results"][0];
    assert_eq!(d["c_estimate"].as_f64(), Some(1.0));
    assert_eq!(d["dilation_log"].as_f64(), Some(-1.0));
    assert_eq!(d["tau_upper"].as_f64(), Some(1.0));
}

#[test]
fn empty_suite_is_a_valid_report() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), r#"{"space": "ladder", "analysis": "suite", "params": {"analyses": []}}"#, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"], Value::Array(vec![]));
}

#[test]
fn failed_check_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": "poincare_disc", "analysis": "delta", "params": {"samples": 200, "expect_max": 1e-6}}"#;
    let out = run(dir.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["status"], "fail");
}

#[test]
fn starved_sampler_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": "poincare_disc", "map": "identity", "analysis": "julia",
                  "params": {"R": 0.5, "extent": 0.01, "samples": 10}}"#;
    let out = run(dir.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["results"][0]["status"], "inconclusive");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": "poincare_disc", "map": {"rule": "mobius_disc", "attracting": [0, 1], "repelling": [0, -1], "multiplier": 2},
                  "analysis": "suite", "seed": 5, "params": {"samples": 500}}"#;
    for format in ["json", "csv"] {
        let a = run(dir.path(), cfg, &["--format", format]);
        let b = run(dir.path(), cfg, &["--format", format]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": "poincare_disc", "analysis": "delta", "seed": 1, "params": {"samples": 300}}"#;
    let base = run(dir.path(), cfg, &[]);
    let same = run(dir.path(), cfg, &["--seed", "1"]);
    let other = run(dir.path(), cfg, &["--seed", "2"]);
    assert_eq!(base.stdout, same.stdout);
    assert_ne!(base.stdout, other.stdout);
    assert_eq!(report(&other)["seed"], 2);
}

#[test]
fn out_flag_writes_csv() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("reports/delta.csv");
    let cfg = r#"{"space": {"kind": "finite_graph", "edges": [[0, 1, 1], [1, 2, 1], [2, 3, 1]]}, "analysis": "delta"}"#;
    let out = run(dir.path(), cfg, &["--out", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("field,value\n"));
    assert!(text.contains("results.0.delta,0.0\n"));
    assert!(text.contains("results.0.exhaustive,true\n"));
}

#[test]
fn disc_rays_to_one_point_are_strong() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": "poincare_disc", "analysis": "rays",
                  "params": {"rays": [{"base": [0, 0], "direction": 0.5}, {"base": [0.3, 0.1], "direction": 0.5}]}}"#;
    let out = run(dir.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"][0]["pairs"][0]["outcome"], "strong");
}

#[test]
fn ladder_rails_are_not_strongly_asymptotic() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": "ladder", "analysis": "rays", "params": {"expect": "not_strong",
                  "rays": [{"base": [0, 1], "direction": {"rail": 1}}, {"base": [2, -1], "direction": {"rail": -1}}]}}"#;
    let out = run(dir.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"][0]["pairs"][0]["gap_floor"].as_f64(), Some(2.0));
}

#[test]
fn off_axis_composite_respects_c_below_tau() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": "poincare_disc", "analysis": "dynamics", "map": {"rule": "composite", "rules": [
                    {"rule": "rotation_disc", "angle": 0.7},
                    {"rule": "mobius_disc", "attracting": [1, 0], "repelling": [-1, 0], "multiplier": 3}]}}"#;
    let out = run(dir.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let d = &report(&out)["results"][0];
    assert!(d["c_estimate"].as_f64().unwrap() <= d["tau_upper"].as_f64().unwrap() + 1e-9);
}

#[test]
fn half_plane_translation_aims_at_infinity() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"space": "right_half_plane", "map": {"rule": "half_plane_affine", "k": 1, "c": [0.5, 0.2]}, "analysis": "dynamics"}"#;
    let out = run(dir.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let d = &report(&out)["results"][0];
    assert_eq!(d["eta"], "infinity");
    assert_eq!(d["dilation_log"].as_f64(), Some(0.0));
}

#[test]
fn ladder_julia_outside_its_hypotheses_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), r#"{"space": "ladder", "map": "ladder_f2", "analysis": "julia", "params": {"samples": 2000}}"#, &[]);
    assert_eq!(out.status.code(), Some(2));
    let j = &report(&out)["results"][0];
    assert_eq!(j["hypotheses_hold"], false);
    assert!(j["violations"].as_u64().unwrap() > 0);
}
