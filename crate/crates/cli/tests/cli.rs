use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anosov-trace")).arg("--out").arg(dir).args(args).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn error_of(out: &Output) -> Value {
    let line = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str::<Value>(line.trim()).unwrap()["error"].clone()
}

#[test]
fn orbits_cat_map_period_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["orbits", "--n", "2"]);
    assert!(out.status.success());
    let s = json(&dir.path().join("orbits.json"));
    assert_eq!(s["points"], 5);
    assert!((s["amplitude"].as_f64().unwrap() - 5.0 / 3.0).abs() < 1e-15);
    assert!(s["h_top"].as_f64().unwrap() > 0.96);
    let csv = std::fs::read_to_string(dir.path().join("orbits.csv")).unwrap();
    assert!(csv.starts_with("n,orbit_id,m,weight,x1,x2\n"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn shear_is_not_hyperbolic() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["orbits", "--matrix", "1,1;0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "NotHyperbolic");
}

#[test]
fn over_budget_period_is_reported_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["orbits", "--n", "12", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let e = error_of(&out);
    assert_eq!(e["kind"], "PeriodTooLarge");
    assert_eq!(e["message"], "period 12 has 103680 periodic points, over the enumeration budget of 1000");
    assert!(!dir.path().join("orbits.csv").exists());
}

#[test]
fn clt_rejects_few_trials() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["clt", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "TooFewSamples");
}

#[test]
fn clt_zero_epsilon_reports_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["clt", "--n", "4", "--trials", "100", "--epsilon", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("clt_report.json"));
    assert_eq!(r["normality"]["degenerate"], true);
    let ks = r["verdicts"].as_array().unwrap().iter().find(|v| v["name"] == "ks_re_p_value").unwrap();
    assert_eq!(ks["pass"], false);
    assert_eq!(ks["threshold"], 0.01);
}

#[test]
fn clt_report_lists_verdicts_and_covariance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["clt", "--n", "3", "--trials", "100", "--covariance", "--covariance-draws", "1000"]);
    assert!(out.status.success());
    let r = json(&dir.path().join("clt_report.json"));
    let names: Vec<&str> = r["verdicts"].as_array().unwrap().iter().map(|v| v["name"].as_str().unwrap()).collect();
    for n in ["ks_re_p_value", "ks_im_p_value", "max_cf_deviation", "min_variance_ratio", "off_diagonal_ratio"] {
        assert!(names.contains(&n), "{n}");
    }
    assert_eq!(r["orbit_covariance"]["draws"], 1000);
    let cf = std::fs::read_to_string(dir.path().join("clt_cf.csv")).unwrap();
    assert_eq!(cf.lines().count(), 82);
    let samples = std::fs::read_to_string(dir.path().join("clt_samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 101);
}

#[test]
fn pressure_empty_beta_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["pressure", "--betas", ""]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "InvalidConfig");
}

#[test]
fn pressure_refuses_partial_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["pressure", "--periods", "1..12", "--budget", "50000"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_of(&out)["kind"], "PeriodTooLarge");
    assert!(!dir.path().join("pressure.csv").exists());
}

#[test]
fn pressure_defaults_are_monotone() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["pressure"]).status.success());
    let csv = std::fs::read_to_string(dir.path().join("pressure.csv")).unwrap();
    let f12: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|c| c[1] == "12")
        .map(|c| c[2].parse().unwrap())
        .collect();
    assert_eq!(f12.len(), 4);
    assert!(f12.windows(2).all(|w| w[1] < w[0]));
    let decay = std::fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    assert_eq!(decay.lines().count(), 13);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("trace.toml");
    std::fs::write(&cfg, "n = 5\nseed = 77\nxi = 12.5\n[field]\nepsilon = 0.5\n").unwrap();
    let out = run(dir.path(), &["trace", "--config", cfg.to_str().unwrap(), "--seed", "78"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = json(&dir.path().join("trace.json"));
    assert_eq!(t["sample"]["n"], 5);
    assert_eq!(t["sample"]["seed"], 78);
    assert_eq!(t["sample"]["xi"], 12.5);
    assert_eq!(t["regime"], false);
    let m = json(&dir.path().join("trace.manifest.json"));
    assert_eq!(m["config"]["field"]["epsilon"], 0.5);
    assert_eq!(m["seed"], 78);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "periods = [1, 2]\nbogus = 1\n").unwrap();
    let out = run(dir.path(), &["pressure", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "ConfigParse");
}

#[test]
fn json_config_documents() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("regime.json");
    std::fs::write(&cfg, r#"{"alpha": 1.5, "periods": [3, 4]}"#).unwrap();
    assert!(run(dir.path(), &["regime", "--config", cfg.to_str().unwrap()]).status.success());
    let csv = std::fs::read_to_string(dir.path().join("regime.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn manifest_lists_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["field", "--n", "4", "--band", "3"]);
    assert!(out.status.success());
    let m = json(&dir.path().join("field.manifest.json"));
    assert_eq!(m["subcommand"], "field");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    let listed: Vec<String> = m["outputs"].as_array().unwrap().iter().map(|p| p.as_str().unwrap().to_string()).collect();
    let mut on_disk: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.to_string_lossy().ends_with(".manifest.json"))
        .map(|p| p.display().to_string())
        .collect();
    on_disk.sort();
    let mut sorted = listed.clone();
    sorted.sort();
    assert_eq!(sorted, on_disk);
}

#[test]
fn regime_matches_n_max() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["regime", "--xi", "3.2e6"]).status.success());
    let r = json(&dir.path().join("regime.json"));
    // the desk-scale frequency admits n = 8
    assert_eq!(r["n_max"], 8);
}

#[test]
fn workers_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_anosov-trace"))
        .env("ANOSOV_TRACE_WORKERS", "2")
        .arg("--out")
        .arg(dir.path())
        .arg("regime")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&dir.path().join("regime.manifest.json"))["workers"], 2);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["field", "--n", "5", "--seed", "4"];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    for f in ["field.csv", "field_values.csv", "field.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}
