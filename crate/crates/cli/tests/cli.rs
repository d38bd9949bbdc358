use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn supdelta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supdelta"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const KS1: &str = r#"{"experiment":"ks1","seed":3,"n":100,"stat_replicates":40,"limit_paths":50,
  "grid_nodes":101,"x_law":{"family":"normal","mean":0,"sd":1},
  "y_law":{"family":"normal","mean":0.5,"sd":1}}"#;

#[test]
fn oracle_prints_constant() {
    let out = supdelta(&["oracle", "bj-null-median"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 1.7528).abs() < 1e-4);
    assert_eq!(v["provenance"], "analytic");
}

#[test]
fn unknown_oracle_exits_3() {
    assert_eq!(supdelta(&["oracle", "nope"]).status.code(), Some(3));
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ks1.json");
    fs::write(&cfg, KS1).unwrap();
    let out_dir = dir.path().join("out");
    let out = supdelta(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.json", "stat_replicates.csv", "limit_replicates.csv", "ecdf_overlay.csv"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    assert!(json(&out)["ks_distance"].as_f64().is_some());
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, KS1.replace("\"n\":100", "\"n\":0")).unwrap();
    let out = supdelta(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`n`"));
    fs::write(&cfg, "{ not json").unwrap();
    let out = supdelta(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn write_csv(path: &Path, rows: &[(f64, f64)]) {
    let body: String = rows.iter().map(|(x, v)| format!("{x},{v}\n")).collect();
    fs::write(path, format!("x,value\n{body}")).unwrap();
}

#[test]
fn derivative_at_tied_maximum() {
    let dir = tempfile::tempdir().unwrap();
    let (f, g) = (dir.path().join("f.csv"), dir.path().join("g.csv"));
    write_csv(&f, &[(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)]);
    write_csv(&g, &[(0.0, 0.5), (1.0, 9.0), (2.0, -0.5)]);
    let args = ["derivative", "--kind", "sup", "--f", f.to_str().unwrap(), "--g", g.to_str().unwrap(), "--t", "1e-6"];
    let out = supdelta(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["derivative"], 0.5);
    assert_eq!(v["fully_differentiable"], false);
    assert!((v["difference_quotient"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn derivative_rejects_mismatched_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let (f, g) = (dir.path().join("f.csv"), dir.path().join("g.csv"));
    write_csv(&f, &[(0.0, 1.0), (1.0, 0.0)]);
    write_csv(&g, &[(0.0, 1.0), (2.0, 0.0)]);
    let out = supdelta(&["derivative", "--kind", "sup-norm", "--f", f.to_str().unwrap(), "--g", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_succeeds() {
    let out = supdelta(&["selftest"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 6);
}
