use std::path::PathBuf;
use std::process::{Command, Output};

fn whf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whf")).args(args).output().expect("runs")
}

fn tmp(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("whf-test-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

const SINH: &[&str] = &["family=sinh", "alpha=0.25", "sigma=1", "mu=-0.1"];

fn with(base: &[&str], more: &[&str]) -> Vec<String> {
    more.iter().chain(base).map(|s| s.to_string()).collect()
}

fn run(cmd: &str, base: &[&str], more: &[&str]) -> Output {
    let mut a = vec![cmd.to_string()];
    a.extend(with(base, more));
    whf(&a.iter().map(|s| s.as_str()).collect::<Vec<_>>())
}

#[test]
fn roots_csv_has_2n_plus_2_rows_and_sidecar() {
    let out = tmp("roots.csv");
    let o = run("roots", SINH, &["q=1", "n=100", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,zeta,residual,interval_lo,interval_hi");
    assert_eq!(lines.len(), 203);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp("roots.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["family"], "sinh");
    assert_eq!(meta["result"]["rows"], 202);
}

#[test]
fn config_file_and_overrides() {
    let f = tmp("sech.cfg");
    std::fs::write(&f, "# sech model\nfamily = sech\nalpha = 0.25\nq = 2\n").unwrap();
    let o = whf(&["roots", "--model-file", f.to_str().unwrap(), "n=3", "q=1"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 9);
}

#[test]
fn usage_errors_exit_2() {
    let o = whf(&["roots", "family=sech", "alpha=1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("|alpha| < 1"));
    let o = run("density", SINH, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("give q"));
    assert_eq!(run("roots", SINH, &["colour=blue"]).status.code(), Some(2));
    assert_eq!(whf(&["roots", "family=sech", "alpha=0.1", "mu=1"]).status.code(), Some(2));
    assert_eq!(whf(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn complex_q_path_has_u_column() {
    let o = run("roots", SINH, &["q=1", "n=5", "complex_q=true", "u_max=10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.starts_with("u,n,re_zeta,im_zeta\n"));
}

#[test]
fn density_expq_grid_and_normalization() {
    let out = tmp("dens.csv");
    let o = run("density", SINH, &["q=1", "x=0.01:10:200:log", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 201);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp("dens.csv.json")).unwrap()).unwrap();
    let mass = meta["result"]["normalization"].as_f64().unwrap();
    assert!((mass - 1.0).abs() < 1e-6);
}

#[test]
fn factor_json() {
    let o = run("factor", SINH, &["--format", "json", "q=1", "z=0,1+0.5i,-2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert!((v[0]["phi"][0].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let a = run("density", SINH, &["q=1", "x=0.5,1,2"]);
    let b = run("density", SINH, &["q=1", "x=0.5,1,2", "--threads", "1"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mc = ["validate", "family=sech", "alpha=0.25", "q_list=1", "mc=true", "n_samples=20000", "seed=42"];
    let (x, y) = (whf(&mc), whf(&mc));
    assert_eq!(x.status.code(), Some(0), "{}", String::from_utf8_lossy(&x.stderr));
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn validate_default_suite_and_fault_injection() {
    let o = whf(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);
    let o = whf(&["validate", "family=sech", "alpha=0.25", "q_list=1", "perturb=1:1e-3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("factorization"));
}
