use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercircle"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, json).unwrap();
    p.display().to_string()
}

#[test]
fn verify_analytic_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = bin(&["verify-analytic"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("passed"));
    let c = config(
        dir.path(),
        r#"{"pattern": "edney6", "mach": 3.5, "chi1": 15, "chi2": 25}"#,
    );
    assert_eq!(
        bin(&["verify-analytic", "--config", &c], dir.path()).status.code(),
        Some(0)
    );
    let c = config(dir.path(), r#"{"pattern": "single_wedge", "mach": 2, "chi1": 45}"#);
    let bad = bin(&["verify-analytic", "--config", &c], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("detached"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), r#"{"machh": 3}"#);
    let o = bin(&["verify-analytic", "--config", &c], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn run_estimate_and_refuse_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        dir.path(),
        r#"{"pattern": "freestream", "mach": 3, "grid_sizes": [8], "schemes": ["S1", "LW"],
            "estimators": ["width"], "max_steps": 50}"#,
    );
    let run = bin(&["run-ensemble", "--config", &c, "--out", "res"], dir.path());
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let g = dir.path().join("res/grid_8");
    for f in ["manifest.json", "S1.psfield", "LW.psfield", "convergence_S1.csv"] {
        assert!(g.join(f).exists(), "{f}");
    }
    let again = bin(&["run-ensemble", "--config", &c, "--out", "res"], dir.path());
    assert_eq!(again.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&again.stderr).contains("--force"));
    let forced = bin(&["run-ensemble", "--config", &c, "--out", "res", "--force"], dir.path());
    assert_eq!(forced.status.code(), Some(0));
    let est = bin(&["estimate", "--config", &c, "--out", "res"], dir.path());
    assert_eq!(est.status.code(), Some(0));
    assert!(g.join("report_width.json").exists() && g.join("report_width.csv").exists());
}

#[test]
fn estimate_without_ensemble_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["estimate", "--out", "missing"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn diverging_member_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // undamped MacCormack loses positivity behind the Edney-I shocks
    let c = config(
        dir.path(),
        r#"{"grid_sizes": [40], "schemes": ["S1", "MC"], "estimators": ["width"]}"#,
    );
    let o = bin(&["run-ensemble", "--config", &c, "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));
    let m = fs::read_to_string(dir.path().join("res/grid_40/manifest.json")).unwrap();
    assert!(m.contains("\"failures\"") && m.contains("MC"));
}

#[test]
fn estimator_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // two identical freestream members: no angle between their truncation errors
    let c = config(
        dir.path(),
        r#"{"pattern": "freestream", "mach": 3, "grid_sizes": [8], "schemes": ["S1", "LW"],
            "estimators": ["prager_synge"], "max_steps": 50}"#,
    );
    assert_eq!(
        bin(&["run-ensemble", "--config", &c, "--out", "res"], dir.path())
            .status
            .code(),
        Some(0)
    );
    let o = bin(&["estimate", "--config", &c, "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn synthetic_suite_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        dir.path(),
        r#"{"synthetic": {"angle_trials": 300, "triangle_trials": 300, "width_trials": 30}}"#,
    );
    let a = bin(
        &["synthetic-suite", "--config", &c, "--seed", "5", "--out", "a"],
        dir.path(),
    );
    let b = bin(
        &["synthetic-suite", "--config", &c, "--seed", "5", "--out", "b"],
        dir.path(),
    );
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let ja = fs::read(dir.path().join("a/synthetic.json")).unwrap();
    let jb = fs::read(dir.path().join("b/synthetic.json")).unwrap();
    assert_eq!(ja, jb);
}
