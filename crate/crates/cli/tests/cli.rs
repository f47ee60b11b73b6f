use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn disperse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disperse"))
        .args(args)
        .output()
        .unwrap()
}

fn run_in(dir: &Path, scenario: &str, config: &Path) -> Output {
    disperse(&[
        scenario,
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ])
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("config.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn tau_study_passes_and_writes_outputs() {
    let out = TempDir::new().unwrap();
    let o = run_in(out.path(), "tau-study", &configs().join("tau-study.toml"));
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let summary = std::fs::read_to_string(out.path().join("summary.txt")).unwrap();
    assert!(summary.contains("verdict PASS scaling_ode.first_integral"));
    assert!(summary.contains("metric asymptote_ratio@1e6"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(json["scenario"], "tau-study");
    assert_eq!(json["pass"], true);
    let csv = std::fs::read_to_string(out.path().join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with("t,tau,taudot,Q,first_integral\n"));
}

#[test]
fn every_shipped_config_passes() {
    for (scenario, file) in [
        ("gaussian-oracle", "gaussian-oracle.toml"),
        ("rescaled-run", "rescaled-run.toml"),
        ("rescaled-run", "qns-run.toml"),
        ("fokker-planck", "fokker-planck.toml"),
        ("isentropic-contrast", "isentropic-contrast.toml"),
    ] {
        let out = TempDir::new().unwrap();
        let o = run_in(out.path(), scenario, &configs().join(file));
        assert_eq!(
            o.status.code(),
            Some(0),
            "{file}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
        assert!(out.path().join("diagnostics.csv").is_file());
        assert!(out.path().join("summary.json").is_file());
    }
}

#[test]
fn gaussian_oracle_reports_order() {
    let out = TempDir::new().unwrap();
    let o = run_in(
        out.path(),
        "gaussian-oracle",
        &configs().join("gaussian-oracle.toml"),
    );
    assert_eq!(o.status.code(), Some(0));
    let summary = std::fs::read_to_string(out.path().join("summary.txt")).unwrap();
    for key in [
        "metric l1_error_n400",
        "metric l1_error_n800",
        "metric observed_order",
        "rescaled_solver.refinement_ratio",
    ] {
        assert!(summary.contains(key), "missing {key}");
    }
    assert!(out.path().join("frame_1.000000.csv").is_file());
    assert!(out.path().join("oracle.csv").is_file());
}

#[test]
fn diagnostics_are_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let cfg = configs().join("qns-run.toml");
    run_in(a.path(), "rescaled-run", &cfg);
    run_in(b.path(), "rescaled-run", &cfg);
    let read = |d: &TempDir| std::fs::read(d.path().join("diagnostics.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn verdict_failure_exits_with_1() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "[horizon]\nt_end = 1e4\n[tolerances]\nfirst_integral_drift = 0.0\n",
    );
    let o = run_in(&dir.path().join("out"), "tau-study", &cfg);
    assert_eq!(o.status.code(), Some(1));
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("verdict FAIL scaling_ode.first_integral"));
    assert!(summary.ends_with("result FAIL\n"));
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[model]\nkappa = -1.0\n");
    let o = run_in(&dir.path().join("out"), "tau-study", &cfg);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("model.kappa"));
    assert!(!dir.path().join("out").exists());

    let o = run_in(&dir.path().join("out"), "shock-tube", &cfg);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error: unknown scenario"));

    let o = run_in(
        &dir.path().join("out"),
        "tau-study",
        &dir.path().join("missing.toml"),
    );
    assert_eq!(o.status.code(), Some(2));

    let o = disperse(&["tau-study"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mellet_vasseur_regime_is_checked() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "[model]\neps = 2.0\nnu = 1.0\n[diagnostics]\nmellet_vasseur = true\n[initial]\nkind = \"profile\"\nname = \"gamma\"\n",
    );
    let o = run_in(&dir.path().join("out"), "rescaled-run", &cfg);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("model.eps") && err.contains("eps <= nu"),
        "{err}"
    );
}

#[test]
fn profile_from_file() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("x,rho,u\n");
    for i in 0..=400 {
        let x = -10.0 + 0.05 * i as f64;
        csv.push_str(&format!(
            "{x},{},{}\n",
            (-(x - 0.5f64).powi(2)).exp(),
            0.1 * x
        ));
    }
    std::fs::write(dir.path().join("data.csv"), csv).unwrap();
    let cfg = write_config(&dir, "[initial]\nkind = \"file\"\npath = \"data.csv\"\n[horizon]\nt_end = 2.0\n[observe]\nframes = false\n");
    let o = run_in(&dir.path().join("out"), "rescaled-run", &cfg);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(!dir.path().join("out/frame_0.000000.csv").exists());

    let cfg = write_config(&dir, "[initial]\nkind = \"file\"\npath = \"nope.csv\"\n");
    let o = run_in(&dir.path().join("out"), "rescaled-run", &cfg);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("initial.path"));
}

#[test]
fn singular_compactified_horizon_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(configs().join("isentropic-contrast.toml"))
        .unwrap()
        .replace("sigma_end = 0.99", "sigma_end = 1.0");
    let cfg = write_config(&dir, &text);
    let o = run_in(&dir.path().join("out"), "isentropic-contrast", &cfg);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn unequal_contrast_masses_are_rejected() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(configs().join("isentropic-contrast.toml"))
        .unwrap()
        .replace(
            "{ amplitude = 0.05, center = -1.5",
            "{ amplitude = 0.04, center = -1.5",
        );
    let cfg = write_config(&dir, &text);
    let o = run_in(&dir.path().join("out"), "isentropic-contrast", &cfg);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
