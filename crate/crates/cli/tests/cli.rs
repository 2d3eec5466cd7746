use std::path::PathBuf;
use std::process::Command;

use folia::verify::Verdict;
use folia_cli::{execute, run, Check, Format, RunConfig, RunError, RunReport};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn folia() -> Command {
    Command::new(env!("CARGO_BIN_EXE_folia"))
}

#[test]
fn check_names_round_trip() {
    for c in Check::all(3, true) {
        assert_eq!(c.to_string().parse::<Check>().unwrap(), c);
    }
    assert!("main:x".parse::<Check>().is_err());
    assert!("nonsense".parse::<Check>().is_err());
}

#[test]
fn unknown_check_rejected_at_parse() {
    let err = RunConfig::from_json(r#"{"scenario": "flat_torus", "checks": ["reeb", "reeeb"]}"#).unwrap_err();
    assert!(matches!(err, RunError::Config(m) if m.contains("reeeb")));
}

#[test]
fn unknown_field_rejected() {
    assert!(RunConfig::from_json(r#"{"scenaro": "flat_torus"}"#).is_err());
}

#[test]
fn order_validated_after_construction() {
    let cfg = RunConfig::from_json(r#"{"scenario": "heisenberg", "checks": ["main:1"]}"#).unwrap();
    assert!(matches!(execute(&cfg), Err(RunError::Config(_))));
}

#[test]
fn unknown_scenario_is_construction_error() {
    let cfg = RunConfig::from_json(r#"{"scenario": "klein_bottle"}"#).unwrap();
    assert!(matches!(execute(&cfg), Err(RunError::Construction(_))));
}

#[test]
fn leaf_on_homogeneous_backend_is_error() {
    let cfg = RunConfig::from_json(r#"{"scenario": "heisenberg", "checks": ["leaf:0"]}"#).unwrap();
    assert!(matches!(execute(&cfg), Err(RunError::Evaluation { .. })));
}

#[test]
fn flat_torus_all_checks() {
    let cfg = RunConfig::load(&configs().join("flat_torus.json")).unwrap();
    let rep = execute(&cfg).unwrap();
    assert_eq!(rep.exit_code(), 0);
    assert_eq!(rep.summary.fail, 0);
    for r in &rep.reports {
        if r.scenario.is_some() && r.verdict != Verdict::Diagnostic {
            assert!(r.residual.abs() < 1e-12, "{} {}", r.formula, r.residual);
        }
    }
}

#[test]
fn warped_torus_config_passes() {
    let cfg = RunConfig::load(&configs().join("warped_torus_4.json")).unwrap();
    let rep = execute(&cfg).unwrap();
    assert_eq!(rep.exit_code(), 0);
    assert!(rep.reports.iter().all(|r| r.verdict == Verdict::Pass && r.residual.abs() <= 1e-7));
}

#[test]
fn round_s3_is_inadmissible_not_failed() {
    let cfg = RunConfig::load(&configs().join("round_s3.json")).unwrap();
    let rep = execute(&cfg).unwrap();
    assert_eq!(rep.exit_code(), 0);
    let main = rep.reports.iter().find(|r| r.formula == "main:0").unwrap();
    assert_eq!(main.verdict, Verdict::Inadmissible);
    assert!((main.residual + 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-6);
    assert!(rep.summary.warnings() > 0);
}

#[test]
fn combinatorial_config_runs_without_scenario() {
    let cfg = RunConfig::load(&configs().join("combinatorial.json")).unwrap();
    let rep = execute(&cfg).unwrap();
    assert!(rep.scenario.is_none());
    assert_eq!(rep.summary.fail, 0);
    assert_eq!(rep.summary.pass, rep.reports.len());
}

#[test]
fn tilted_config_with_profile_and_gate() {
    let cfg = RunConfig::load(&configs().join("tilted_torus.json")).unwrap();
    let rep = execute(&cfg).unwrap();
    assert_eq!(rep.exit_code(), 0, "{}", rep.table(true));
    let main = rep.reports.iter().find(|r| r.formula == "main:1").unwrap();
    assert!(main.get("refinement_change").is_some());
}

#[test]
fn profiles_rejected_where_meaningless() {
    let cfg = RunConfig::from_json(
        r#"{"scenario": "heisenberg", "profiles": {"a": {"mean": 2, "amp": 1, "freq": 1, "phase": 0}}}"#,
    )
    .unwrap();
    assert!(matches!(execute(&cfg), Err(RunError::Config(_))));
}

#[test]
fn nonpositive_warp_is_construction_error() {
    let cfg = RunConfig::from_json(
        r#"{"scenario": "warped_torus_4", "profiles": {"a": {"mean": 0.5, "amp": 1, "freq": 1, "phase": 0}}}"#,
    )
    .unwrap();
    assert!(matches!(execute(&cfg), Err(RunError::Construction(_))));
}

#[test]
fn structured_report_round_trips_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = RunConfig {
        scenario: Some("warped_torus_3".into()),
        checks: vec![Check::Reeb, Check::Main(0), Check::Leaf(0), Check::Pointwise],
        output: Some(out.clone()),
        format: Format::Structured,
        ..RunConfig::default()
    };
    let (first, code) = run(&cfg, false).unwrap();
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let parsed = RunReport::from_json(&text).unwrap();
    assert_eq!(parsed, first);
    let (second, _) = run(&cfg, false).unwrap();
    let strip = |r: &RunReport| r.reports.iter().map(|x| x.without_timing()).collect::<Vec<_>>();
    assert_eq!(strip(&first), strip(&second));
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn binary_exit_codes() {
    let ok = folia()
        .args(["run", "--scenario", "round_s3", "--checks", "main:0", "-q"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stderr).contains("warning"));
    let bad = folia().args(["run", "--scenario", "round_s3", "--checks", "main:7"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let fail = folia()
        .args(["run", "--scenario", "warped_torus_3", "--checks", "divergence-selftest", "--tolerance", "1e-300"])
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(1), "{}", String::from_utf8_lossy(&fail.stdout));
}

#[test]
fn list_is_sorted_and_flags_inadmissible() {
    let out = folia().args(["list", "--format", "structured"]).output().unwrap();
    assert!(out.status.success());
    let entries: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = entries.iter().map(|e| e["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(names.contains(&"flat_torus"));
    let w = entries.iter().find(|e| e["name"] == "warped_torus_4").unwrap();
    assert_eq!(w["flags"]["harmonic_perp"], true);
    assert_eq!(w["flags"]["admissible"], true);
    let s = entries.iter().find(|e| e["name"] == "round_s3").unwrap();
    assert_eq!(s["flags"]["admissible"], false);
}
