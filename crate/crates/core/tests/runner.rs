use std::fs;

use bopert::config::{Config, Scenario, ScenarioKind};
use bopert::runner::{emit_report, load_record, run_scenario, RunRecord};

fn scenario(kind: ScenarioKind, settings: &[&str]) -> Scenario {
    let mut cfg = Config::default();
    for s in settings {
        cfg.apply(s).unwrap();
    }
    Scenario::from_config(&cfg, kind).unwrap()
}

const SMALL: &[&str] = &["solver.N=16", "solver.T=0.1", "solver.sample_every=20", "check.self=false"];

fn small(kind: ScenarioKind, extra: &[&str]) -> RunRecord {
    let settings: Vec<&str> = SMALL.iter().chain(extra).copied().collect();
    run_scenario(&scenario(kind, &settings))
}

fn listing(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn emission_is_idempotent_and_reloadable() {
    let rec = small(ScenarioKind::BoConservation, &[]);
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    emit_report(&rec, a.path()).unwrap();
    emit_report(&rec, b.path()).unwrap();
    emit_report(&rec, b.path()).unwrap();
    assert_eq!(listing(a.path()), listing(b.path()));

    let reloaded = load_record(a.path()).unwrap();
    assert_eq!(reloaded.tables, rec.tables);
    assert_eq!(reloaded.manifest, rec.manifest);
    emit_report(&reloaded, c.path()).unwrap();
    assert_eq!(listing(a.path()), listing(c.path()));
    assert!(listing(a.path()).iter().all(|(name, _)| !name.ends_with(".tmp")));
}

#[test]
fn empty_record_writes_only_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let rec = RunRecord::new("evolve", 0, Default::default());
    let written = emit_report(&rec, dir.path()).unwrap();
    assert_eq!(written, vec![dir.path().join("manifest.json")]);
    assert!(rec.passed());
}

#[test]
fn drift_table_schema() {
    let rec = small(ScenarioKind::BoConservation, &[]);
    let drift = rec.table("drift").unwrap();
    assert_eq!(drift.columns, ["t", "beta", "rel_drift"]);
    assert_eq!(drift.rows.len(), 6);
    assert_eq!(drift.column("rel_drift").unwrap()[0], 0.0);
    let beta = rec.table("beta").unwrap();
    assert_eq!(beta.columns, ["t", "kappa", "beta", "beta_s"]);
    assert!(beta.column("kappa").unwrap().iter().all(|k| *k == 8.0));
    assert_eq!(rec.manifest.diagnostics["M"], 32.0);
}

#[test]
fn zero_data_has_zero_drift() {
    let rec = small(ScenarioKind::BoConservation, &["initial.kind=zero"]);
    assert!(rec.passed(), "{}", rec.summary());
    let drift = rec.table("drift").unwrap();
    assert!(drift.column("beta").unwrap().iter().all(|b| *b == 0.0));
    assert!(drift.column("rel_drift").unwrap().iter().all(|b| *b == 0.0));
}

#[test]
fn seeded_runs_are_deterministic() {
    let settings = ["initial.kind=rough", "initial.amplitude=0.1", "seed=11"];
    let a = small(ScenarioKind::Evolve, &settings);
    let b = small(ScenarioKind::Evolve, &settings);
    assert_eq!(a.tables, b.tables);
    assert_eq!(a.trajectory, b.trajectory);
    let c = small(ScenarioKind::Evolve, &["initial.kind=rough", "initial.amplitude=0.1", "seed=12"]);
    assert_ne!(a.trajectory, c.trajectory);
}

#[test]
fn evolve_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let rec = small(ScenarioKind::Evolve, &[]);
    emit_report(&rec, dir.path()).unwrap();
    for name in ["evolution.csv", "verdicts.csv", "verdicts.txt", "trajectory.json", "trajectory.bin", "manifest.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["scenario"], "evolve");
    assert_eq!(manifest["config"]["solver.N"], "16");
    assert_eq!(manifest["snapshots"][1], "trajectory.bin");
}

#[test]
fn solver_errors_become_failing_verdicts() {
    let rec = small(ScenarioKind::Evolve, &["initial.amplitude=1e9"]);
    assert!(!rec.passed());
    let v = rec.verdict("evolve").unwrap();
    assert!(v.measured.is_nan());
    assert!(!v.note.is_empty());
}

#[test]
fn gauge_check_records_parameters() {
    let rec = small(
        ScenarioKind::GaugeCheck,
        &["solver.symbol=rayleigh", "symbol.gamma=1", "initial.mean=0.5", "solver.dt=2.5e-4", "solver.sample_every=80"],
    );
    assert!(rec.passed(), "{}", rec.summary());
    let gp = rec.manifest.gauge.unwrap();
    assert_eq!((gp.a0, gp.c0), (1.0, -0.5));
}
