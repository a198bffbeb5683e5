use std::path::Path;

use gravwave::cli::exit_code;
use gravwave::config::{parse_config_str, render_config, validate_config, SimConfig};
use gravwave::diagnostics::read_diagnostics;
use gravwave::evolution::{run, Simulation};
use gravwave::snapshot::Snapshot;
use gravwave::Error;
use num_complex::Complex64;

fn config(dir: &Path, order: usize) -> SimConfig {
    let mut cfg = SimConfig::default();
    cfg.grid.n = 256;
    cfg.grid.period = 200.0;
    cfg.init.noise = 0.2;
    cfg.init.seed = 9;
    cfg.evolution.dt = 0.1;
    cfg.evolution.t_end = 20.0;
    cfg.evolution.order = order;
    cfg.output.dir = dir.to_path_buf();
    cfg.output.snapshot_every = 50;
    cfg.output.diagnostics_every = 10;
    cfg.output.probe_frequencies = vec![0.5, 1.0];
    validate_config(&mut cfg).unwrap();
    cfg
}

#[test]
fn identical_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(&config(a.path(), 3)).unwrap();
    run(&config(b.path(), 3)).unwrap();
    // resolved_config.cfg names the output directory, so it is left out
    for f in ["diagnostics.csv", "run_summary.json", "profile_000004.gwspec", "corrected_000004.gwspec"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn resolved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), 3);
    run(&cfg).unwrap();
    let text = std::fs::read_to_string(dir.path().join("resolved_config.cfg")).unwrap();
    assert_eq!(parse_config_str(&text).unwrap(), cfg);
    assert_eq!(render_config(&parse_config_str(&text).unwrap()), text);
}

#[test]
fn snapshots_match_the_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let tr = run(&config(dir.path(), 3)).unwrap();
    assert_eq!(tr.snapshots.len(), 5);
    for s in &tr.snapshots {
        let bin = Snapshot::read(&dir.path().join(format!("profile_{:06}.gwspec", s.index))).unwrap();
        let json = Snapshot::read(&dir.path().join(format!("corrected_{:06}.json", s.index))).unwrap();
        assert_eq!(bin.t, s.t);
        assert_eq!(bin.to_spectrum().unwrap().coeffs(), s.profile.coeffs());
        assert_eq!(json.to_spectrum().unwrap().coeffs(), s.corrected.coeffs());
    }
    let d = read_diagnostics(&std::fs::read(dir.path().join("diagnostics.csv")).unwrap()).unwrap();
    assert_eq!(d.records, tr.records);
}

#[test]
fn linear_run_keeps_profile_fixed() {
    let dir = tempfile::tempdir().unwrap();
    let tr = run(&config(dir.path(), 1)).unwrap();
    let z0 = tr.records[0].z_profile;
    let f0 = &tr.snapshots[0].profile;
    for r in &tr.records {
        assert!((r.z_profile - z0).abs() <= 1e-12 * z0, "t = {}", r.t);
    }
    for s in &tr.snapshots {
        let d = (&s.profile - f0).max_abs_coeff() / f0.max_abs_coeff();
        assert!(d <= 1e-12, "t = {}: {d:e}", s.t);
    }
    assert!(tr.summary.max_relative_energy_drift < 1e-12);
}

#[test]
fn non_finite_state_aborts_with_time() {
    let dir = tempfile::tempdir().unwrap();
    let mut sim = Simulation::new(&config(dir.path(), 3)).unwrap();
    for _ in 0..3 {
        sim.advance().unwrap();
    }
    sim.state.h.coeffs_mut()[130] = Complex64::new(f64::NAN, 0.0);
    let err = sim.record().unwrap_err();
    match &err {
        Error::NonFinite { t, .. } => assert!((t - 0.3).abs() < 1e-12),
        other => panic!("{other}"),
    }
    assert_eq!(exit_code(&Err(err)), 2);
}
