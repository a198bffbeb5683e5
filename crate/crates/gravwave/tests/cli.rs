use std::path::Path;
use std::process::{Command, Output};

use gravwave::diagnostics::read_diagnostics;

fn gravwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gravwave"))
        .args(args)
        .env_remove("GRAVWAVE_THREADS")
        .output()
        .unwrap()
}

fn small_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("run.cfg");
    let text = format!(
        "# small smoke run\ngrid.n=256\ngrid.period=200\ninit.amplitude=0.01\n\
         evolution.dt=0.1\nevolution.t_end=10\noutput.dir={}\noutput.snapshot_every=20\n\
         output.diagnostics_every=5\n{extra}",
        dir.join("out").display()
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn version_and_help() {
    let out = gravwave(&["version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("gravwave "));
    assert_eq!(gravwave(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_symbols_reports_small_residuals() {
    let out = gravwave(&["check-symbols", "--samples", "2000", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["max_general_vs_closed"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["sgn_zero_convention"], "sgn(0) = 0");
}

#[test]
fn dno_test_prints_csv() {
    let out = gravwave(&["dno-test", "--orders", "2,4", "--epsilons", "0.02", "--n", "128"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "order,epsilon,rel_err_vs_oracle,selfadjoint_defect");
    assert_eq!(lines.len(), 3);
    for l in &lines[1..] {
        let err: f64 = l.split(',').nth(2).unwrap().parse().unwrap();
        assert!(err < 1e-12);
    }
}

#[test]
fn simulate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = gravwave(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("out");
    for f in ["resolved_config.cfg", "diagnostics.csv", "run_summary.json", "profile_000000.gwspec", "corrected_000000.json"] {
        assert!(run.join(f).exists(), "missing {f}");
    }
    let d = read_diagnostics(&std::fs::read(run.join("diagnostics.csv")).unwrap()).unwrap();
    assert_eq!(d.records.len(), 21);
    assert_eq!(d.records.last().unwrap().t, 10.0);

    let out = gravwave(&["analyze", "--input", run.to_str().unwrap(), "--fit-window", "1:10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(run.join("analysis.json")).unwrap()).unwrap();
    assert_eq!(v["phase_tolerance"], 0.2);
    assert_eq!(v["separation_min"], 3.0);
    assert!(v["decay_exponent"].as_f64().unwrap().is_finite());
}

#[test]
fn validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let text = std::fs::read_to_string(&cfg).unwrap().replace("grid.n=256", "grid.n=300");
    std::fs::write(&cfg, text).unwrap();
    let out = gravwave(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("grid.n") && err.contains("power of two") && err.contains("line 2"), "{err}");

    let cfg = small_config(dir.path(), "evolution.dt=0.2\n");
    let out = gravwave(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate key evolution.dt on lines 5 and 10"));

    let cfg = small_config(dir.path(), "");
    let text = std::fs::read_to_string(&cfg).unwrap().replace("evolution.dt=0.1", "evolution.dt=0.5");
    std::fs::write(&cfg, text).unwrap();
    let out = gravwave(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("evolution.dt violates"));

    assert_eq!(gravwave(&["analyze", "--input", "/nonexistent/run"]).status.code(), Some(1));
    assert_eq!(gravwave(&["analyze", "--input", ".", "--fit-window", "9:3"]).status.code(), Some(1));
    // clap usage errors
    assert_eq!(gravwave(&["simulate"]).status.code(), Some(2));
}

#[test]
fn thread_cap_is_validated() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_gravwave"))
            .arg("version")
            .env("GRAVWAVE_THREADS", v)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("4"), Some(0));
    assert_eq!(run("0"), Some(1));
    assert_eq!(run("many"), Some(1));
}

#[test]
fn runtime_abort_exits_2_and_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("steep.cfg");
    // the surface steepens past the series regime after a few steps
    let text = format!(
        "grid.n=1024\ngrid.period=100\ninit.amplitude=1.0\ninit.width=1\nevolution.dt=0.05\n\
         evolution.t_end=50\nevolution.order=2\noutput.dir={}\noutput.snapshot_every=1000\n\
         output.diagnostics_every=2\n",
        dir.path().join("out").display()
    );
    std::fs::write(&path, text).unwrap();
    let out = gravwave(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slope"));
    let run = dir.path().join("out");
    let d = read_diagnostics(&std::fs::read(run.join("diagnostics.csv")).unwrap()).unwrap();
    assert!(d.records.len() > 1);
    assert!(d.records.last().unwrap().t < 50.0);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(run.join("run_summary.json")).unwrap()).unwrap();
    assert!(summary["aborted"].as_str().unwrap().contains("slope"));
}
