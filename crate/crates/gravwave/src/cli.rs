//! Command-line front end.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::parse_config;
use crate::dno::{dno_apply, dno_oracle};
use crate::error::{Error, Result};
use crate::evolution::run;
use crate::grid::FourierGrid;
use crate::normal_form::{general_vs_closed, homological_residual, sym_a, sym_b, sym_d};
use crate::scattering::{analyze, DEFAULT_CAUCHY_WEIGHT};
use crate::spectrum::Spectrum;

#[derive(Debug, Parser)]
#[command(name = "gravwave", about = "2-D gravity water waves: simulation and scattering analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a simulation described by a key=value config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit decay and phase diagnostics of a finished run.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Time window t0:t1 for the fits.
        #[arg(long = "fit-window", default_value = "10:1000")]
        fit_window: String,
        /// Frequency weight of the Cauchy differences.
        #[arg(long, default_value_t = DEFAULT_CAUCHY_WEIGHT)]
        weight: f64,
    },
    /// Evaluate the quadratic symbol identities at random frequencies.
    CheckSymbols {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the Dirichlet-Neumann series with the Taylor recursion.
    DnoTest {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        orders: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.04")]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// Print the version.
    Version,
}

pub fn parse_window(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidInput(format!("fit window must look like t0:t1, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolReport {
    pub samples: usize,
    pub seed: u64,
    pub skipped_degenerate: usize,
    pub max_residual_r1: f64,
    pub max_residual_r2: f64,
    pub max_residual_r3: f64,
    pub max_residual: f64,
    pub max_general_vs_closed: f64,
    pub homogeneity_defect: f64,
    pub sgn_zero_convention: &'static str,
}

/// Maximum absolute residuals of the homological identities over random
/// frequency pairs in [−8, 8]², skipping pairs within 1e−6 of the lines
/// ξ = 0, η = 0, ξ = η where the symbols are not smooth. The general b is
/// compared only where D(ξ,η) is nonzero.
pub fn check_symbols(samples: usize, seed: u64) -> SymbolReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = [0.0f64; 3];
    let mut general = 0.0f64;
    let mut homog = 0.0f64;
    let mut skipped = 0;
    let mut taken = 0;
    while taken < samples {
        let xi: f64 = rng.gen_range(-8.0..8.0);
        let eta: f64 = rng.gen_range(-8.0..8.0);
        if xi.abs() < 1e-6 || eta.abs() < 1e-6 || (xi - eta).abs() < 1e-6 {
            skipped += 1;
            continue;
        }
        taken += 1;
        let (a, b, c) = homological_residual(xi, eta);
        r[0] = r[0].max(a.abs());
        r[1] = r[1].max(b.abs());
        r[2] = r[2].max(c.abs());
        if sym_d(xi, eta).abs() > 1e-9 {
            let (db, da1, da2) = general_vs_closed(xi, eta);
            general = general.max(db.abs()).max(da1.abs()).max(da2.abs());
        }
        let scale = 1.0 + xi.abs() + eta.abs();
        let lam: f64 = rng.gen_range(0.1..10.0);
        for f in [sym_a, sym_b] {
            let d = (f(lam * xi, lam * eta) - lam * f(xi, eta)).abs() / (lam * scale);
            homog = homog.max(d);
        }
    }
    SymbolReport {
        samples,
        seed,
        skipped_degenerate: skipped,
        max_residual_r1: r[0],
        max_residual_r2: r[1],
        max_residual_r3: r[2],
        max_residual: r[0].max(r[1]).max(r[2]),
        max_general_vs_closed: general,
        homogeneity_defect: homog,
        sgn_zero_convention: "sgn(0) = 0",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DnoRow {
    pub order: usize,
    pub epsilon: f64,
    pub rel_err_vs_oracle: f64,
    pub selfadjoint_defect: f64,
}

/// Series vs oracle and the symmetry defect |⟨Gf,g⟩ − ⟨f,Gg⟩|/(‖f‖‖g‖) for
/// h = ε(cos(x/2) + ½sin(x/4 + 0.3)) on a period of 16π.
pub fn dno_test(orders: &[usize], epsilons: &[f64], n: usize) -> Result<Vec<DnoRow>> {
    let period = 16.0 * std::f64::consts::PI;
    let grid = FourierGrid::new(n, period)?;
    let mut rows = Vec::new();
    for &eps in epsilons {
        let h = Spectrum::from_real_fn(&grid, |x| eps * ((x / 2.0).cos() + 0.5 * (x / 4.0 + 0.3).sin()));
        let f = Spectrum::from_real_fn(&grid, |x| (x / 2.0).sin() + 0.3 * (-(x * x) / 10.0).exp());
        let g = Spectrum::from_real_fn(&grid, |x| (x / 8.0 + 1.0).cos() + 0.2 * (x / 2.0).cos());
        for &order in orders {
            let a = dno_apply(&h, &f, order)?;
            let b = dno_oracle(&h, &f, order)?;
            let rel = (&a - &b).norm_l2() / b.norm_l2();
            let gg = dno_apply(&h, &g, order)?;
            let defect = (a.inner(&g) - f.inner(&gg)).norm() / (f.norm_l2() * g.norm_l2());
            rows.push(DnoRow {
                order,
                epsilon: eps,
                rel_err_vs_oracle: rel,
                selfadjoint_defect: defect,
            });
        }
    }
    Ok(rows)
}

fn threads_from_env() -> Result<usize> {
    match std::env::var("GRAVWAVE_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| Error::InvalidInput(format!("GRAVWAVE_THREADS must be a positive integer, got '{v}'"))),
    }
}

/// Execute a parsed command, writing results to stdout.
pub fn execute(cli: Cli) -> Result<()> {
    // transforms are single threaded; the cap is validated for forward compatibility
    let _threads = threads_from_env()?;
    match cli.command {
        Command::Simulate { config } => {
            let cfg = parse_config(&config)?;
            let tr = run(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&tr.summary)?);
        }
        Command::Analyze {
            input,
            fit_window,
            weight,
        } => {
            let window = parse_window(&fit_window)?;
            let a = analyze(&input, window, weight)?;
            let text = serde_json::to_string_pretty(&a)?;
            std::fs::write(input.join("analysis.json"), &text)?;
            println!("{text}");
        }
        Command::CheckSymbols { samples, seed } => {
            println!("{}", serde_json::to_string_pretty(&check_symbols(samples, seed))?);
        }
        Command::DnoTest { orders, epsilons, n } => {
            println!("order,epsilon,rel_err_vs_oracle,selfadjoint_defect");
            for r in dno_test(&orders, &epsilons, n)? {
                println!(
                    "{},{:?},{:e},{:e}",
                    r.order, r.epsilon, r.rel_err_vs_oracle, r.selfadjoint_defect
                );
            }
        }
        Command::Version => println!("gravwave {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

/// Exit status for an outcome: 0 success, 1 bad input, 2 runtime abort.
pub fn exit_code(r: &Result<()>) -> i32 {
    match r {
        Ok(()) => 0,
        Err(e) if e.is_validation() => 1,
        Err(_) => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("10:1000").unwrap(), (10.0, 1000.0));
        assert!(parse_window("10").is_err());
        assert!(parse_window("5:1").is_err());
    }

    #[test]
    fn symbol_check_small() {
        let r = check_symbols(500, 7);
        assert!(r.max_residual < 1e-12, "{r:?}");
        assert!(r.max_general_vs_closed < 1e-12);
    }
}
