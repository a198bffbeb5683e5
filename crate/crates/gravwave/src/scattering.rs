//! Modified scattering of the profile.
//!
//! The profile f̂ = e^{itΛ}V̂ does not converge; its phase drifts like
//! −(|ξ|⁴/π)|f̂|² ln t. The accumulated phase
//!
//! ```text
//! H(ξ,t) = (|ξ|⁴/π) ∫₀ᵗ |f̂(ξ,s)|² ds/(s+1)
//! ```
//!
//! removes the drift, and g = e^{iH}f̂ is expected to converge.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::parse_config_str;
use crate::diagnostics::{read_diagnostics, Diagnostics};
use crate::error::{Error, Result};
use crate::grid::FourierGrid;
use crate::snapshot::Snapshot;
use crate::spectrum::Spectrum;

/// Default frequency weight of [`cauchy_norm`] in the analysis output.
pub const DEFAULT_CAUCHY_WEIGHT: f64 = 4.0;
/// Agreement demanded between measured and predicted phase slopes.
pub const PHASE_TOLERANCE: f64 = 0.2;
/// Minimum ratio of uncorrected to corrected Cauchy differences.
pub const SEPARATION_MIN: f64 = 3.0;
/// Largest phase change between samples the unwrapper accepts.
pub const UNWRAP_GUARD: f64 = PI / 2.0;

/// Running trapezoid approximation of H(ξ,t) on every grid frequency.
#[derive(Debug, Clone)]
pub struct PhaseAccumulator {
    grid: FourierGrid,
    weight: Vec<f64>,
    phase: Vec<f64>,
    last: Option<(f64, Vec<f64>)>,
}

impl PhaseAccumulator {
    pub fn new(grid: &FourierGrid) -> Self {
        let weight = grid.symbols().abs.iter().map(|a| a.powi(4) / PI).collect();
        PhaseAccumulator {
            grid: grid.clone(),
            weight,
            phase: vec![0.0; grid.n()],
            last: None,
        }
    }

    fn integrand(&self, f: &Spectrum, t: f64) -> Vec<f64> {
        f.coeffs().iter().map(|c| c.norm_sqr() / (1.0 + t)).collect()
    }

    /// Feed the profile at time `t`. The first sample only sets the left
    /// endpoint; later ones add one trapezoid panel.
    pub fn accumulate(&mut self, f: &Spectrum, t: f64) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if !t.is_finite() {
            return Err(Error::InvalidInput("non-finite time".into()));
        }
        let now = self.integrand(f, t);
        if let Some((t0, prev)) = &self.last {
            if !(t > *t0) {
                return Err(Error::NonMonotoneTime { prev: *t0, next: t });
            }
            let half = 0.5 * (t - t0);
            for ((h, w), (a, b)) in self.phase.iter_mut().zip(&self.weight).zip(prev.iter().zip(&now)) {
                *h += w * half * (a + b);
            }
        }
        self.last = Some((t, now));
        Ok(())
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    /// H on the grid frequencies, in ascending order.
    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn last_time(&self) -> Option<f64> {
        self.last.as_ref().map(|(t, _)| *t)
    }
}

/// Stepwise form of [`PhaseAccumulator::accumulate`] that also checks the
/// supplied step against the previous sample time.
pub fn accumulate_phase(acc: &mut PhaseAccumulator, f: &Spectrum, t: f64, dt: f64) -> Result<()> {
    if let Some(last) = acc.last_time() {
        if (last + dt - t).abs() > 1e-9 * (1.0 + t.abs()) {
            return Err(Error::NonMonotoneTime { prev: last, next: t });
        }
    }
    acc.accumulate(f, t)
}

/// g = e^{iH} f̂
pub fn corrected_profile(f: &Spectrum, acc: &PhaseAccumulator) -> Spectrum {
    let table: Vec<Complex64> = acc.phase().iter().map(|&h| Complex64::from_polar(1.0, h)).collect();
    f.map_complex(&table)
}

/// ‖(1+|ξ|)^w (g₂ − g₁)‖ in L²(dξ), by the grid sum Δξ Σ.
pub fn cauchy_norm(g1: &Spectrum, g2: &Spectrum, w: f64) -> Result<f64> {
    if g1.grid() != g2.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = g1.grid();
    let sum: f64 = g1
        .coeffs()
        .iter()
        .zip(g2.coeffs())
        .zip(&grid.symbols().abs)
        .map(|((a, b), &k)| (1.0 + k).powf(2.0 * w) * (b - a).norm_sqr())
        .sum();
    Ok((grid.dxi() * sum).sqrt())
}

/// Least-squares fit of log(value) against log(1+t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r2: f64,
    pub samples: usize,
}

/// Minimum number of samples a fit accepts.
pub const MIN_FIT_SAMPLES: usize = 8;

fn in_window(t: f64, w: (f64, f64)) -> bool {
    t >= w.0 && t <= w.1
}

/// Ordinary least squares y = a + bx, returning (b, a, r²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

pub fn decay_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| in_window(*t, window)).collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            need: MIN_FIT_SAMPLES,
            got: pts.len(),
        });
    }
    if let Some((t, v)) = pts.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput(format!("value {v} at t = {t} is not positive")));
    }
    let x: Vec<f64> = pts.iter().map(|(t, _)| (1.0 + t).ln()).collect();
    let y: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let (exponent, intercept, r2) = linear_fit(&x, &y);
    Ok(DecayFit {
        exponent,
        intercept,
        r2,
        samples: pts.len(),
    })
}

/// Nearest-branch unwrapping; a wrapped increment beyond [`UNWRAP_GUARD`]
/// means the sampling is too coarse to tell branches apart.
pub fn unwrap_phase(t: &[f64], arg: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(arg.len());
    for (i, &a) in arg.iter().enumerate() {
        if i == 0 {
            out.push(a);
            continue;
        }
        let prev = out[i - 1];
        let mut d = (a - prev).rem_euclid(2.0 * PI);
        if d > PI {
            d -= 2.0 * PI;
        }
        if d.abs() > UNWRAP_GUARD {
            return Err(Error::PhaseUnwrap { t: t[i], jump: d });
        }
        out.push(prev + d);
    }
    Ok(out)
}

/// Time series recorded at one probe frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSeries {
    pub xi: f64,
    pub t: Vec<f64>,
    pub absf: Vec<f64>,
    pub argf: Vec<f64>,
    pub phase_h: Vec<f64>,
}

impl ProbeSeries {
    pub fn from_diagnostics(d: &Diagnostics, probe: usize, xi: f64) -> Result<Self> {
        if probe >= d.probes {
            return Err(Error::InvalidInput(format!("no probe {probe}")));
        }
        let col = |f: fn(&crate::diagnostics::ProbeSample) -> f64| {
            d.records.iter().map(|r| f(&r.probes[probe])).collect::<Vec<_>>()
        };
        Ok(ProbeSeries {
            xi,
            t: d.records.iter().map(|r| r.t).collect(),
            absf: col(|p| p.absf),
            argf: col(|p| p.argf),
            phase_h: col(|p| p.phase_h),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSlope {
    pub xi: f64,
    /// d arg f̂ / d ln(1+t)
    pub measured: f64,
    /// −(|ξ|⁴/π) · mean |f̂|²
    pub predicted: f64,
    /// d arg g / d ln(1+t), ideally close to 0
    pub corrected: f64,
    pub relative_error: f64,
    pub within_tolerance: bool,
    pub samples: usize,
}

pub fn phase_slope_check(p: &ProbeSeries, window: (f64, f64)) -> Result<PhaseSlope> {
    let idx: Vec<usize> = (0..p.t.len()).filter(|&i| in_window(p.t[i], window)).collect();
    if idx.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            need: MIN_FIT_SAMPLES,
            got: idx.len(),
        });
    }
    let t: Vec<f64> = idx.iter().map(|&i| p.t[i]).collect();
    let argf: Vec<f64> = idx.iter().map(|&i| p.argf[i]).collect();
    let argg: Vec<f64> = idx.iter().map(|&i| p.argf[i] + p.phase_h[i]).collect();
    let uf = unwrap_phase(&t, &argf)?;
    let ug = unwrap_phase(&t, &argg)?;
    let x: Vec<f64> = t.iter().map(|s| (1.0 + s).ln()).collect();
    let (measured, _, _) = linear_fit(&x, &uf);
    let (corrected, _, _) = linear_fit(&x, &ug);
    let mean_sq = idx.iter().map(|&i| p.absf[i].powi(2)).sum::<f64>() / idx.len() as f64;
    let predicted = -p.xi.abs().powi(4) / PI * mean_sq;
    let relative_error = if predicted != 0.0 {
        ((measured - predicted) / predicted).abs()
    } else {
        measured.abs()
    };
    Ok(PhaseSlope {
        xi: p.xi,
        measured,
        predicted,
        corrected,
        relative_error,
        within_tolerance: relative_error <= PHASE_TOLERANCE,
        samples: idx.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CauchyResidual {
    pub t1: f64,
    pub t2: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Asymptotic {
    /// w∞ ≈ g(t_end)
    pub w_inf: Spectrum,
    /// ‖g(t_end) − g(t_end/2)‖
    pub residual: f64,
    /// Residuals over (T/2, T), (T/4, T/2), ... from the latest pair down.
    pub dyadic: Vec<CauchyResidual>,
    /// Exponent p₁ of residual ~ t^{−p₁}, when at least two pairs exist.
    pub p1: Option<f64>,
    pub monotone: bool,
}

/// Snapshot whose time is closest to `t`, if within 1% of it.
fn nearest(snaps: &[(f64, Spectrum)], t: f64) -> Option<&(f64, Spectrum)> {
    snaps
        .iter()
        .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
        .filter(|s| (s.0 - t).abs() <= 0.01 * t.max(1.0))
}

/// Estimate w∞ and the dyadic convergence history from corrected profiles.
pub fn asymptotic_profile(snaps: &[(f64, Spectrum)], w: f64) -> Result<Asymptotic> {
    if snaps.len() < 3 {
        return Err(Error::InsufficientSamples {
            need: 3,
            got: snaps.len(),
        });
    }
    let last = snaps
        .iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("non-empty");
    let mut dyadic = Vec::new();
    let mut t2 = last.0;
    while t2 > 0.0 {
        let (Some(b), Some(a)) = (nearest(snaps, t2), nearest(snaps, t2 / 2.0)) else {
            break;
        };
        if a.0 >= b.0 {
            break;
        }
        dyadic.push(CauchyResidual {
            t1: a.0,
            t2: b.0,
            residual: cauchy_norm(&a.1, &b.1, w)?,
        });
        t2 /= 2.0;
    }
    let residual = dyadic.first().map(|d| d.residual).unwrap_or(0.0);
    // listed latest first, so convergence means increasing down the list
    let monotone = dyadic.windows(2).all(|p| p[0].residual < p[1].residual);
    let usable: Vec<&CauchyResidual> = dyadic.iter().filter(|d| d.residual > 0.0).collect();
    let p1 = (usable.len() >= 2).then(|| {
        let x: Vec<f64> = usable.iter().map(|d| d.t2.ln()).collect();
        let y: Vec<f64> = usable.iter().map(|d| d.residual.ln()).collect();
        -linear_fit(&x, &y).0
    });
    Ok(Asymptotic {
        w_inf: last.1.clone(),
        residual,
        dyadic,
        p1,
        monotone,
    })
}

/// Output of `analyze`, serialized to analysis.json.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub fit_window: (f64, f64),
    /// Fitted exponent of the Z′ series.
    pub decay_exponent: f64,
    pub r2: f64,
    pub decay_fits: Vec<(String, DecayFit)>,
    pub phase_slopes: Vec<PhaseSlope>,
    pub cauchy_weight: f64,
    pub cauchy_residuals: Vec<CauchyResidual>,
    pub cauchy_monotone: bool,
    pub p1_fit: Option<f64>,
    /// ‖f̂(t₂) − f̂(t₁)‖ / ‖g(t₂) − g(t₁)‖ at (t₁,t₂) = (T/2, T), weight 0.
    pub separation_ratio: Option<f64>,
    pub separation_times: Option<(f64, f64)>,
    pub phase_tolerance: f64,
    pub separation_min: f64,
    pub sgn_zero_convention: &'static str,
}

fn load_snapshots(dir: &Path, prefix: &str, grid: Option<&FourierGrid>) -> Result<Vec<(f64, Spectrum)>> {
    let mut names: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with(prefix) && n.ends_with(".gwspec"))
        .collect();
    names.sort();
    let mut out = Vec::with_capacity(names.len());
    let mut shared: Option<FourierGrid> = grid.cloned();
    for name in names {
        let snap = Snapshot::read(&dir.join(&name))?;
        let spec = match &shared {
            Some(g) => snap.to_spectrum_on(g)?,
            None => {
                let s = snap.to_spectrum()?;
                shared = Some(s.grid().clone());
                s
            }
        };
        out.push((snap.t, spec));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Read diagnostics.csv, resolved_config.cfg and the snapshots of a run
/// directory and compute the scattering diagnostics.
pub fn analyze(dir: &Path, window: (f64, f64), cauchy_weight: f64) -> Result<Analysis> {
    if !(window.0 < window.1) {
        return Err(Error::InvalidInput(format!(
            "fit window {}:{} is empty",
            window.0, window.1
        )));
    }
    if !dir.is_dir() {
        return Err(Error::InvalidInput(format!("{} is not a directory", dir.display())));
    }
    let diag = read_diagnostics(&std::fs::read(dir.join("diagnostics.csv"))?)?;
    let cfg = parse_config_str(&std::fs::read_to_string(dir.join("resolved_config.cfg"))?)?;
    let probes = &cfg.output.probe_frequencies;
    if probes.len() != diag.probes {
        return Err(Error::Diagnostics(format!(
            "{} probe column groups but {} probe frequencies configured",
            diag.probes,
            probes.len()
        )));
    }
    let mut decay_fits = Vec::new();
    for col in ["zprime", "linf_h", "linf_lambda_phi"] {
        let s = diag.series(col).expect("known column");
        decay_fits.push((col.to_string(), decay_fit(&s, window)?));
    }
    let (decay_exponent, r2) = (decay_fits[0].1.exponent, decay_fits[0].1.r2);
    let mut phase_slopes = Vec::new();
    for (i, &xi) in probes.iter().enumerate() {
        let series = ProbeSeries::from_diagnostics(&diag, i, xi)?;
        phase_slopes.push(phase_slope_check(&series, window)?);
    }
    let corrected = load_snapshots(dir, "corrected_", None)?;
    let grid = corrected.first().map(|s| s.1.grid().clone());
    let profiles = load_snapshots(dir, "profile_", grid.as_ref())?;
    let (cauchy_residuals, cauchy_monotone, p1_fit) = if corrected.len() >= 3 {
        let a = asymptotic_profile(&corrected, cauchy_weight)?;
        (a.dyadic, a.monotone, a.p1)
    } else {
        (Vec::new(), false, None)
    };
    let mut separation_ratio = None;
    let mut separation_times = None;
    if let Some(last) = corrected.last() {
        let t2 = last.0;
        if let (Some(g1), Some(g2), Some(f1), Some(f2)) = (
            nearest(&corrected, t2 / 2.0),
            nearest(&corrected, t2),
            nearest(&profiles, t2 / 2.0),
            nearest(&profiles, t2),
        ) {
            if g1.0 < g2.0 {
                let dg = cauchy_norm(&g1.1, &g2.1, 0.0)?;
                let df = cauchy_norm(&f1.1, &f2.1, 0.0)?;
                separation_ratio = Some(if dg > 0.0 { df / dg } else { f64::INFINITY });
                separation_times = Some((g1.0, g2.0));
            }
        }
    }
    Ok(Analysis {
        fit_window: window,
        decay_exponent,
        r2,
        decay_fits,
        phase_slopes,
        cauchy_weight,
        cauchy_residuals,
        cauchy_monotone,
        p1_fit,
        separation_ratio,
        separation_times,
        phase_tolerance: PHASE_TOLERANCE,
        separation_min: SEPARATION_MIN,
        sgn_zero_convention: "sgn(0) = 0",
    })
}
