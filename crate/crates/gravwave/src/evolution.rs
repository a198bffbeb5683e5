//! Time integration in the diagonal variable u = h + iΛφ.
//!
//! The system reads ∂ₜu = −iΛu + N(u) with N = N_h + iΛN_φ. The linear part
//! is propagated exactly (integrating factor) and N by classical RK4.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{render_config, InitConfig, InitProfile, SimConfig};
use crate::diagnostics::{DiagnosticsWriter, ProbeSample, Record};
use crate::error::{Error, Result};
use crate::grid::FourierGrid;
use crate::nonlinearity::{energy_e0, nonlinear_rhs, SurfaceState, Truncation};
use crate::normal_form::to_normal_form;
use crate::norms::{weighted, z_norm, zprime};
use crate::scattering::{corrected_profile, PhaseAccumulator};
use crate::snapshot::Snapshot;
use crate::spectrum::Spectrum;

/// Boundary values of |h| must stay below this fraction of sup|h|.
pub const WRAP_GUARD: f64 = 1e-8;

/// max(|h(−L/2)|, |h(L/2 − Δx)|) / sup|h|, zero for h ≡ 0.
pub fn wrap_ratio(h: &Spectrum) -> f64 {
    let v = h.to_real_values();
    let sup = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if sup == 0.0 {
        return 0.0;
    }
    v[0].abs().max(v[v.len() - 1].abs()) / sup
}

fn envelope_shape(x: f64, init: &InitConfig, modes: &[(f64, f64, f64)]) -> f64 {
    let env = (-(x * x) / (2.0 * init.width * init.width)).exp();
    let base = match init.profile {
        InitProfile::Gaussian => 1.0,
        InitProfile::Wavepacket => (init.carrier * x).cos(),
    };
    let noise: f64 = modes.iter().map(|(a, k, th)| a * (k * x + th).cos()).sum();
    env * (base + init.noise * noise)
}

/// h₀ with sup|h₀| = ε on the grid and φ₀ = 0.
pub fn init_state(grid: &FourierGrid, init: &InitConfig) -> Result<SurfaceState> {
    if !(init.amplitude >= 0.0 && init.amplitude.is_finite()) {
        return Err(Error::InvalidInput(format!("amplitude {} must be >= 0", init.amplitude)));
    }
    if init.amplitude == 0.0 {
        return Ok(SurfaceState::zero(grid));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(init.seed);
    let modes: Vec<(f64, f64, f64)> = (0..8)
        .map(|_| {
            (
                rng.gen_range(0.0..1.0) / 8.0,
                rng.gen_range(0.25..2.0),
                rng.gen_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let raw: Vec<f64> = grid.xs().iter().map(|&x| envelope_shape(x, init, &modes)).collect();
    let sup = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return Err(Error::InvalidInput("initial profile vanishes on the grid".into()));
    }
    let values: Vec<Complex64> = raw
        .iter()
        .map(|v| Complex64::new(init.amplitude * v / sup, 0.0))
        .collect();
    let mut coeffs = grid.forward(&values);
    coeffs[0] = Complex64::new(0.0, 0.0);
    let h = Spectrum::from_coeffs(grid, coeffs)?;
    let ratio = wrap_ratio(&h);
    if ratio > WRAP_GUARD {
        return Err(Error::InvalidInput(format!(
            "initial data reaches the domain edge: |h| there is {ratio:.2e} of sup|h| \
             (limit {WRAP_GUARD:e}); enlarge grid.period or reduce init.width"
        )));
    }
    SurfaceState::new(0.0, h, Spectrum::zeros(grid))
}

/// N(u) = N_h + iΛN_φ
fn nonlinear_u(u: &Spectrum, t: f64, trunc: Truncation) -> Result<Spectrum> {
    if trunc.order < 2 {
        return Ok(Spectrum::zeros(u.grid()));
    }
    let st = SurfaceState::from_u(t, u);
    let (nh, np) = nonlinear_rhs(&st, trunc)?;
    Ok(&nh + &np.lambda().times_i())
}

/// Integrating-factor RK4 of fixed step.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub dt: f64,
    pub trunc: Truncation,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl Stepper {
    pub fn new(grid: &FourierGrid, dt: f64, trunc: Truncation) -> Self {
        let lam = &grid.symbols().lambda;
        let e = |s: f64| lam.iter().map(|&l| Complex64::from_polar(1.0, -l * s)).collect();
        Stepper {
            dt,
            trunc,
            half: e(dt / 2.0),
            full: e(dt),
        }
    }

    /// Advance u from t to t + dt.
    pub fn step_u(&self, u: &Spectrum, t: f64) -> Result<Spectrum> {
        let dt = self.dt;
        let eh = |s: &Spectrum| s.map_complex(&self.half);
        let ef = |s: &Spectrum| s.map_complex(&self.full);
        let k1 = nonlinear_u(u, t, self.trunc)?;
        let mut a = u.clone();
        a.axpy(dt / 2.0, &k1);
        let u2 = eh(&a);
        let k2 = nonlinear_u(&u2, t + dt / 2.0, self.trunc)?;
        let uh = eh(u);
        let mut u3 = uh.clone();
        u3.axpy(dt / 2.0, &k2);
        let k3 = nonlinear_u(&u3, t + dt / 2.0, self.trunc)?;
        let mut u4 = ef(u);
        u4.axpy(dt, &eh(&k3));
        let k4 = nonlinear_u(&u4, t + dt, self.trunc)?;
        let mut mid = &k2 + &k3;
        mid = eh(&mid) * 2.0;
        let mut out = ef(u);
        out.axpy(dt / 6.0, &ef(&k1));
        out.axpy(dt / 6.0, &mid);
        out.axpy(dt / 6.0, &k4);
        if !out.is_finite() {
            return Err(Error::NonFinite { what: "u", t: t + dt });
        }
        Ok(out)
    }

    pub fn step(&self, state: &SurfaceState) -> Result<SurfaceState> {
        let u = self.step_u(&state.to_u(), state.t)?;
        Ok(SurfaceState::from_u(state.t + self.dt, &u))
    }
}

/// One step of size `dt`; see [`Stepper`] to reuse the exponential tables.
pub fn step(state: &SurfaceState, dt: f64, trunc: Truncation) -> Result<SurfaceState> {
    Stepper::new(state.grid(), dt, trunc).step(state)
}

/// f̂(ξ,t) = e^{it|ξ|^{1/2}} V̂(ξ,t)
pub fn profile(v: &Spectrum, t: f64) -> Spectrum {
    v.half_wave(t, 1.0)
}

#[derive(Debug, Clone)]
pub struct SnapshotPair {
    pub index: usize,
    pub t: f64,
    pub profile: Spectrum,
    pub corrected: Spectrum,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub t_final: f64,
    pub records: usize,
    pub snapshots: usize,
    pub initial_wrap_ratio: f64,
    pub max_wrap_ratio: f64,
    pub wrap_guard: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub max_relative_energy_drift: f64,
    pub probe_frequencies: Vec<f64>,
    pub order: usize,
    pub effective_dno_order: usize,
    pub sgn_zero_convention: &'static str,
    pub aborted: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub snapshots: Vec<SnapshotPair>,
    pub final_state: SurfaceState,
    pub summary: RunSummary,
}

/// Stepping state of a run: the surface, the phase accumulator and the
/// bookkeeping for diagnostics.
pub struct Simulation {
    pub cfg: SimConfig,
    pub grid: FourierGrid,
    pub state: SurfaceState,
    pub stepper: Stepper,
    pub phase: PhaseAccumulator,
    probe_index: Vec<usize>,
    steps_done: usize,
    energy0: f64,
    max_drift: f64,
    max_wrap: f64,
    initial_wrap: f64,
    last_energy: f64,
}

impl Simulation {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        let grid = FourierGrid::with_dealias(cfg.grid.n, cfg.grid.period, cfg.evolution.dealias)?;
        let trunc = Truncation::new(cfg.evolution.order, cfg.evolution.dno_order)?;
        let state = init_state(&grid, &cfg.init)?;
        let probe_index = cfg
            .output
            .probe_frequencies
            .iter()
            .map(|&p| {
                grid.snap_frequency(p)
                    .map(|(i, _)| i)
                    .ok_or_else(|| Error::InvalidInput(format!("probe {p} is off the grid")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut phase = PhaseAccumulator::new(&grid);
        phase.accumulate(&Self::profile_of(&state, trunc.order), 0.0)?;
        let energy0 = energy_e0(&state, trunc)?;
        let wrap = wrap_ratio(&state.h);
        Ok(Simulation {
            cfg: cfg.clone(),
            stepper: Stepper::new(&grid, cfg.evolution.dt, trunc),
            grid,
            state,
            phase,
            probe_index,
            steps_done: 0,
            energy0,
            max_drift: 0.0,
            max_wrap: wrap,
            initial_wrap: wrap,
            last_energy: energy0,
        })
    }

    /// e^{itΛ} of the normal-form variable; without quadratic terms the
    /// transform is the identity and the profile is built from u itself.
    fn profile_of(state: &SurfaceState, order: usize) -> Spectrum {
        if order < 2 {
            return profile(&state.to_u(), state.t);
        }
        profile(&to_normal_form(state).v, state.t)
    }

    pub fn total_steps(&self) -> usize {
        (self.cfg.evolution.t_end / self.cfg.evolution.dt).round() as usize
    }

    pub fn steps_done(&self) -> usize {
        self.steps_done
    }

    /// Advance one step and fold the new profile into H.
    pub fn advance(&mut self) -> Result<()> {
        let next = self.stepper.step(&self.state)?;
        // time from the step count, so runs do not accumulate rounding
        let t = (self.steps_done + 1) as f64 * self.stepper.dt;
        self.state = SurfaceState { t, ..next };
        self.steps_done += 1;
        self.phase.accumulate(&Self::profile_of(&self.state, self.stepper.trunc.order), t)?;
        Ok(())
    }

    pub fn current_profile(&self) -> Spectrum {
        Self::profile_of(&self.state, self.stepper.trunc.order)
    }

    pub fn record(&mut self) -> Result<Record> {
        let st = &self.state;
        let f = Self::profile_of(st, self.stepper.trunc.order);
        let g = corrected_profile(&f, &self.phase);
        let energy = energy_e0(st, self.stepper.trunc)?;
        self.last_energy = energy;
        if self.energy0 > 0.0 {
            self.max_drift = self.max_drift.max(((energy - self.energy0) / self.energy0).abs());
        }
        self.max_wrap = self.max_wrap.max(wrap_ratio(&st.h));
        let probes = self
            .probe_index
            .iter()
            .map(|&i| ProbeSample {
                absf: f.coeffs()[i].norm(),
                argf: f.coeffs()[i].arg(),
                phase_h: self.phase.phase()[i],
                absg: g.coeffs()[i].norm(),
            })
            .collect();
        let norms = &self.cfg.norms;
        let r = Record {
            t: st.t,
            linf_h: st.h.linf(),
            linf_lambda_phi: st.phi.lambda().linf(),
            zprime: zprime(&st.h, &st.phi, norms.zprime_index),
            z_profile: z_norm(&f, norms),
            energy_e0: energy,
            l2_u: st.to_u().norm_l2(),
            weighted_profile: weighted(&f, norms.sobolev_index),
            probes,
        };
        if !r.is_finite() {
            return Err(Error::NonFinite { what: "diagnostics", t: st.t });
        }
        Ok(r)
    }

    pub fn snapshot(&self, index: usize) -> SnapshotPair {
        let f = self.current_profile();
        let g = corrected_profile(&f, &self.phase);
        SnapshotPair {
            index,
            t: self.state.t,
            profile: f,
            corrected: g,
        }
    }

    fn summary(&self, records: usize, snapshots: usize, aborted: Option<String>) -> RunSummary {
        RunSummary {
            steps: self.steps_done,
            t_final: self.state.t,
            records,
            snapshots,
            initial_wrap_ratio: self.initial_wrap,
            max_wrap_ratio: self.max_wrap,
            wrap_guard: WRAP_GUARD,
            energy_initial: self.energy0,
            energy_final: self.last_energy,
            max_relative_energy_drift: self.max_drift,
            probe_frequencies: self.cfg.output.probe_frequencies.clone(),
            order: self.stepper.trunc.order,
            effective_dno_order: self.stepper.trunc.effective_dno_order(),
            sgn_zero_convention: "sgn(0) = 0",
            aborted,
        }
    }
}

fn write_snapshot(dir: &Path, s: &SnapshotPair) -> Result<()> {
    Snapshot::from_spectrum(&s.profile, s.t).write(dir, &format!("profile_{:06}", s.index))?;
    Snapshot::from_spectrum(&s.corrected, s.t).write(dir, &format!("corrected_{:06}", s.index))?;
    Ok(())
}

fn write_summary(dir: &Path, s: &RunSummary) -> Result<()> {
    std::fs::write(dir.join("run_summary.json"), serde_json::to_string_pretty(s)?)?;
    Ok(())
}

/// Run to `t_end`, writing resolved_config.cfg, diagnostics.csv, snapshots
/// and run_summary.json under `output.dir`. On a runtime failure the rows
/// already written stay on disk and the summary records the abort.
pub fn run(cfg: &SimConfig) -> Result<Trajectory> {
    let dir = cfg.output.dir.clone();
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("resolved_config.cfg"), render_config(cfg))?;
    let mut sim = Simulation::new(cfg)?;
    let csv = BufWriter::new(File::create(dir.join("diagnostics.csv"))?);
    let mut writer = DiagnosticsWriter::new(csv, sim.probe_index.len())?;
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let total = sim.total_steps();
    let (diag_every, snap_every) = (cfg.output.diagnostics_every, cfg.output.snapshot_every);
    let mut body = |sim: &mut Simulation| -> Result<()> {
        for k in 0..=total {
            if k > 0 {
                sim.advance()?;
            }
            if k % diag_every == 0 || k == total {
                let r = sim.record()?;
                writer.write(&r)?;
                records.push(r);
            }
            if k % snap_every == 0 || k == total {
                let s = sim.snapshot(snapshots.len());
                write_snapshot(&dir, &s)?;
                snapshots.push(s);
            }
        }
        Ok(())
    };
    let outcome = body(&mut sim);
    let aborted = outcome.as_ref().err().map(|e| e.to_string());
    let summary = sim.summary(records.len(), snapshots.len(), aborted);
    write_summary(&dir, &summary)?;
    outcome?;
    Ok(Trajectory {
        records,
        snapshots,
        final_state: sim.state,
        summary,
    })
}
