//! Norms used by the diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormConfig {
    pub sobolev_index: f64,
    pub z_beta: f64,
    pub z_weight: f64,
    pub zprime_index: usize,
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig {
            sobolev_index: 8.0,
            z_beta: 0.01,
            z_weight: 10.0,
            zprime_index: 6,
        }
    }
}

impl NormConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: &str| {
            Err(Error::ConfigValue {
                key: key.into(),
                msg: msg.into(),
            })
        };
        if !(self.sobolev_index >= 0.0 && self.sobolev_index.is_finite()) {
            return bad("norms.sobolev_index", "must be a finite value >= 0");
        }
        if !(self.z_beta > 0.0 && self.z_beta < 1.0) {
            return bad("norms.z_beta", "must lie in (0, 1)");
        }
        if !(self.z_weight >= 0.0 && self.z_weight.is_finite()) {
            return bad("norms.z_weight", "must be a finite value >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    pub sobolev: f64,
    pub z: f64,
    pub zprime: f64,
    pub weighted: f64,
}

/// sqrt((1/L) Σ (1+ξ²)^s |f̂|²)
pub fn sobolev(f: &Spectrum, s: f64) -> f64 {
    let xi = f.grid().freqs();
    let sum: f64 = f
        .coeffs()
        .iter()
        .zip(xi)
        .map(|(c, &x)| (1.0 + x * x).powf(s) * c.norm_sqr())
        .sum();
    (sum / f.grid().period()).sqrt()
}

/// sup_ξ (|ξ|^β + |ξ|^w) |f̂(ξ)|
pub fn z_norm(profile: &Spectrum, cfg: &NormConfig) -> f64 {
    let abs = &profile.grid().symbols().abs;
    profile
        .coeffs()
        .iter()
        .zip(abs)
        .map(|(c, &a)| (a.powf(cfg.z_beta) + a.powf(cfg.z_weight)) * c.norm())
        .fold(0.0, f64::max)
}

/// max_{j<=k} sup|∂ₓ^j f|
pub fn w_k_inf(f: &Spectrum, k: usize) -> f64 {
    let mut d = f.clone();
    let mut best = d.linf();
    for _ in 0..k {
        d = d.dx();
        best = best.max(d.linf());
    }
    best
}

/// W^{k,∞} size of h plus that of Λφ.
pub fn zprime(h: &Spectrum, phi: &Spectrum, k: usize) -> f64 {
    w_k_inf(h, k) + w_k_inf(&phi.lambda(), k)
}

/// ‖x∂ₓf‖ in H^{s/2}, with x the grid coordinate on [-L/2, L/2).
pub fn weighted(profile: &Spectrum, s: f64) -> f64 {
    let grid = profile.grid();
    let d = profile.dx().to_values();
    let xd: Vec<Complex64> = d.iter().zip(grid.xs()).map(|(v, x)| v * x).collect();
    let mut spec = grid.forward(&xd);
    spec[0] = Complex64::new(0.0, 0.0);
    let spec = Spectrum::from_coeffs(grid, spec).expect("length checked by grid");
    sobolev(&spec, s / 2.0)
}

pub fn norms(h: &Spectrum, phi: &Spectrum, profile: &Spectrum, cfg: &NormConfig) -> Norms {
    Norms {
        sobolev: sobolev(h, cfg.sobolev_index) + sobolev(&phi.lambda(), cfg.sobolev_index),
        z: z_norm(profile, cfg),
        zprime: zprime(h, phi, cfg.zprime_index),
        weighted: weighted(profile, cfg.sobolev_index),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn zero_inputs() {
        let g = make_grid(32, 10.0).unwrap();
        let z = Spectrum::zeros(&g);
        let n = norms(&z, &z, &z, &NormConfig::default());
        assert_eq!(n.sobolev, 0.0);
        assert_eq!(n.z, 0.0);
        assert_eq!(n.zprime, 0.0);
        assert_eq!(n.weighted, 0.0);
    }

    #[test]
    fn z_on_unit_mode() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        let mut f = Spectrum::zeros(&g);
        f.coeffs_mut()[g.index_of(1).unwrap()] = Complex64::new(0.0, 1.0);
        assert!((z_norm(&f, &NormConfig::default()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sobolev_cos2x() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        let f = Spectrum::from_real_fn(&g, |x| (2.0 * x).cos());
        let want = (5.0 * PI).sqrt();
        assert!((sobolev(&f, 1.0) - want).abs() < 1e-12);
        // direct quadrature of ∫ f² + f'²
        let quad: f64 = g
            .xs()
            .iter()
            .map(|&x| (2.0 * x).cos().powi(2) + 4.0 * (2.0 * x).sin().powi(2))
            .sum::<f64>()
            * g.dx();
        assert!((quad.sqrt() - want).abs() < 1e-12);
    }

    #[test]
    fn zprime_of_sine() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let h = Spectrum::from_real_fn(&g, |x| (2.0 * x).sin());
        let z = Spectrum::zeros(&g);
        assert!((zprime(&h, &z, 3) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn validate_rejects_bad_beta() {
        let c = NormConfig {
            z_beta: 1.5,
            ..NormConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
