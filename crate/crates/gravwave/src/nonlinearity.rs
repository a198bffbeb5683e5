//! Right-hand side of the expanded water-wave system
//!
//! ```text
//! ∂ₜh = |∂ₓ|φ + M₂ + M₃ + R₁
//! ∂ₜφ = −h + Q₂ + Q₃ + R₂
//! ```
//!
//! and the conserved energy.

use num_complex::Complex64;

use crate::dno;
use crate::error::{Error, Result};
use crate::grid::FourierGrid;
use crate::spectrum::Spectrum;

/// Surface elevation and velocity potential at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceState {
    pub t: f64,
    pub h: Spectrum,
    pub phi: Spectrum,
}

impl SurfaceState {
    /// Builds a state, pinning the zero mode of φ to 0.
    pub fn new(t: f64, h: Spectrum, mut phi: Spectrum) -> Result<Self> {
        if h.grid() != phi.grid() {
            return Err(Error::GridMismatch);
        }
        phi.set_zero_mode(Complex64::new(0.0, 0.0));
        Ok(SurfaceState { t, h, phi })
    }

    pub fn zero(grid: &FourierGrid) -> Self {
        SurfaceState {
            t: 0.0,
            h: Spectrum::zeros(grid),
            phi: Spectrum::zeros(grid),
        }
    }

    pub fn grid(&self) -> &FourierGrid {
        self.h.grid()
    }

    /// u = h + iΛφ
    pub fn to_u(&self) -> Spectrum {
        &self.h + &self.phi.lambda().times_i()
    }

    /// Inverse of [`SurfaceState::to_u`] for real h, φ.
    pub fn from_u(t: f64, u: &Spectrum) -> Self {
        let h = u.real_part();
        let mut phi = u.imag_part().lambda_inv();
        phi.set_zero_mode(Complex64::new(0.0, 0.0));
        SurfaceState { t, h, phi }
    }

    pub fn scaled(&self, eps: f64) -> Self {
        SurfaceState {
            t: self.t,
            h: &self.h * eps,
            phi: &self.phi * eps,
        }
    }
}

/// Which terms of the expansion are kept.
///
/// `order` 1 is the linear flow, 2 keeps M₂/Q₂, 3 adds M₃/Q₃ and 4 or more
/// adds R₁/R₂ with G(h) truncated after `dno_order` terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub order: usize,
    pub dno_order: usize,
}

impl Truncation {
    pub fn new(order: usize, dno_order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("order must be >= 1".into()));
        }
        if order >= 4 && dno_order < 4 {
            return Err(Error::InvalidInput(
                "order 4 and above needs dno_order >= 4".into(),
            ));
        }
        Ok(Truncation { order, dno_order })
    }

    /// Number of terms of G(h) consistent with this truncation.
    pub fn effective_dno_order(&self) -> usize {
        if self.order >= 4 {
            self.dno_order
        } else {
            self.order
        }
    }
}

/// M₂(h, φ) = −∂ₓ(h∂ₓφ) − |∂ₓ|(h|∂ₓ|φ)
pub fn m2(h: &Spectrum, phi: &Spectrum) -> Spectrum {
    -(h.times(&phi.dx()).dx()) - h.times(&phi.abs_d()).abs_d()
}

/// M₃(h, h, φ) = −½|∂ₓ|[h²|∂ₓ|²φ + |∂ₓ|(h²|∂ₓ|φ) − 2h|∂ₓ|(h|∂ₓ|φ)]
pub fn m3(h: &Spectrum, phi: &Spectrum) -> Spectrum {
    let h2 = h.times(h);
    let d1 = phi.abs_d();
    let d2 = d1.abs_d();
    let a = h2.times(&d2);
    let b = h2.times(&d1).abs_d();
    let c = h.times(&h.times(&d1).abs_d());
    let mut inner = a + b;
    inner.axpy(-2.0, &c);
    inner.abs_d() * -0.5
}

/// Q₂(φ, φ) = −½φₓ² + ½(|∂ₓ|φ)²
pub fn q2(phi: &Spectrum) -> Spectrum {
    let px = phi.dx();
    let pa = phi.abs_d();
    (pa.times(&pa) - px.times(&px)) * 0.5
}

/// Q₃(φ, h, φ) = |∂ₓ|φ [h|∂ₓ|²φ − |∂ₓ|(h|∂ₓ|φ)]
pub fn q3(h: &Spectrum, phi: &Spectrum) -> Spectrum {
    let d1 = phi.abs_d();
    let inner = h.times(&d1.abs_d()) - h.times(&d1).abs_d();
    d1.times(&inner)
}

/// The nonlinear terms of both equations, zero where not retained.
#[derive(Debug, Clone)]
pub struct Terms {
    pub m2: Spectrum,
    pub m3: Spectrum,
    pub r1: Spectrum,
    pub q2: Spectrum,
    pub q3: Spectrum,
    pub r2: Spectrum,
}

impl Terms {
    pub fn dh(&self) -> Spectrum {
        let mut s = &self.m2 + &self.m3;
        s += &self.r1;
        s
    }

    pub fn dphi(&self) -> Spectrum {
        let mut s = &self.q2 + &self.q3;
        s += &self.r2;
        s
    }
}

fn finite(s: Spectrum, what: &'static str, t: f64) -> Result<Spectrum> {
    if s.is_finite() {
        Ok(s)
    } else {
        Err(Error::NonFinite { what, t })
    }
}

pub fn terms(state: &SurfaceState, trunc: Truncation) -> Result<Terms> {
    let grid = state.grid();
    let (h, phi) = (&state.h, &state.phi);
    let z = || Spectrum::zeros(grid);
    let mut out = Terms {
        m2: z(),
        m3: z(),
        r1: z(),
        q2: z(),
        q3: z(),
        r2: z(),
    };
    if trunc.order >= 2 {
        out.m2 = m2(h, phi);
        out.q2 = q2(phi);
    }
    if trunc.order >= 3 {
        out.m3 = m3(h, phi);
        out.q3 = q3(h, phi);
    }
    if trunc.order >= 4 && trunc.dno_order >= 4 {
        let g = dno::dno_terms(h, phi, trunc.dno_order)?;
        let mut r1 = z();
        for piece in &g[3..] {
            r1 += piece;
        }
        out.r1 = r1;
        out.r2 = dno::remainder_r2_from_terms(h, phi, &g, trunc.dno_order);
    }
    Ok(out)
}

/// Nonlinear parts (N_h, N_φ) of the right-hand side.
pub fn nonlinear_rhs(state: &SurfaceState, trunc: Truncation) -> Result<(Spectrum, Spectrum)> {
    let t = terms(state, trunc)?;
    Ok((
        finite(t.dh(), "dh/dt", state.t)?,
        finite(t.dphi(), "dphi/dt", state.t)?,
    ))
}

/// (∂ₜh, ∂ₜφ) including the linear part.
pub fn rhs(state: &SurfaceState, trunc: Truncation) -> Result<(Spectrum, Spectrum)> {
    let (nh, np) = nonlinear_rhs(state, trunc)?;
    let mut dphi = -state.h.clone() + np;
    dphi.set_zero_mode(Complex64::new(0.0, 0.0));
    Ok((state.phi.abs_d() + nh, dphi))
}

/// E₀ = ½∫φ G(h)φ + ½∫h², with G truncated consistently with `trunc`.
pub fn energy_e0(state: &SurfaceState, trunc: Truncation) -> Result<f64> {
    // G(h)0 = 0 for any surface, including ones outside the series regime
    let kinetic = if state.phi.max_abs_coeff() == 0.0 {
        0.0
    } else {
        let g = dno::dno_apply(&state.h, &state.phi, trunc.effective_dno_order())?;
        state.phi.inner(&g).re
    };
    let potential = state.h.norm_l2().powi(2);
    Ok(0.5 * (kinetic + potential))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn flat_cosine_potential() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let st = SurfaceState::new(0.0, Spectrum::zeros(&g), Spectrum::from_real_fn(&g, f64::cos)).unwrap();
        let (dh, dp) = rhs(&st, Truncation::new(2, 4).unwrap()).unwrap();
        for ((a, b), x) in dh.to_real_values().iter().zip(dp.to_real_values()).zip(g.xs()) {
            assert!((a - x.cos()).abs() < 1e-13);
            let want = -0.5 * x.sin().powi(2) + 0.5 * x.cos().powi(2);
            assert!((b - want).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_state() {
        let g = make_grid(32, 10.0).unwrap();
        let st = SurfaceState::zero(&g);
        let (a, b) = rhs(&st, Truncation::new(4, 5).unwrap()).unwrap();
        assert_eq!(a.max_abs_coeff(), 0.0);
        assert_eq!(b.max_abs_coeff(), 0.0);
        assert_eq!(energy_e0(&st, Truncation::new(4, 4).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn energy_examples() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let tr = Truncation::new(3, 4).unwrap();
        let st = SurfaceState::new(0.0, Spectrum::zeros(&g), Spectrum::from_real_fn(&g, f64::cos)).unwrap();
        assert!((energy_e0(&st, tr).unwrap() - PI / 2.0).abs() < 1e-12);
        let st = SurfaceState::new(0.0, Spectrum::from_real_fn(&g, f64::cos), Spectrum::zeros(&g)).unwrap();
        assert!((energy_e0(&st, tr).unwrap() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn m3_matches_series() {
        let g = make_grid(128, 2.0 * PI).unwrap();
        let h = Spectrum::from_real_fn(&g, |x| 0.01 * x.cos() + 0.003 * (2.0 * x).sin());
        let f = Spectrum::from_real_fn(&g, |x| (2.0 * x).sin() + 0.4 * (x + 0.2).cos());
        let t = dno::dno_terms(&h, &f, 3).unwrap();
        let e = (&t[2] - &m3(&h, &f)).norm_l2() / m3(&h, &f).norm_l2();
        assert!(e < 1e-8, "{e:e}");
    }

    #[test]
    fn u_round_trip() {
        let g = make_grid(64, 30.0).unwrap();
        let h = Spectrum::from_real_fn(&g, |x| (-(x * x) / 4.0).exp());
        let mut phi = Spectrum::from_real_fn(&g, |x| x * (-(x * x) / 4.0).exp());
        phi.set_zero_mode(Complex64::new(0.0, 0.0));
        let st = SurfaceState::new(1.5, h, phi).unwrap();
        let back = SurfaceState::from_u(1.5, &st.to_u());
        assert!((&back.h - &st.h).norm_l2() < 1e-13);
        assert!((&back.phi - &st.phi).norm_l2() < 1e-13);
    }
}
