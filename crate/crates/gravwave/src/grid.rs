//! Periodic collocation grid standing in for the real line.
//!
//! Spectra are stored in ascending frequency order, index `i` holding the
//! wavenumber `k = i - n/2`, and are scaled so that a coefficient
//! approximates `∫ e^{-ixξ} f(x) dx` over one period.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Largest number of factors a single padded product may take.
pub const MAX_PRODUCT_FACTORS: usize = 8;

#[derive(Clone)]
struct Plan {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plan {
    fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Plan {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }
}

/// Multiplier tables evaluated once per grid.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    /// ξ
    pub xi: Vec<f64>,
    /// |ξ|
    pub abs: Vec<f64>,
    /// |ξ|^{1/2}
    pub lambda: Vec<f64>,
    /// |ξ|^{-1/2}, zero at ξ = 0
    pub lambda_inv: Vec<f64>,
    /// sgn ξ with sgn 0 = 0 and the unpaired Nyquist mode zeroed
    pub sgn: Vec<f64>,
}

struct Inner {
    n: usize,
    period: f64,
    base: Plan,
    padded: Vec<OnceLock<Plan>>,
    symbols: SymbolTable,
    dealias: bool,
}

/// Uniform periodic grid with `n` points on `[-L/2, L/2)`.
///
/// Cloning is cheap; FFT plans and symbol tables are shared and immutable.
#[derive(Clone)]
pub struct FourierGrid {
    inner: Arc<Inner>,
}

impl fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGrid")
            .field("n", &self.inner.n)
            .field("period", &self.inner.period)
            .finish()
    }
}

impl PartialEq for FourierGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.period == other.inner.period)
    }
}

/// Build a grid, rejecting point counts that are not powers of two (or are
/// below 8) and non-positive periods.
pub fn make_grid(n: usize, period: f64) -> Result<FourierGrid> {
    FourierGrid::new(n, period)
}

impl FourierGrid {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        Self::with_dealias(n, period, true)
    }

    /// With `dealias = false` every [`FourierGrid::product`] is evaluated on
    /// the native grid, for comparison runs.
    pub fn with_dealias(n: usize, period: f64, dealias: bool) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two >= 8, got {n}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        let xi: Vec<f64> = (0..n)
            .map(|i| 2.0 * PI * (i as f64 - (n / 2) as f64) / period)
            .collect();
        let abs: Vec<f64> = xi.iter().map(|x| x.abs()).collect();
        let lambda: Vec<f64> = abs.iter().map(|a| a.sqrt()).collect();
        let lambda_inv = lambda
            .iter()
            .map(|&l| if l > 0.0 { 1.0 / l } else { 0.0 })
            .collect();
        let mut sgn: Vec<f64> = xi.iter().map(|&x| sgn0(x)).collect();
        sgn[0] = 0.0;
        let padded = (0..=MAX_PRODUCT_FACTORS).map(|_| OnceLock::new()).collect();
        Ok(FourierGrid {
            inner: Arc::new(Inner {
                n,
                period,
                base: Plan::new(n),
                padded,
                symbols: SymbolTable {
                    xi,
                    abs,
                    lambda,
                    lambda_inv,
                    sgn,
                },
                dealias,
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn dealias(&self) -> bool {
        self.inner.dealias
    }

    pub fn period(&self) -> f64 {
        self.inner.period
    }

    pub fn dx(&self) -> f64 {
        self.inner.period / self.inner.n as f64
    }

    /// Frequency spacing 2π/L.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.inner.period
    }

    /// Collocation points `x_j = -L/2 + j L/n`.
    pub fn xs(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n())
            .map(|j| -0.5 * self.period() + j as f64 * dx)
            .collect()
    }

    /// Frequencies `2πk/L` for `k` in `[-n/2, n/2)`, ascending.
    pub fn freqs(&self) -> &[f64] {
        &self.inner.symbols.xi
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.inner.symbols
    }

    /// Index of the zero mode in ascending order.
    pub fn zero_index(&self) -> usize {
        self.n() / 2
    }

    /// Index of wavenumber `k` (must satisfy `-n/2 <= k < n/2`).
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.n() / 2) as i64;
        if (-half..half).contains(&k) {
            Some((k + half) as usize)
        } else {
            None
        }
    }

    /// Snap a frequency to the nearest lattice point; returns (index, ξ).
    pub fn snap_frequency(&self, xi: f64) -> Option<(usize, f64)> {
        if !xi.is_finite() {
            return None;
        }
        let k = (xi / self.dxi()).round() as i64;
        self.index_of(k).map(|i| (i, self.freqs()[i]))
    }

    /// Real-space samples to normalized spectrum.
    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.n(), "sample count does not match grid");
        let plan = &self.inner.base;
        let mut buf = values.to_vec();
        plan.forward.process(&mut buf);
        let n = self.n();
        let half = n / 2;
        let dx = self.dx();
        (0..n)
            .map(|i| {
                // k = i - n/2 sits at FFT bin (i + n/2) mod n; (-1)^k from x_0 = -L/2
                let bin = (i + half) % n;
                let sign = if (i + half).is_multiple_of(2) { 1.0 } else { -1.0 };
                buf[bin] * (dx * sign)
            })
            .collect()
    }

    /// Normalized spectrum to real-space samples.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.inverse_on(coeffs, &self.inner.base)
    }

    fn inverse_on(&self, coeffs: &[Complex64], plan: &Plan) -> Vec<Complex64> {
        let n = self.n();
        assert_eq!(coeffs.len(), n, "coefficient count does not match grid");
        let m = plan.size;
        let half = n / 2;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let scale = 1.0 / self.period();
        for (i, c) in coeffs.iter().enumerate() {
            let k = i as i64 - half as i64;
            let bin = k.rem_euclid(m as i64) as usize;
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            buf[bin] = c * (scale * sign);
        }
        plan.inverse.process(&mut buf);
        buf
    }

    /// Samples on a padded grid of `plan.size` points back to the `n`
    /// resolved modes; the unpaired Nyquist mode is dropped.
    fn forward_from(&self, values: &mut [Complex64], plan: &Plan) -> Vec<Complex64> {
        let n = self.n();
        let m = plan.size;
        plan.forward.process(values);
        let half = n / 2;
        let scale = self.period() / m as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate().skip(1) {
            let k = i as i64 - half as i64;
            let bin = k.rem_euclid(m as i64) as usize;
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            *o = values[bin] * (scale * sign);
        }
        out
    }

    fn padded_plan(&self, factors: usize) -> &Plan {
        assert!(
            (2..=MAX_PRODUCT_FACTORS).contains(&factors),
            "padded products take 2..={MAX_PRODUCT_FACTORS} factors"
        );
        let m = (factors + 1) * self.n() / 2;
        self.inner.padded[factors].get_or_init(|| Plan::new(m))
    }

    /// Alias-free product of band-limited spectra. The padding size
    /// `(k+1)n/2` for `k` factors reproduces the exact product projected
    /// onto the resolved modes.
    pub fn product(&self, factors: &[&[Complex64]]) -> Vec<Complex64> {
        if !self.inner.dealias && factors.len() > 1 {
            return self.product_aliased(factors);
        }
        match factors.len() {
            0 => panic!("product of zero factors"),
            1 => factors[0].to_vec(),
            k => {
                let plan = self.padded_plan(k);
                let mut acc = self.inverse_on(factors[0], plan);
                for f in &factors[1..] {
                    let v = self.inverse_on(f, plan);
                    for (a, b) in acc.iter_mut().zip(v) {
                        *a *= b;
                    }
                }
                self.forward_from(&mut acc, plan)
            }
        }
    }

    /// Product computed on the native grid (aliasing left in place).
    pub fn product_aliased(&self, factors: &[&[Complex64]]) -> Vec<Complex64> {
        let mut acc = self.inverse(factors[0]);
        for f in &factors[1..] {
            let v = self.inverse(f);
            for (a, b) in acc.iter_mut().zip(v) {
                *a *= b;
            }
        }
        let mut out = self.forward(&acc);
        out[0] = Complex64::new(0.0, 0.0);
        out
    }
}

/// Sign with the convention sgn(0) = 0.
pub fn sgn0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_period_freqs_are_integers() {
        let g = make_grid(8, 2.0 * PI).unwrap();
        let want = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        for (a, b) in g.freqs().iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn spacing_matches_period() {
        let g = make_grid(256, 400.0).unwrap();
        assert!((g.dxi() - 0.015_707_963_267_948_967).abs() < 1e-15);
        assert!((g.freqs()[129] - g.freqs()[128] - g.dxi()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(make_grid(7, 10.0).is_err());
        assert!(make_grid(4, 10.0).is_err());
        assert!(make_grid(96, 10.0).is_err());
        assert!(make_grid(16, 0.0).is_err());
        assert!(make_grid(16, -1.0).is_err());
        assert!(make_grid(16, f64::NAN).is_err());
    }

    #[test]
    fn symmetric_except_nyquist() {
        let g = make_grid(16, 3.0).unwrap();
        let f = g.freqs();
        let z = g.zero_index();
        for k in 1..8 {
            assert!((f[z + k] + f[z - k]).abs() < 1e-13);
        }
        assert!(f[0] < 0.0 && g.index_of(8).is_none());
    }

    #[test]
    fn round_trip() {
        let g = make_grid(64, 7.0).unwrap();
        let vals: Vec<Complex64> = g
            .xs()
            .iter()
            .map(|&x| Complex64::new((-(x * x)).exp(), (0.3 * x).sin()))
            .collect();
        let back = g.inverse(&g.forward(&vals));
        let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn cosine_spectrum_normalization() {
        // cos x over [-π, π): transform at ξ = ±1 equals π
        let g = make_grid(32, 2.0 * PI).unwrap();
        let vals: Vec<Complex64> = g.xs().iter().map(|&x| Complex64::new(x.cos(), 0.0)).collect();
        let s = g.forward(&vals);
        let i1 = g.index_of(1).unwrap();
        let im1 = g.index_of(-1).unwrap();
        assert!((s[i1] - Complex64::new(PI, 0.0)).norm() < 1e-12);
        assert!((s[im1] - Complex64::new(PI, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn padded_product_is_alias_free() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let mut a = vec![Complex64::new(0.0, 0.0); 16];
        let mut b = a.clone();
        // modes 5 and 6: product lands on 11 which the native grid would alias
        a[g.index_of(5).unwrap()] = Complex64::new(1.0, 0.0);
        b[g.index_of(6).unwrap()] = Complex64::new(1.0, 0.0);
        let p = g.product(&[&a, &b]);
        assert!(p.iter().all(|c| c.norm() < 1e-13));
        let mut c = vec![Complex64::new(0.0, 0.0); 16];
        c[g.index_of(-2).unwrap()] = Complex64::new(2.0, 0.0);
        let q = g.product(&[&a, &c]);
        // (1/L) * 1 * 2 at k = 3
        let want = 2.0 / (2.0 * PI);
        assert!((q[g.index_of(3).unwrap()].re - want).abs() < 1e-14);
    }
}
