//! Spectra, sampled fields and Fourier multipliers.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FourierGrid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourier coefficients of one unknown on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: FourierGrid,
    coeffs: Vec<Complex64>,
}

/// Real-space samples, with a flag for fields known to be real.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: FourierGrid,
    values: Vec<Complex64>,
    real: bool,
}

/// Diagonal Fourier multipliers.
#[derive(Debug, Clone, PartialEq)]
pub enum Multiplier {
    /// |ξ|^{1/2}
    Lambda,
    /// |ξ|
    AbsD,
    /// iξ
    Dx,
    /// sgn ξ, sgn 0 = 0
    Sgn,
    /// |ξ|^{-1/2}, zero mode mapped to 0
    LambdaInv,
    /// e^{i·sign·t|ξ|^{1/2}}
    HalfWave { t: f64, sign: f64 },
    /// arbitrary table in ascending frequency order
    Tabulated(Vec<Complex64>),
}

impl Field {
    pub fn new(grid: &FourierGrid, values: Vec<Complex64>, real: bool) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidInput(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.n()
            )));
        }
        Ok(Field {
            grid: grid.clone(),
            values,
            real,
        })
    }

    pub fn from_real(grid: &FourierGrid, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            true,
        )
    }

    pub fn from_fn(grid: &FourierGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.xs().into_iter().map(|x| Complex64::new(f(x), 0.0)).collect();
        Field {
            grid: grid.clone(),
            values,
            real: true,
        }
    }

    pub fn from_complex_fn(grid: &FourierGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.xs().into_iter().map(f).collect();
        Field {
            grid: grid.clone(),
            values,
            real: false,
        }
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_spectrum(&self) -> Spectrum {
        let mut coeffs = self.grid.forward(&self.values);
        if self.real {
            // a real field carries no unpaired Nyquist content
            coeffs[0] = ZERO;
        }
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }
}

/// Apply a multiplier to a field; see [`Spectrum::apply`].
pub fn apply_multiplier(f: &Field, m: &Multiplier) -> Result<Field> {
    let out = f.to_spectrum().apply(m)?;
    let real = f.real && m.is_hermitian(&f.grid);
    Ok(out.to_field(real))
}

impl Multiplier {
    /// Symbol values in ascending frequency order.
    pub fn table(&self, grid: &FourierGrid) -> Vec<Complex64> {
        let s = grid.symbols();
        let re = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        match self {
            Multiplier::Lambda => re(&s.lambda),
            Multiplier::AbsD => re(&s.abs),
            Multiplier::LambdaInv => re(&s.lambda_inv),
            Multiplier::Sgn => re(&s.sgn),
            Multiplier::Dx => {
                let mut t: Vec<Complex64> = s.xi.iter().map(|&x| Complex64::new(0.0, x)).collect();
                t[0] = ZERO;
                t
            }
            Multiplier::HalfWave { t, sign } => s
                .lambda
                .iter()
                .map(|&l| Complex64::from_polar(1.0, sign * t * l))
                .collect(),
            Multiplier::Tabulated(v) => v.clone(),
        }
    }

    /// Whether the symbol satisfies m(-ξ) = conj m(ξ), so real input stays real.
    pub fn is_hermitian(&self, grid: &FourierGrid) -> bool {
        match self {
            Multiplier::Lambda | Multiplier::AbsD | Multiplier::LambdaInv | Multiplier::Dx => true,
            Multiplier::Sgn => false,
            Multiplier::HalfWave { t, .. } => *t == 0.0,
            Multiplier::Tabulated(v) => {
                let n = grid.n();
                let z = grid.zero_index();
                v.len() == n
                    && (1..n / 2).all(|k| (v[z + k] - v[z - k].conj()).norm() <= 1e-14 * v[z + k].norm().max(1.0))
                    && v[z].im.abs() <= 1e-14 * v[z].norm().max(1.0)
            }
        }
    }
}

impl Spectrum {
    pub fn zeros(grid: &FourierGrid) -> Self {
        Spectrum {
            grid: grid.clone(),
            coeffs: vec![ZERO; grid.n()],
        }
    }

    pub fn from_coeffs(grid: &FourierGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::InvalidInput(format!(
                "spectrum has {} coefficients, grid has {}",
                coeffs.len(),
                grid.n()
            )));
        }
        Ok(Spectrum {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Spectrum of real samples.
    pub fn from_real_fn(grid: &FourierGrid, f: impl Fn(f64) -> f64) -> Self {
        Field::from_fn(grid, f).to_spectrum()
    }

    /// Single exponential e^{ikx·2π/L} scaled by `amp`.
    pub fn mode(grid: &FourierGrid, k: i64, amp: Complex64) -> Option<Self> {
        let i = grid.index_of(k)?;
        let mut s = Spectrum::zeros(grid);
        s.coeffs[i] = amp * grid.period();
        Some(s)
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[self.grid.zero_index()]
    }

    pub fn set_zero_mode(&mut self, v: Complex64) {
        let z = self.grid.zero_index();
        self.coeffs[z] = v;
    }

    pub fn to_values(&self) -> Vec<Complex64> {
        self.grid.inverse(&self.coeffs)
    }

    pub fn to_real_values(&self) -> Vec<f64> {
        self.to_values().into_iter().map(|v| v.re).collect()
    }

    pub fn to_field(&self, real: bool) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.to_values(),
            real,
        }
    }

    /// Multiply coefficients by a real table.
    pub fn map_real(&self, table: &[f64]) -> Spectrum {
        let coeffs = self.coeffs.iter().zip(table).map(|(c, m)| c * m).collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    pub fn map_complex(&self, table: &[Complex64]) -> Spectrum {
        let coeffs = self.coeffs.iter().zip(table).map(|(c, m)| c * m).collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Apply a named or tabulated multiplier. `LambdaInv` refuses inputs
    /// whose zero mode carries more than 1e-8 of the L2 norm.
    pub fn apply(&self, m: &Multiplier) -> Result<Spectrum> {
        match m {
            Multiplier::Lambda => Ok(self.lambda()),
            Multiplier::AbsD => Ok(self.abs_d()),
            Multiplier::Dx => Ok(self.dx()),
            Multiplier::Sgn => Ok(self.sgn()),
            Multiplier::LambdaInv => {
                let zero = self.zero_mode().norm() / self.grid.period().sqrt();
                let norm = self.norm_l2();
                if zero > 1e-8 * norm {
                    return Err(Error::Gauge {
                        zero_mode: zero,
                        norm,
                    });
                }
                Ok(self.lambda_inv())
            }
            Multiplier::Tabulated(v) if v.len() != self.grid.n() => Err(Error::InvalidInput(
                format!("table has {} entries, grid has {}", v.len(), self.grid.n()),
            )),
            _ => Ok(self.map_complex(&m.table(&self.grid))),
        }
    }

    pub fn lambda(&self) -> Spectrum {
        self.map_real(&self.grid.symbols().lambda)
    }

    pub fn abs_d(&self) -> Spectrum {
        self.map_real(&self.grid.symbols().abs)
    }

    /// |ξ|^{-1/2} with the zero mode dropped, no gauge check.
    pub fn lambda_inv(&self) -> Spectrum {
        self.map_real(&self.grid.symbols().lambda_inv)
    }

    pub fn sgn(&self) -> Spectrum {
        self.map_real(&self.grid.symbols().sgn)
    }

    pub fn dx(&self) -> Spectrum {
        let xi = &self.grid.symbols().xi;
        let mut coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .zip(xi)
            .map(|(c, &x)| Complex64::new(-c.im * x, c.re * x))
            .collect();
        coeffs[0] = ZERO;
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Hilbert transform, symbol -i sgn ξ.
    pub fn hilbert(&self) -> Spectrum {
        let sg = &self.grid.symbols().sgn;
        let coeffs = self
            .coeffs
            .iter()
            .zip(sg)
            .map(|(c, &s)| Complex64::new(c.im * s, -c.re * s))
            .collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// e^{i·sign·t·Λ}
    pub fn half_wave(&self, t: f64, sign: f64) -> Spectrum {
        let lam = &self.grid.symbols().lambda;
        let coeffs = self
            .coeffs
            .iter()
            .zip(lam)
            .map(|(c, &l)| c * Complex64::from_polar(1.0, sign * t * l))
            .collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Spectrum of the complex conjugate field: conj f̂(-ξ).
    pub fn conj_field(&self) -> Spectrum {
        let n = self.grid.n();
        let mut coeffs = vec![ZERO; n];
        for (i, c) in coeffs.iter_mut().enumerate().skip(1) {
            *c = self.coeffs[n - i].conj();
        }
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Spectrum of Re f.
    pub fn real_part(&self) -> Spectrum {
        (self + &self.conj_field()) * 0.5
    }

    /// Spectrum of Im f.
    pub fn imag_part(&self) -> Spectrum {
        let d = self - &self.conj_field();
        d.scale_c(Complex64::new(0.0, -0.5))
    }

    pub fn scale_c(&self, a: Complex64) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// Multiply by i.
    pub fn times_i(&self) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| Complex64::new(-c.im, c.re)).collect(),
        }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Spectrum) {
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o * a;
        }
    }

    /// Dealiased pointwise product.
    pub fn times(&self, other: &Spectrum) -> Spectrum {
        debug_assert!(self.grid == other.grid);
        Spectrum {
            grid: self.grid.clone(),
            coeffs: self.grid.product(&[&self.coeffs, &other.coeffs]),
        }
    }

    /// Dealiased product of several factors in one padded transform.
    pub fn product(factors: &[&Spectrum]) -> Spectrum {
        let grid = factors[0].grid.clone();
        let raw: Vec<&[Complex64]> = factors.iter().map(|s| s.coeffs.as_slice()).collect();
        Spectrum {
            coeffs: grid.product(&raw),
            grid,
        }
    }

    /// L2 norm via Plancherel: sqrt((1/L) Σ |f̂|²).
    pub fn norm_l2(&self) -> f64 {
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.grid.period()).sqrt()
    }

    /// ∫ f conj(g) via Plancherel.
    pub fn inner(&self, other: &Spectrum) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            / self.grid.period()
    }

    /// Grid maximum of |f|.
    pub fn linf(&self) -> f64 {
        self.to_values().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Shift by `s` grid points: f(x - s·dx).
    pub fn shift_points(&self, s: i64) -> Spectrum {
        let n = self.grid.n() as f64;
        let half = (self.grid.n() / 2) as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = i as i64 - half;
                let ang = -2.0 * std::f64::consts::PI * (k * s) as f64 / n;
                c * Complex64::from_polar(1.0, ang)
            })
            .collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }
}

/// Direct evaluation of the bilinear operator with symbol `m`:
/// out(ξ) = (1/L) Σ_η m(ξ, η) f̂(ξ-η) ĝ(η), O(n²). Test path only.
pub fn bilinear_direct(f: &Spectrum, g: &Spectrum, m: impl Fn(f64, f64) -> f64) -> Spectrum {
    let grid = f.grid();
    let n = grid.n() as i64;
    let half = n / 2;
    let xi = grid.freqs();
    let mut out = Spectrum::zeros(grid);
    for k in 1..n {
        let mut acc = ZERO;
        for j in 1..n {
            let d = (k - half) - (j - half) + half;
            if d < 1 || d >= n {
                continue;
            }
            let w = m(xi[k as usize], xi[j as usize]);
            if w != 0.0 {
                acc += f.coeffs[d as usize] * g.coeffs[j as usize] * w;
            }
        }
        out.coeffs[k as usize] = acc / grid.period();
    }
    out
}

impl Add for &Spectrum {
    type Output = Spectrum;
    fn add(self, rhs: &Spectrum) -> Spectrum {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }
}

impl Sub for &Spectrum {
    type Output = Spectrum;
    fn sub(self, rhs: &Spectrum) -> Spectrum {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }
}

impl Add for Spectrum {
    type Output = Spectrum;
    fn add(mut self, rhs: Spectrum) -> Spectrum {
        self += &rhs;
        self
    }
}

impl Sub for Spectrum {
    type Output = Spectrum;
    fn sub(mut self, rhs: Spectrum) -> Spectrum {
        self -= &rhs;
        self
    }
}

impl AddAssign<&Spectrum> for Spectrum {
    fn add_assign(&mut self, rhs: &Spectrum) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&Spectrum> for Spectrum {
    fn sub_assign(&mut self, rhs: &Spectrum) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Mul<f64> for &Spectrum {
    type Output = Spectrum;
    fn mul(self, a: f64) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }
}

impl Mul<f64> for Spectrum {
    type Output = Spectrum;
    fn mul(mut self, a: f64) -> Spectrum {
        for c in &mut self.coeffs {
            *c *= a;
        }
        self
    }
}

impl Neg for Spectrum {
    type Output = Spectrum;
    fn neg(self) -> Spectrum {
        self * -1.0
    }
}
