//! Dirichlet–Neumann operator G(h) as a truncated multilinear series.
//!
//! The production path inverts the layer-potential density equation degree
//! by degree. The singular kernels
//!
//! ```text
//! T_m g(x) = (1/π) PV ∫ (h(x) − h(y))^m / (x − y)^{m+1} g(y) dy
//! ```
//!
//! expand binomially into `Σ_j C(m,j) (−1)^j h^{m−j} K_{m+1}(h^j g)`, where
//! `K_p` is the Fourier multiplier `(−iξ)^{p−1}(−i sgn ξ)/(p−1)!`. The
//! density is scaled so that its flat part is `|∂ₓ|f`. With `ℋ` the
//! Hilbert transform and `h'` the slope,
//!
//! ```text
//! ρ = |∂ₓ|f + Σ_{m≥1} (−1)^m ℋ[T_{2m} − h' T_{2m−1}] ρ
//! G(h)f = ρ + Σ_{n≥0} (−1)^n [h' T_{2n} − T_{2n+1}] ρ
//! ```
//!
//! "Order N" keeps the homogeneous pieces of degree 0..N−1 in h, i.e. the
//! terms M₁…M_N.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FourierGrid;
use crate::spectrum::Spectrum;

/// Applies the kernel operators T_m and the Hilbert transform.
pub trait KernelOps {
    fn grid(&self) -> &FourierGrid;
    /// The slope h'.
    fn slope(&self) -> &Spectrum;
    fn hilbert(&self, g: &Spectrum) -> Spectrum;
    fn t_op(&self, m: usize, g: &Spectrum) -> Spectrum;
    /// Pointwise product with h'.
    fn times_slope(&self, g: &Spectrum) -> Spectrum {
        self.slope().times(g)
    }
}

/// Kernel operators realized by multipliers and dealiased products.
pub struct SpectralKernels {
    grid: FourierGrid,
    hpow: Vec<Spectrum>,
    slope: Spectrum,
    k_tables: Vec<Vec<Complex64>>,
}

fn k_table(grid: &FourierGrid, p: usize) -> Vec<Complex64> {
    let s = grid.symbols();
    let fact: f64 = (1..p).map(|j| j as f64).product();
    let mut t: Vec<Complex64> = s
        .xi
        .iter()
        .zip(&s.sgn)
        .map(|(&x, &sg)| Complex64::new(0.0, -x).powu(p as u32 - 1) * Complex64::new(0.0, -sg) / fact)
        .collect();
    t[0] = Complex64::new(0.0, 0.0);
    t
}

impl SpectralKernels {
    /// Kernels for T_0..T_{max_m}.
    pub fn new(h: &Spectrum, max_m: usize) -> Self {
        let grid = h.grid().clone();
        let mut one = Spectrum::zeros(&grid);
        one.set_zero_mode(Complex64::new(grid.period(), 0.0));
        let mut hpow = vec![one, h.clone()];
        for j in 2..=max_m.max(1) {
            let next = hpow[j - 1].times(h);
            hpow.push(next);
        }
        let k_tables = (0..=max_m + 1)
            .map(|p| if p == 0 { Vec::new() } else { k_table(&grid, p) })
            .collect();
        SpectralKernels {
            slope: h.dx(),
            grid,
            hpow,
            k_tables,
        }
    }

    pub fn h_power(&self, j: usize) -> &Spectrum {
        &self.hpow[j]
    }
}

fn binom(m: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

impl KernelOps for SpectralKernels {
    fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    fn slope(&self) -> &Spectrum {
        &self.slope
    }

    fn hilbert(&self, g: &Spectrum) -> Spectrum {
        g.hilbert()
    }

    fn t_op(&self, m: usize, g: &Spectrum) -> Spectrum {
        if m == 0 {
            return g.hilbert();
        }
        let k = &self.k_tables[m + 1];
        let mut out = Spectrum::zeros(&self.grid);
        for j in 0..=m {
            let inner = if j == 0 { g.clone() } else { self.hpow[j].times(g) };
            let conv = inner.map_complex(k);
            let term = if j == m { conv } else { self.hpow[m - j].times(&conv) };
            let c = binom(m, j) * if j % 2 == 0 { 1.0 } else { -1.0 };
            out.axpy(c, &term);
        }
        out
    }
}

/// Kernel operators by direct O(n²) principal-value quadrature on the
/// grid: midpoint rule over points at odd offsets with weight 2Δx, using
/// the periodized kernels `Σ_n (s + nL)^{−p}`. Slow; for verification.
pub struct QuadratureKernels {
    grid: FourierGrid,
    h: Vec<f64>,
    slope: Spectrum,
    max_p: usize,
    /// kernel[p][offset] for p = 1..=max_p
    kernel: Vec<Vec<f64>>,
}

/// Coefficients of P_p(c) with Σ_n (s+nL)^{-p} = a^p P_p(cot(a s)), a = π/L.
fn cot_polys(max_p: usize) -> Vec<Vec<f64>> {
    let mut polys = vec![Vec::new(), vec![0.0, 1.0]];
    for p in 1..max_p {
        let prev = &polys[p];
        let deriv: Vec<f64> = (1..prev.len()).map(|i| prev[i] * i as f64).collect();
        // (1 + c²) P'
        let mut next = vec![0.0; deriv.len() + 2];
        for (i, d) in deriv.iter().enumerate() {
            next[i] += d / p as f64;
            next[i + 2] += d / p as f64;
        }
        polys.push(next);
    }
    polys
}

impl QuadratureKernels {
    pub fn new(h: &Spectrum, max_m: usize) -> Self {
        let grid = h.grid().clone();
        let n = grid.n();
        let a = std::f64::consts::PI / grid.period();
        let max_p = max_m + 1;
        let polys = cot_polys(max_p);
        let mut kernel = vec![Vec::new()];
        for poly in polys.iter().take(max_p + 1).skip(1) {
            let row = (0..n)
                .map(|off| {
                    if off % 2 == 0 {
                        return 0.0;
                    }
                    let s = off as f64 * grid.dx();
                    let c = 1.0 / (a * s).tan();
                    let val: f64 = poly.iter().rev().fold(0.0, |acc, &co| acc * c + co);
                    val
                })
                .collect::<Vec<f64>>();
            kernel.push(row);
        }
        // scale row p by a^p
        for (p, row) in kernel.iter_mut().enumerate().skip(1) {
            let ap = a.powi(p as i32);
            for v in row.iter_mut() {
                *v *= ap;
            }
        }
        QuadratureKernels {
            h: h.to_real_values(),
            slope: h.dx(),
            grid,
            max_p,
            kernel,
        }
    }

    fn raw(&self, m: usize, g: &[Complex64]) -> Vec<Complex64> {
        assert!(m < self.max_p, "kernel order not prepared");
        let n = self.grid.n();
        let w = 2.0 * self.grid.dx() / std::f64::consts::PI;
        let ker = &self.kernel[m + 1];
        (0..n)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let off = (i + n - j) % n;
                    if off.is_multiple_of(2) {
                        continue;
                    }
                    let dh = self.h[i] - self.h[j];
                    acc += g[j] * (dh.powi(m as i32) * ker[off]);
                }
                acc * w
            })
            .collect()
    }
}

impl KernelOps for QuadratureKernels {
    fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    fn slope(&self) -> &Spectrum {
        &self.slope
    }

    fn hilbert(&self, g: &Spectrum) -> Spectrum {
        self.t_op(0, g)
    }

    fn t_op(&self, m: usize, g: &Spectrum) -> Spectrum {
        let vals = self.raw(m, &g.to_values());
        let mut c = self.grid.forward(&vals);
        c[0] = Complex64::new(0.0, 0.0);
        Spectrum::from_coeffs(&self.grid, c).expect("grid length")
    }

    fn times_slope(&self, g: &Spectrum) -> Spectrum {
        let s = self.slope.to_values();
        let v: Vec<Complex64> = g.to_values().iter().zip(&s).map(|(a, b)| a * b).collect();
        let mut c = self.grid.forward(&v);
        c[0] = Complex64::new(0.0, 0.0);
        Spectrum::from_coeffs(&self.grid, c).expect("grid length")
    }
}

fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Degree-2m piece of the density recursion: (−1)^m ℋ[T_{2m} − h' T_{2m−1}].
fn p_op<K: KernelOps>(k: &K, two_m: usize, g: &Spectrum) -> Spectrum {
    let m = two_m / 2;
    let inner = k.t_op(two_m, g) - k.times_slope(&k.t_op(two_m - 1, g));
    k.hilbert(&inner) * sign(m)
}

/// Degree-(2n+1) piece of the assembly: (−1)^n [h' T_{2n} − T_{2n+1}].
fn q_op<K: KernelOps>(k: &K, two_n1: usize, g: &Spectrum) -> Spectrum {
    let nn = (two_n1 - 1) / 2;
    let a = k.times_slope(&k.t_op(2 * nn, g));
    (a - k.t_op(2 * nn + 1, g)) * sign(nn)
}

fn check_regime(h: &Spectrum) -> Result<()> {
    let slope = h.dx().linf();
    if !(slope < 1.0) {
        return Err(Error::SlopeTooLarge { slope });
    }
    Ok(())
}

/// Longest series the kernels are built for.
pub const MAX_ORDER: usize = 12;

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidInput(format!(
            "series order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }
    Ok(())
}

/// Graded density pieces ρ^{(d)}, d = 0..order−1 (odd degrees vanish).
pub fn density_terms<K: KernelOps>(k: &K, f: &Spectrum, order: usize) -> Result<Vec<Spectrum>> {
    let grid = k.grid().clone();
    let mut rho = vec![f.abs_d()];
    let base = rho[0].norm_l2();
    let mut last = base;
    for d in 1..order {
        if d % 2 == 1 {
            rho.push(Spectrum::zeros(&grid));
            continue;
        }
        let mut acc = Spectrum::zeros(&grid);
        for e in (2..=d).step_by(2) {
            acc += &p_op(k, e, &rho[d - e]);
        }
        let size = acc.norm_l2();
        if last > 1e-13 * base && size > 0.5 * last {
            return Err(Error::NonConvergent {
                degree: d,
                ratio: last / size,
            });
        }
        last = size;
        rho.push(acc);
    }
    Ok(rho)
}

/// Graded pieces G^{(d)}f, d = 0..order−1.
pub fn graded_terms<K: KernelOps>(k: &K, f: &Spectrum, order: usize) -> Result<Vec<Spectrum>> {
    let rho = density_terms(k, f, order)?;
    let grid = k.grid().clone();
    let mut out = Vec::with_capacity(order);
    for d in 0..order {
        if d % 2 == 0 {
            out.push(rho[d].clone());
        } else {
            let mut acc = Spectrum::zeros(&grid);
            for e in (1..=d).step_by(2) {
                acc += &q_op(k, e, &rho[d - e]);
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// Truncated density ρ = Σ_{d<order} ρ^{(d)}, normalized so ρ = |∂ₓ|f at h = 0.
pub fn density_solve(h: &Spectrum, f: &Spectrum, order: usize) -> Result<Spectrum> {
    check_order(order)?;
    check_regime(h)?;
    let k = SpectralKernels::new(h, order);
    let terms = density_terms(&k, f, order)?;
    Ok(sum(h.grid(), &terms))
}

/// Homogeneous pieces of G(h)f through degree order−1 in h.
pub fn dno_terms(h: &Spectrum, f: &Spectrum, order: usize) -> Result<Vec<Spectrum>> {
    check_order(order)?;
    check_regime(h)?;
    let k = SpectralKernels::new(h, order);
    graded_terms(&k, f, order)
}

/// G(h)f truncated at `order` multilinear terms.
pub fn dno_apply(h: &Spectrum, f: &Spectrum, order: usize) -> Result<Spectrum> {
    Ok(sum(h.grid(), &dno_terms(h, f, order)?))
}

fn sum(grid: &FourierGrid, terms: &[Spectrum]) -> Spectrum {
    let mut acc = Spectrum::zeros(grid);
    for t in terms {
        acc += t;
    }
    acc
}

/// Independent Taylor recursion for the pieces of G(h)f, with D = −i∂ₓ:
/// G_m f = (1/m!) D h^m D |D|^{m−1} f − Σ_{k=1}^{m} G_{m−k}[(h^k/k!) |D|^k f].
pub fn oracle_terms(h: &Spectrum, f: &Spectrum, order: usize) -> Result<Vec<Spectrum>> {
    check_order(order)?;
    check_regime(h)?;
    let k = SpectralKernels::new(h, order);
    Ok((0..order).map(|m| oracle_piece(&k, m, f)).collect())
}

fn abs_d_pow(f: &Spectrum, p: usize) -> Spectrum {
    let abs = &f.grid().symbols().abs;
    let table: Vec<f64> = abs.iter().map(|a| a.powi(p as i32)).collect();
    f.map_real(&table)
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|j| j as f64).product()
}

fn oracle_piece(k: &SpectralKernels, m: usize, f: &Spectrum) -> Spectrum {
    if m == 0 {
        return f.abs_d();
    }
    let psi = abs_d_pow(f, m - 1).dx();
    let mut out = -(k.h_power(m).times(&psi).dx()) * (1.0 / factorial(m));
    for j in 1..=m {
        let arg = k.h_power(j).times(&abs_d_pow(f, j)) * (1.0 / factorial(j));
        out -= &oracle_piece(k, m - j, &arg);
    }
    out
}

/// G(h)f from the Taylor recursion.
pub fn dno_oracle(h: &Spectrum, f: &Spectrum, order: usize) -> Result<Spectrum> {
    Ok(sum(h.grid(), &oracle_terms(h, f, order)?))
}

/// Quartic and higher part of G(h)φ: Σ_{d=3}^{order−1} G^{(d)}φ.
pub fn remainder_r1(h: &Spectrum, phi: &Spectrum, order: usize) -> Result<Spectrum> {
    if order < 4 {
        return Ok(Spectrum::zeros(h.grid()));
    }
    let terms = dno_terms(h, phi, order)?;
    Ok(sum(h.grid(), &terms[3..]))
}

/// Quartic and higher part, through total degree `order`, of
/// (G(h)φ + hₓφₓ)² / (2(1 + hₓ²)), given the graded pieces of G(h)φ.
pub fn remainder_r2_from_terms(h: &Spectrum, phi: &Spectrum, g_terms: &[Spectrum], order: usize) -> Spectrum {
    let grid = h.grid();
    let mut out = Spectrum::zeros(grid);
    if order < 4 {
        return out;
    }
    let hx = h.dx();
    // w[d] has total degree d
    let mut w: Vec<Spectrum> = vec![Spectrum::zeros(grid); order];
    w[1] = g_terms[0].clone();
    if order > 2 {
        w[2] = &g_terms[1] + &hx.times(&phi.dx());
    }
    for d in 3..order {
        w[d] = g_terms[d - 1].clone();
    }
    // s[e] = Σ_{a+b=e} w_a w_b
    let mut s: Vec<Spectrum> = vec![Spectrum::zeros(grid); order + 1];
    for e in 2..=order {
        for a in 1..e {
            let b = e - a;
            if a > b {
                break;
            }
            let prod = w[a].times(&w[b]);
            s[e].axpy(if a == b { 1.0 } else { 2.0 }, &prod);
        }
    }
    let hx2 = hx.times(&hx);
    let mut hx_pow = {
        let mut one = Spectrum::zeros(grid);
        one.set_zero_mode(Complex64::new(grid.period(), 0.0));
        one
    };
    let mut j = 0;
    while 2 * j + 2 <= order {
        for (e, se) in s.iter().enumerate().skip(2) {
            let deg = 2 * j + e;
            if (4..=order).contains(&deg) {
                let term = if j == 0 { se.clone() } else { hx_pow.times(se) };
                out.axpy(0.5 * sign(j), &term);
            }
        }
        hx_pow = hx_pow.times(&hx2);
        j += 1;
    }
    out
}

pub fn remainder_r2(h: &Spectrum, phi: &Spectrum, order: usize) -> Result<Spectrum> {
    if order < 4 {
        return Ok(Spectrum::zeros(h.grid()));
    }
    let terms = dno_terms(h, phi, order)?;
    Ok(remainder_r2_from_terms(h, phi, &terms, order))
}
