//! Smooth Littlewood–Paley decomposition.

use crate::grid::FourierGrid;
use crate::spectrum::Spectrum;

const INNER: f64 = 5.0 / 4.0;
const OUTER: f64 = 8.0 / 5.0;

fn psi(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Even bump: 1 on [-5/4, 5/4], 0 outside (-8/5, 8/5), C^∞ in between.
pub fn bump(r: f64) -> f64 {
    let a = r.abs();
    if a <= INNER {
        1.0
    } else if a >= OUTER {
        0.0
    } else {
        let s = (a - INNER) / (OUTER - INNER);
        let up = psi(s);
        1.0 - up / (up + psi(1.0 - s))
    }
}

/// φ_k(ξ) = φ(ξ/2^k) − φ(ξ/2^{k−1}).
pub fn phi_k(xi: f64, k: i32) -> f64 {
    bump(xi / 2f64.powi(k)) - bump(xi / 2f64.powi(k - 1))
}

/// Dyadic indices whose pieces tile every nonzero mode of the grid.
pub fn resolved_range(grid: &FourierGrid) -> (i32, i32) {
    let abs = &grid.symbols().abs;
    let min = grid.dxi();
    let max = abs.iter().cloned().fold(0.0, f64::max);
    let kmin = (min / OUTER).log2().floor() as i32 + 1;
    let kmax = (max / INNER).log2().ceil() as i32;
    (kmin, kmax)
}

/// P_k f. Indices outside the grid's range give the zero spectrum.
pub fn lp_project(f: &Spectrum, k: i32) -> Spectrum {
    let xi = f.grid().freqs();
    let table: Vec<f64> = xi.iter().map(|&x| phi_k(x, k)).collect();
    f.map_real(&table)
}
