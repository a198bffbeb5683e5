//! Cubic interaction symbols of the normal-form equation.
//!
//! With V⁺ = V and V⁻ = V̄, the cubic part N₃ evaluated at (H, Ψ) is
//!
//! ```text
//! F[N₃](ξ) = (i/4π²) Σ_ι ∫∫ c^ι(ξ,η,σ) V̂^{ι₁}(ξ−η) V̂^{ι₂}(η−σ) V̂^{ι₃}(σ) dη dσ
//! ```
//!
//! over ι ∈ {++−, −−+, +++, −−−}, and c^ι = c₁ + … + c₅ collects the
//! contributions of M₃, iΛQ₃, 2A(M₂,H), iΛB(M₂,Ψ) and iΛB(H,Q₂).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::SurfaceState;
use crate::normal_form::{sym_a, sym_b, sym_m2, sym_q2};
use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Triple {
    PlusPlusMinus,
    MinusMinusPlus,
    PlusPlusPlus,
    MinusMinusMinus,
}

impl Triple {
    pub const ALL: [Triple; 4] = [
        Triple::PlusPlusMinus,
        Triple::MinusMinusPlus,
        Triple::PlusPlusPlus,
        Triple::MinusMinusMinus,
    ];

    /// Conjugation pattern (true = V̄) of the three inputs.
    pub fn conjugated(self) -> [bool; 3] {
        match self {
            Triple::PlusPlusMinus => [false, false, true],
            Triple::MinusMinusPlus => [true, true, false],
            Triple::PlusPlusPlus => [false, false, false],
            Triple::MinusMinusMinus => [true, true, true],
        }
    }
}

impl std::str::FromStr for Triple {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "++-" => Triple::PlusPlusMinus,
            "--+" => Triple::MinusMinusPlus,
            "+++" => Triple::PlusPlusPlus,
            "---" => Triple::MinusMinusMinus,
            other => return Err(format!("unknown sign triple {other}")),
        })
    }
}

fn ab(x: f64) -> f64 {
    x.abs()
}

fn sq(x: f64) -> f64 {
    x.abs().sqrt()
}

fn p32(x: f64) -> f64 {
    x.abs().powf(1.5)
}

/// Λ^{-1} with Λ^{-1}(0) = 0.
fn lam_inv(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        1.0 / sq(x)
    }
}

/// q̃₂(ξ,η) = Λ^{-1}(ξ−η) Λ^{-1}(η) q₂(ξ,η)
pub fn q2_tilde(xi: f64, eta: f64) -> f64 {
    lam_inv(xi - eta) * lam_inv(eta) * sym_q2(xi, eta)
}

/// m̃₂(ξ,η) = Λ^{-1}(η) m₂(ξ,η)
pub fn m2_tilde(xi: f64, eta: f64) -> f64 {
    lam_inv(eta) * sym_m2(xi, eta)
}

fn c1_ppm(x: f64, e: f64, s: f64) -> f64 {
    (2.0 * ab(x) * p32(e - s) - ab(x) * p32(s) + 2.0 * x * x * sq(e - s) - x * x * sq(s)) / 16.0
        + (-ab(x) * ab(x - s) * sq(e - s) - ab(x) * ab(e) * sq(e - s) + ab(x) * ab(e) * sq(s)) / 8.0
}

fn c1_ppp(x: f64, e: f64, s: f64) -> f64 {
    (ab(x) * p32(s) + x * x * sq(s) - 2.0 * ab(x) * ab(e) * sq(s)) / 16.0
}

fn c2_ppm(x: f64, e: f64, s: f64) -> f64 {
    let r = sq(x);
    (r * p32(x - e) * sq(s) + r * sq(x - e) * p32(s) - r * sq(x - e) * p32(e - s)) / 8.0
        + (-r * ab(x - s) * sq(e - s) * sq(s) - r * sq(x - e) * ab(e) * sq(s)
            + r * sq(x - e) * ab(e) * sq(e - s))
            / 8.0
}

fn c2_ppp(x: f64, e: f64, s: f64) -> f64 {
    let r = sq(x);
    (-r * sq(x - e) * p32(e - s) + r * sq(x - e) * ab(e) * sq(s)) / 8.0
}

fn c3_ppm(x: f64, e: f64, s: f64) -> f64 {
    (sym_a(x, e) * m2_tilde(e, s) - sym_a(x, e) * m2_tilde(e, e - s)
        - sym_a(x, x - s) * m2_tilde(x - s, x - e))
        / 4.0
}

fn c3_ppp(x: f64, e: f64, s: f64) -> f64 {
    -sym_a(x, e) * m2_tilde(e, s) / 4.0
}

fn c4_ppm(x: f64, e: f64, s: f64) -> f64 {
    let r = sq(x);
    (r * sym_b(x, x - e) * lam_inv(x - e) * m2_tilde(e, s)
        - r * sym_b(x, x - e) * lam_inv(x - e) * m2_tilde(e, e - s))
        / 8.0
        + r * sym_b(x, s) * lam_inv(s) * m2_tilde(x - s, x - e) / 8.0
}

fn c4_ppp(x: f64, e: f64, s: f64) -> f64 {
    -sq(x) * sym_b(x, x - e) * lam_inv(x - e) * m2_tilde(e, s) / 8.0
}

fn c5_ppm(x: f64, e: f64, s: f64) -> f64 {
    let r = sq(x);
    (2.0 * r * sym_b(x, e) * q2_tilde(e, s) - r * sym_b(x, x - s) * q2_tilde(x - s, x - e)) / 8.0
}

fn c5_ppp(x: f64, e: f64, s: f64) -> f64 {
    -sq(x) * sym_b(x, e) * q2_tilde(e, s) / 8.0
}

/// The l-th summand (l = 1..=5) of c^ι(ξ,η,σ).
pub fn cubic_part(triple: Triple, l: usize, xi: f64, eta: f64, sigma: f64) -> f64 {
    let plus_minus = matches!(triple, Triple::PlusPlusMinus | Triple::MinusMinusPlus);
    let base = match (l, plus_minus) {
        (1, true) => c1_ppm(xi, eta, sigma),
        (1, false) => c1_ppp(xi, eta, sigma),
        (2, true) => c2_ppm(xi, eta, sigma),
        (2, false) => c2_ppp(xi, eta, sigma),
        (3, true) => c3_ppm(xi, eta, sigma),
        (3, false) => c3_ppp(xi, eta, sigma),
        (4, true) => c4_ppm(xi, eta, sigma),
        (4, false) => c4_ppp(xi, eta, sigma),
        (5, true) => c5_ppm(xi, eta, sigma),
        (5, false) => c5_ppp(xi, eta, sigma),
        _ => panic!("cubic symbols are indexed 1..=5, got {l}"),
    };
    let flips = matches!(triple, Triple::MinusMinusPlus | Triple::MinusMinusMinus) && (l == 1 || l == 3);
    if flips {
        -base
    } else {
        base
    }
}

/// c^ι(ξ,η,σ) = Σ_{l=1}^{5} c_l^ι(ξ,η,σ)
pub fn eval_cubic_symbol(triple: Triple, xi: f64, eta: f64, sigma: f64) -> f64 {
    (1..=5).map(|l| cubic_part(triple, l, xi, eta, sigma)).sum()
}

/// c*_ξ(x,y) = c^{++−}(ξ, −x, −ξ−x−y)
pub fn c_star(xi: f64, x: f64, y: f64) -> f64 {
    eval_cubic_symbol(Triple::PlusPlusMinus, xi, -x, -xi - x - y)
}

/// c̃(ξ) = −8π|ξ|^{3/2} c*_ξ(0,0)
pub fn c_tilde(xi: f64) -> f64 {
    -8.0 * PI * p32(xi) * c_star(xi, 0.0, 0.0)
}

/// Phase of the trilinear oscillation, Λ(ξ) − Λ(ξ+η) − Λ(ξ+σ) + Λ(ξ+η+σ).
pub fn phase_phi(xi: f64, eta: f64, sigma: f64) -> f64 {
    sq(xi) - sq(xi + eta) - sq(xi + sigma) + sq(xi + eta + sigma)
}

/// Largest grid accepted by [`trilinear_n3`].
pub const TRILINEAR_MAX_N: usize = 64;

/// Discrete evaluation of the trilinear form above, O(n³). Reproduces N₃
/// exactly for V band-limited to |k| < n/6, where no product is truncated.
pub fn trilinear_n3(v: &Spectrum) -> Result<Spectrum> {
    let grid = v.grid();
    let n = grid.n();
    if n > TRILINEAR_MAX_N {
        return Err(Error::InvalidInput(format!(
            "trilinear diagnostic is limited to n <= {TRILINEAR_MAX_N}, got {n}"
        )));
    }
    let vp = v.coeffs();
    let vm_s = v.conj_field();
    let vm = vm_s.coeffs();
    let xi = grid.freqs();
    let len = n as i64;
    let inside = |i: i64| (1..len).contains(&i);
    let half = len / 2;
    let mut out = Spectrum::zeros(grid);
    for k in 1..len {
        let mut acc = Complex64::new(0.0, 0.0);
        for e in 1..len {
            let i1 = k - e + half;
            if !inside(i1) {
                continue;
            }
            for s in 1..len {
                let i2 = e - s + half;
                if !inside(i2) {
                    continue;
                }
                let (x, et, sg) = (xi[k as usize], xi[e as usize], xi[s as usize]);
                for triple in Triple::ALL {
                    let pick = |c: bool, i: i64| if c { vm[i as usize] } else { vp[i as usize] };
                    let [c1, c2, c3] = triple.conjugated();
                    let prod = pick(c1, i1) * pick(c2, i2) * pick(c3, s);
                    if prod == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    acc += prod * eval_cubic_symbol(triple, x, et, sg);
                }
            }
        }
        out.coeffs_mut()[k as usize] = acc * Complex64::new(0.0, 1.0 / (grid.period() * grid.period()));
    }
    Ok(out)
}

/// (H, Ψ) recovered from V, packaged as a state.
pub fn state_from_v(v: &Spectrum) -> SurfaceState {
    SurfaceState::from_u(0.0, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::normal_form::cubic_rhs_n3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stationary_value() {
        for xi in [0.5f64, 1.0, 2.0, 4.0] {
            let want = -xi.powf(2.5) / 2.0;
            assert!((c_star(xi, 0.0, 0.0) - want).abs() < 1e-10);
        }
        assert!((c_star(1.0, 0.0, 0.0) + 0.5).abs() < 1e-14);
        assert!((c_star(4.0, 0.0, 0.0) + 16.0).abs() < 1e-12);
        assert!((c_tilde(1.0) - 4.0 * PI).abs() < 1e-10);
        assert!((c_tilde(2.0) - 64.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn phase_vanishes_at_origin() {
        assert_eq!(phase_phi(1.3, 0.0, 0.0), 0.0);
    }

    #[test]
    fn trilinear_matches_physical_space() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut v = Spectrum::zeros(&g);
        for k in -4i64..=4 {
            if k != 0 {
                let i = g.index_of(k).unwrap();
                v.coeffs_mut()[i] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let st = state_from_v(&v);
        let direct = cubic_rhs_n3(&st);
        let tri = trilinear_n3(&v).unwrap();
        let err = (&direct - &tri).max_abs_coeff();
        assert!(err <= 1e-12 * direct.max_abs_coeff(), "{err:e}");
    }

    #[test]
    fn trilinear_gated() {
        let g = make_grid(128, 10.0).unwrap();
        assert!(trilinear_n3(&Spectrum::zeros(&g)).is_err());
    }
}
