//! Quadratic normal form: H = h + A(h,h), Ψ = φ + B(h,φ), V = H + iΛΨ.
//!
//! Bilinear operators follow the convention
//! F[M(f,g)](ξ) = (1/2π) ∫ m(ξ,η) f̂(ξ−η) ĝ(η) dη.

use serde::Serialize;

use crate::error::Result;
use crate::grid::sgn0;
use crate::nonlinearity::{self, SurfaceState, Truncation};
use crate::spectrum::Spectrum;

/// a(ξ,η) = −(|ξ|/2) sgn η sgn(ξ−η)
pub fn sym_a(xi: f64, eta: f64) -> f64 {
    -0.5 * xi.abs() * sgn0(eta) * sgn0(xi - eta)
}

/// b(ξ,η) = −|η| sgn(ξ−η) sgn ξ
pub fn sym_b(xi: f64, eta: f64) -> f64 {
    -eta.abs() * sgn0(xi - eta) * sgn0(xi)
}

/// m₂(ξ,η) = ξη − |ξ||η|
pub fn sym_m2(xi: f64, eta: f64) -> f64 {
    xi * eta - xi.abs() * eta.abs()
}

/// q₂(ξ,η) = ½(ξ−η)η + ½|ξ−η||η|
pub fn sym_q2(xi: f64, eta: f64) -> f64 {
    0.5 * (xi - eta) * eta + 0.5 * (xi - eta).abs() * eta.abs()
}

/// D = −x² − y² − z² + 2xy + 2xz + 2yz with x = |ξ|, y = |ξ−η|, z = |η|.
///
/// Evaluated as 4pq − (p+q−m)² with m the largest of the three: since one
/// of them is the sum of the other two, the square is a roundoff-sized
/// difference and no cancellation occurs.
pub fn sym_d(xi: f64, eta: f64) -> f64 {
    let mut v = [xi.abs(), (xi - eta).abs(), eta.abs()];
    v.sort_by(f64::total_cmp);
    let (p, q, m) = (v[0], v[1], v[2]);
    4.0 * p * q - (p + q - m).powi(2)
}

/// a₂ = (b(ξ,η) + b(ξ,ξ−η))/2 with the closed-form b.
pub fn sym_a2(xi: f64, eta: f64) -> f64 {
    0.5 * (sym_b(xi, eta) + sym_b(xi, xi - eta))
}

/// a₁ = −q₂ − (b(ξ,η)|ξ−η| + b(ξ,ξ−η)|η|)/2 for a given b.
pub fn sym_a1_with(b: impl Fn(f64, f64) -> f64, xi: f64, eta: f64) -> f64 {
    -sym_q2(xi, eta) - 0.5 * (b(xi, eta) * (xi - eta).abs() + b(xi, xi - eta) * eta.abs())
}

/// b from the general solution of the homological system; needs D ≠ 0.
pub fn sym_b_general(xi: f64, eta: f64) -> f64 {
    let (x, y, z) = (xi.abs(), (xi - eta).abs(), eta.abs());
    let num = -2.0 * (x + z - y) * sym_q2(xi, eta) + (z + y - x) * sym_m2(xi, eta)
        - 2.0 * z * sym_m2(xi, xi - eta);
    num / sym_d(xi, eta)
}

/// ξη|ξ−η| − |ξ|η(ξ−η); vanishes when ξ−η and ξ share sign.
pub fn sym_t0(xi: f64, eta: f64) -> f64 {
    xi * eta * (xi - eta).abs() - xi.abs() * eta * (xi - eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymbolName {
    A,
    B,
    M2,
    Q2,
    A2,
    D,
}

impl std::str::FromStr for SymbolName {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "a" => SymbolName::A,
            "b" => SymbolName::B,
            "m2" => SymbolName::M2,
            "q2" => SymbolName::Q2,
            "a2" => SymbolName::A2,
            "D" | "d" => SymbolName::D,
            other => return Err(format!("unknown symbol {other}")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    pub value: f64,
    /// set when ξ, η or ξ−η is zero and the sgn 0 = 0 convention applied
    pub degenerate: bool,
}

pub fn is_degenerate(xi: f64, eta: f64) -> bool {
    xi == 0.0 || eta == 0.0 || xi == eta
}

pub fn eval_symbol(name: SymbolName, xi: f64, eta: f64) -> SymbolValue {
    let value = match name {
        SymbolName::A => sym_a(xi, eta),
        SymbolName::B => sym_b(xi, eta),
        SymbolName::M2 => sym_m2(xi, eta),
        SymbolName::Q2 => sym_q2(xi, eta),
        SymbolName::A2 => sym_a2(xi, eta),
        SymbolName::D => sym_d(xi, eta),
    };
    SymbolValue {
        value,
        degenerate: is_degenerate(xi, eta),
    }
}

/// Residuals of the three homological identities for the normal form with
/// a₁ = 0, a₂ = a and the closed-form b:
///
/// ```text
/// r₁ = −|ξ| b(ξ,η) + m₂(ξ,η) − 2a₁(ξ,η) + 2|η| a₂(ξ,ξ−η)
/// r₂ = a₁(ξ,η) + q₂(ξ,η) + (b(ξ,η)|ξ−η| + b(ξ,ξ−η)|η|)/2
/// r₃ = a₂(ξ,η) − (b(ξ,η) + b(ξ,ξ−η))/2
/// ```
pub fn homological_residual(xi: f64, eta: f64) -> (f64, f64, f64) {
    let a1 = 0.0;
    let r1 = -xi.abs() * sym_b(xi, eta) + sym_m2(xi, eta) - 2.0 * a1
        + 2.0 * eta.abs() * sym_a(xi, xi - eta);
    let r2 = a1 + sym_q2(xi, eta)
        + 0.5 * (sym_b(xi, eta) * (xi - eta).abs() + sym_b(xi, xi - eta) * eta.abs());
    let r3 = sym_a(xi, eta) - 0.5 * (sym_b(xi, eta) + sym_b(xi, xi - eta));
    (r1, r2, r3)
}

/// Differences between the general solution (b from the D-formula, a₁ and
/// a₂ built from it) and the closed forms b, 0, a.
pub fn general_vs_closed(xi: f64, eta: f64) -> (f64, f64, f64) {
    let bg = sym_b_general(xi, eta);
    let a2g = 0.5 * (bg + sym_b_general(xi, xi - eta));
    let a1g = sym_a1_with(sym_b_general, xi, eta);
    (bg - sym_b(xi, eta), a1g, a2g - sym_a(xi, eta))
}

/// A(f,g) = −½|∂ₓ|[(sgn D f)(sgn D g)], symbol a.
pub fn apply_a(f: &Spectrum, g: &Spectrum) -> Spectrum {
    f.sgn().times(&g.sgn()).abs_d() * -0.5
}

/// B(f,g) = −sgn D[(sgn D f)(|∂ₓ| g)], symbol b.
pub fn apply_b(f: &Spectrum, g: &Spectrum) -> Spectrum {
    -f.sgn().times(&g.abs_d()).sgn()
}

#[derive(Debug, Clone)]
pub struct NormalForm {
    pub big_h: Spectrum,
    pub psi: Spectrum,
    pub v: Spectrum,
}

pub fn to_normal_form(state: &SurfaceState) -> NormalForm {
    let (h, phi) = (&state.h, &state.phi);
    let big_h = h + &apply_a(h, h);
    let psi = phi + &apply_b(h, phi);
    let v = &big_h + &psi.lambda().times_i();
    NormalForm { big_h, psi, v }
}

/// N₃ = M₃ + 2A(M₂,h) + iΛ[Q₃ + B(M₂,φ) + B(h,Q₂)]
pub fn cubic_rhs_n3(state: &SurfaceState) -> Spectrum {
    let (h, phi) = (&state.h, &state.phi);
    let m2 = nonlinearity::m2(h, phi);
    let q2 = nonlinearity::q2(phi);
    let m3 = nonlinearity::m3(h, phi);
    let q3 = nonlinearity::q3(h, phi);
    let mut inner = q3 + apply_b(&m2, phi);
    inner += &apply_b(h, &q2);
    let mut out = m3 + apply_a(&m2, h) * 2.0;
    out += &inner.lambda().times_i();
    out
}

/// N₄ = R₁ + 2A(M₃+R₁, h) + iΛ[R₂ + B(h, Q₃+R₂) + B(M₃+R₁, φ)], with the
/// remainders taken from G(h) truncated after `dno_order` terms.
pub fn quartic_rhs_n4(state: &SurfaceState, dno_order: usize) -> Result<Spectrum> {
    let (h, phi) = (&state.h, &state.phi);
    let trunc = if dno_order >= 4 {
        Truncation::new(4, dno_order)?
    } else {
        Truncation::new(3, 3)?
    };
    let t = nonlinearity::terms(state, trunc)?;
    let (r1, r2) = (t.r1, t.r2);
    let m3r1 = &t.m3 + &r1;
    let q3r2 = &t.q3 + &r2;
    let mut inner = &r2 + &apply_b(h, &q3r2);
    inner += &apply_b(&m3r1, phi);
    let mut out = &r1 + &(apply_a(&m3r1, h) * 2.0);
    out += &inner.lambda().times_i();
    Ok(out)
}

/// ∂ₜV by the chain rule through the truncated equations.
pub fn dt_v(state: &SurfaceState, trunc: Truncation) -> Result<Spectrum> {
    let (h, phi) = (&state.h, &state.phi);
    let (dh, dphi) = nonlinearity::rhs(state, trunc)?;
    let dbig_h = &dh + &(apply_a(&dh, h) * 2.0);
    let mut dpsi = &dphi + &apply_b(&dh, phi);
    dpsi += &apply_b(h, &dphi);
    Ok(&dbig_h + &dpsi.lambda().times_i())
}

/// ∂ₜV + iΛV under the dynamics `trunc`, minus N₃ (if `subtract_n3`) and
/// N₄ at `subtract_n4` terms of G(h) (if given).
pub fn normal_form_residual(
    state: &SurfaceState,
    trunc: Truncation,
    subtract_n3: bool,
    subtract_n4: Option<usize>,
) -> Result<Spectrum> {
    let v = to_normal_form(state).v;
    let mut r = dt_v(state, trunc)? + v.lambda().times_i();
    if subtract_n3 {
        r -= &cubic_rhs_n3(state);
    }
    if let Some(order) = subtract_n4 {
        r -= &quartic_rhs_n4(state, order)?;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::spectrum::bilinear_direct;
    use crate::Field;

    #[test]
    fn anchor_values() {
        assert_eq!(sym_a(1.0, -1.0), 0.5);
        assert_eq!(sym_b(1.0, 2.0), 2.0);
        assert_eq!(sym_q2(2.0, 1.0), 1.0);
        assert_eq!(sym_m2(1.0, -1.0), -2.0);
        assert!(eval_symbol(SymbolName::A, 1.0, 0.0).degenerate);
        assert!(!eval_symbol(SymbolName::A, 1.0, -1.0).degenerate);
    }

    #[test]
    fn residual_examples() {
        for (x, y) in [(1.0, -1.0), (3.0, 1.0)] {
            let (a, b, c) = homological_residual(x, y);
            assert_eq!((a, b, c), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn piecewise_cases() {
        let xi = 2.0;
        // η <= 0
        assert_eq!(sym_b(xi, -1.0), -1.0);
        assert_eq!(sym_a2(xi, -1.0), 1.0);
        assert_eq!(sym_d(xi, -1.0), 8.0);
        // 0 <= η <= ξ
        assert_eq!(sym_b(xi, 0.5), -0.5);
        assert_eq!(sym_a2(xi, 0.5), -1.0);
        assert_eq!(sym_d(xi, 0.5), 4.0 * 1.5 * 0.5);
        // η >= ξ
        assert_eq!(sym_b(xi, 3.0), 3.0);
        assert_eq!(sym_a2(xi, 3.0), 1.0);
    }

    #[test]
    fn t0_sign_region() {
        for (x, y) in [(2.0, 1.0), (2.0, -3.0), (-1.0, 2.0), (-1.0, -0.4)] {
            if sgn0(x - y) == sgn0(x) {
                assert_eq!(sym_t0(x, y), 0.0);
            }
        }
        assert!(sym_t0(1.0, 2.0) != 0.0);
    }

    fn data(n: usize) -> (Spectrum, Spectrum) {
        let g = make_grid(n, 12.0).unwrap();
        let f = Field::from_fn(&g, |x| (-(x * x)).exp() * (1.0 + 0.5 * x)).to_spectrum();
        let h = Field::from_fn(&g, |x| (-(x - 0.7).powi(2) * 2.0).exp()).to_spectrum();
        (f, h)
    }

    #[test]
    fn operators_match_quadrature() {
        let (f, g) = data(32);
        let a = apply_a(&f, &g);
        let a_direct = bilinear_direct(&f, &g, sym_a);
        assert!((&a - &a_direct).norm_l2() <= 1e-10 * a_direct.norm_l2());
        let b = apply_b(&f, &g);
        let b_direct = bilinear_direct(&f, &g, sym_b);
        assert!((&b - &b_direct).norm_l2() <= 1e-10 * b_direct.norm_l2());
    }

    #[test]
    fn operators_preserve_reality() {
        let (f, g) = data(64);
        for out in [apply_a(&f, &g), apply_b(&f, &g)] {
            let v = out.to_values();
            let m = v.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
            assert!(m > 0.0);
            assert!(v.iter().all(|z| z.im.abs() <= 1e-12 * m));
        }
    }

    #[test]
    fn zero_state_normal_form() {
        let g = make_grid(32, 10.0).unwrap();
        let st = SurfaceState::zero(&g);
        assert_eq!(to_normal_form(&st).v.max_abs_coeff(), 0.0);
        assert_eq!(cubic_rhs_n3(&st).max_abs_coeff(), 0.0);
        assert_eq!(quartic_rhs_n4(&st, 4).unwrap().max_abs_coeff(), 0.0);
    }
}
