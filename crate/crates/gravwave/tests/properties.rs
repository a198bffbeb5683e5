use std::f64::consts::PI;

use gravwave::config::parse_config_str;
use gravwave::diagnostics::read_diagnostics;
use gravwave::dno::dno_apply;
use gravwave::normal_form::{apply_a, apply_b, homological_residual, is_degenerate, sym_a, sym_b};
use gravwave::scattering::{corrected_profile, PhaseAccumulator};
use gravwave::snapshot::Snapshot;
use gravwave::{FourierGrid, Spectrum};
use proptest::prelude::*;

const N: usize = 64;

fn grid() -> FourierGrid {
    FourierGrid::new(N, 2.0 * PI).unwrap()
}

/// Real trigonometric polynomial of degree 6 with the given coefficients.
fn trig(g: &FourierGrid, c: &[(f64, f64)]) -> Spectrum {
    let c = c.to_vec();
    Spectrum::from_real_fn(g, move |x| {
        c.iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let k = (k + 1) as f64;
                a * (k * x).cos() + b * (k * x).sin()
            })
            .sum()
    })
}

fn coeffs(scale: f64) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-scale..scale, -scale..scale), 6)
}

fn freq() -> impl Strategy<Value = f64> {
    prop_oneof![-8.0..-1e-3f64, 1e-3..8.0f64]
}

proptest! {
    #[test]
    fn homological_identities_hold(xi in freq(), eta in freq()) {
        prop_assume!(!is_degenerate(xi, eta) && (xi - eta).abs() > 1e-3);
        let (r1, r2, r3) = homological_residual(xi, eta);
        prop_assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12 && r3.abs() < 1e-12, "{r1} {r2} {r3}");
    }

    #[test]
    fn symbols_are_one_homogeneous(xi in freq(), eta in freq(), lam in 0.05..20.0f64) {
        let scale = lam * (1.0 + xi.abs() + eta.abs());
        for f in [sym_a, sym_b] {
            prop_assert!((f(lam * xi, lam * eta) - lam * f(xi, eta)).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn plancherel(c in coeffs(1.0)) {
        let g = grid();
        let f = trig(&g, &c);
        let direct: f64 = f.to_values().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dx();
        let spectral = f.norm_l2().powi(2);
        prop_assert!((direct - spectral).abs() <= 1e-12 * (1.0 + direct));
    }

    #[test]
    fn normal_form_operators_commute_with_translation(a in coeffs(1.0), b in coeffs(1.0), s in -40i64..40) {
        let g = grid();
        let (f, h) = (trig(&g, &a), trig(&g, &b));
        for op in [apply_a, apply_b] {
            let lhs = op(&f.shift_points(s), &h.shift_points(s));
            let rhs = op(&f, &h).shift_points(s);
            prop_assert!((&lhs - &rhs).norm_l2() <= 1e-12 * (1.0 + rhs.norm_l2()));
        }
    }

    #[test]
    fn dno_commutes_with_translation(a in coeffs(0.02), b in coeffs(1.0), s in -40i64..40, order in 1usize..=5) {
        let g = grid();
        let (h, f) = (trig(&g, &a), trig(&g, &b));
        let lhs = dno_apply(&h.shift_points(s), &f.shift_points(s), order).unwrap();
        let rhs = dno_apply(&h, &f, order).unwrap().shift_points(s);
        prop_assert!((&lhs - &rhs).norm_l2() <= 1e-11 * (1.0 + rhs.norm_l2()));
    }

    #[test]
    fn dno_is_self_adjoint(a in coeffs(0.02), b in coeffs(1.0), c in coeffs(1.0), order in 1usize..=5) {
        let g = grid();
        let (h, f, k) = (trig(&g, &a), trig(&g, &b), trig(&g, &c));
        let gf = dno_apply(&h, &f, order).unwrap();
        let gk = dno_apply(&h, &k, order).unwrap();
        let defect = (gf.inner(&k) - f.inner(&gk)).norm();
        prop_assert!(defect <= 1e-10 * (1.0 + f.norm_l2() * k.norm_l2()), "{defect:e}");
    }

    #[test]
    fn correction_preserves_modulus(c in coeffs(1.0), times in prop::collection::vec(0.01..5.0f64, 1..8)) {
        let g = grid();
        let f = trig(&g, &c);
        let mut acc = PhaseAccumulator::new(&g);
        let mut t = 0.0;
        acc.accumulate(&f, t).unwrap();
        for dt in times {
            t += dt;
            acc.accumulate(&f, t).unwrap();
        }
        let gc = corrected_profile(&f, &acc);
        for (x, y) in f.coeffs().iter().zip(gc.coeffs()) {
            prop_assert!((x.norm() - y.norm()).abs() <= 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn phase_is_additive_over_intervals(c in coeffs(1.0), steps in prop::collection::vec(0.01..3.0f64, 2..10), split in 1usize..9) {
        let g = grid();
        let f = trig(&g, &c);
        let mut ts = vec![0.0];
        for dt in &steps {
            ts.push(ts.last().unwrap() + dt);
        }
        let split = split.min(ts.len() - 1);
        // profile varying in time so each panel differs
        let at = |t: f64| &f * (1.0 + 0.3 * t.sin());
        let run = |range: &[f64]| {
            let mut acc = PhaseAccumulator::new(&g);
            for &t in range {
                acc.accumulate(&at(t), t).unwrap();
            }
            acc.phase().to_vec()
        };
        let whole = run(&ts);
        let first = run(&ts[..=split]);
        let second = run(&ts[split..]);
        for i in 0..N {
            let sum = first[i] + second[i];
            prop_assert!((whole[i] - sum).abs() <= 1e-12 * (1.0 + whole[i].abs()));
        }
    }

    #[test]
    fn config_parser_never_panics(text in "\\PC{0,400}") {
        let _ = parse_config_str(&text);
    }

    #[test]
    fn config_parser_never_panics_on_keyed_lines(
        lines in prop::collection::vec(
            (prop::sample::select(vec!["grid.n", "grid.period", "init.amplitude", "evolution.dt", "evolution.order", "output.probe_frequencies", "bogus"]),
             "[-0-9.e,a-z ]{0,12}"),
            0..8)
    ) {
        let text: String = lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        let _ = parse_config_str(&text);
    }

    #[test]
    fn snapshot_decoders_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        let _ = Snapshot::decode(&bytes);
        let _ = read_diagnostics(&bytes);
        if let Ok(s) = std::str::from_utf8(&bytes) {
            let _ = Snapshot::from_json(s);
        }
    }

    #[test]
    fn snapshot_round_trips(c in coeffs(1.0), t in 0.0..1e4f64) {
        let f = trig(&grid(), &c);
        let s = Snapshot::from_spectrum(&f, t);
        let back = Snapshot::decode(&s.encode()).unwrap();
        prop_assert_eq!(&back, &s);
        let spec = back.to_spectrum().unwrap();
        prop_assert_eq!(spec.coeffs(), f.coeffs());
        let j = Snapshot::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(j, s);
    }
}
