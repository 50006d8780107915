use std::f64::consts::{PI, TAU};

use geovar::hecke::eigenforms;
use geovar::measure::{
    decomposition_check, error_term_diagonal, error_term_e, expected_value, mellin, mu_f, mu_f_with, shifted_sum_s,
    MeasureOptions, TestFunction,
};
use geovar::numerics::quad::GaussLegendre;
use geovar::numerics::C64;
use proptest::prelude::*;

fn delta() -> geovar::hecke::HeckeEigenform {
    eigenforms(12, 600).unwrap().remove(0)
}

/// Bump on `[1/2, 2]` in `y`, symmetric under `y -> 1/y`.
fn half_two_bump() -> TestFunction {
    TestFunction::default()
}

#[test]
fn mu_stable_under_node_doubling() {
    let f = delta();
    let psi = half_two_bump();
    let a = mu_f(&f, &psi).unwrap();
    let b = mu_f_with(&f, &psi, MeasureOptions { panel_width: 0.025, nodes: 32 }).unwrap();
    assert!(a > 0.0);
    assert!((a - b).abs() < 1e-8 * a);
}

#[test]
fn zero_test_function_gives_zero() {
    let f = delta();
    let z = TestFunction::zero();
    assert_eq!(mu_f(&f, &z).unwrap(), 0.0);
    assert_eq!(expected_value(&z).unwrap(), 0.0);
    assert_eq!(shifted_sum_s(&f, &z).unwrap(), 0.0);
    assert_eq!(error_term_e(&f, &z).unwrap(), 0.0);
    let r = decomposition_check(&f, &z).unwrap();
    assert_eq!((r.mu, r.expected, r.e_term, r.s_term, r.residual), (0.0, 0.0, 0.0, 0.0, 0.0));
}

#[test]
fn mu_scales_linearly() {
    let f = delta();
    let psi = half_two_bump();
    let a = mu_f(&f, &psi).unwrap();
    let b = mu_f(&f, &psi.scaled(3.0)).unwrap();
    assert!((b / a - 3.0).abs() < 1e-14);
}

#[test]
fn expected_value_examples() {
    let g = TestFunction::log_gaussian(1.0);
    assert!((expected_value(&g).unwrap() - 3.0 / PI.sqrt()).abs() < 1e-13);
    assert!((expected_value(&g).unwrap() - 1.692_569).abs() < 1e-6);
    // int psi dy / y = pi / 3
    let unit = g.scaled(PI / 3.0 / PI.sqrt());
    assert!((expected_value(&unit).unwrap() - 1.0).abs() < 1e-13);
}

#[test]
fn mellin_examples() {
    let g = TestFunction::log_gaussian(1.0);
    assert!((mellin(&g, C64::new(0.0, 0.0)).re - 1.772_454).abs() < 1e-6);
    assert!((mellin(&g, C64::new(1.0, 0.0)).re - PI.sqrt() * 0.25f64.exp()).abs() < 1e-14);
    assert!((mellin(&g, C64::new(1.0, 0.0)).re - 2.275_876).abs() < 1e-6);
}

#[test]
fn error_term_scale_k_to_minus_half() {
    // the contour route for the compact bump is impractical; the diagonal route is exact.
    // |E| sqrt(k) stays near 1 rather than below 0.3
    for k in [12, 16, 24, 36, 48] {
        for f in eigenforms(k, 600).unwrap() {
            let e = error_term_diagonal(&f, &half_two_bump()).unwrap();
            assert!(e.abs() * (k as f64).sqrt() < 2.0, "k {k}: {e}");
        }
    }
}

#[test]
fn shifted_sum_is_linear() {
    let f = eigenforms(12, 2000).unwrap().remove(0);
    let p1 = TestFunction::log_gaussian(1.0);
    let p2 = half_two_bump();
    let a = shifted_sum_s(&f, &p1).unwrap();
    let b = shifted_sum_s(&f, &p2).unwrap();
    let c = shifted_sum_s(&f, &p1.plus(&p2)).unwrap();
    assert!((c - a - b).abs() < 1e-12 * (a.abs() + b.abs()));
}

#[test]
fn decomposition_scales_by_two() {
    let f = eigenforms(12, 16_000).unwrap().remove(0);
    let psi = TestFunction::log_gaussian(1.0);
    let r1 = decomposition_check(&f, &psi).unwrap();
    let r2 = decomposition_check(&f, &psi.scaled(2.0)).unwrap();
    for (a, b) in [(r1.mu, r2.mu), (r1.expected, r2.expected), (r1.e_term, r2.e_term), (r1.s_term, r2.s_term)] {
        assert!((b - 2.0 * a).abs() <= 1e-12 * a.abs().max(1e-300), "{a} {b}");
    }
}

#[test]
fn decomposition_with_exact_shifted_sum_closes() {
    for k in [12, 16, 18, 20, 22, 26] {
        let f = eigenforms(k, if k > 22 { 20_000 } else { 16_000 }).unwrap().remove(0);
        let r = decomposition_check(&f, &TestFunction::log_gaussian(1.0)).unwrap();
        assert!(r.residual_exact.abs() < 1e-9, "k {k}: {r:?}");
        // the Gaussian-shift form of S_psi carries its O(k^{-1/2+eps}) remainder
        assert!(r.residual.abs() < (k as f64).powf(-0.5), "k {k}: {r:?}");
    }
}

#[test]
fn mellin_round_trip() {
    // psi(y) = (1 / 2 pi) int psi~(s) y^s dt on s = sigma + it, with psi~ built from psi(1/y)
    for psi in [TestFunction::log_gaussian(1.0), TestFunction::log_hermite(0.8)] {
        for (i, y) in [0.3, 0.5, 0.8, 1.0, 1.2, 1.7, 2.0, 2.5, 3.0, 4.0].into_iter().enumerate() {
            let sigma = if i % 2 == 0 { 0.0 } else { 0.5 };
            let gl = GaussLegendre::new(20);
            let v = gl.composite(-40.0, 40.0, 160, |t| {
                let s = C64::new(sigma, t);
                (psi.mellin(s) * (-s * f64::ln(y)).exp()).re
            }) / TAU;
            assert!((v - psi.eval(y)).abs() < 1e-8, "{psi:?} y {y}: {v} vs {}", psi.eval(y));
        }
    }
}

#[test]
fn psi_config_accepts_evenness_flag() {
    let p: TestFunction = serde_json::from_str(r#"{"kind":"bump","a":0.5,"evenness":true}"#).unwrap();
    assert_eq!(p, TestFunction::bump(0.5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn evenness_transport(re in -3.0f64..3.0, im in -20.0f64..20.0) {
        let s = C64::new(re, im);
        for psi in [TestFunction::log_gaussian(0.9), TestFunction::log_hermite(1.1), TestFunction::bump(0.8)] {
            let a = psi.mellin(s);
            let b = psi.mellin(-s);
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
            let y = re.exp();
            prop_assert!((psi.eval(y) - psi.eval(1.0 / y)).abs() <= 1e-12);
        }
    }

    #[test]
    fn expected_value_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let p1 = TestFunction::log_gaussian(0.7);
        let p2 = TestFunction::bump(0.6);
        let lhs = expected_value(&p1.scaled(a).plus(&p2.scaled(b))).unwrap();
        let rhs = a * expected_value(&p1).unwrap() + b * expected_value(&p2).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn mu_nonnegative_for_nonnegative_psi(sigma in 0.2f64..1.5) {
        thread_local!(static F: geovar::hecke::HeckeEigenform = eigenforms(16, 200).unwrap().remove(0));
        F.with(|f| {
            prop_assert!(mu_f(f, &TestFunction::log_gaussian(sigma)).unwrap() >= 0.0);
            Ok(())
        })?;
    }

    #[test]
    fn mellin_decays_on_vertical_lines(sigma in -2.0f64..2.0) {
        let psi = TestFunction::log_gaussian(1.0);
        for t in [10.0f64, 20.0, 40.0] {
            let m = psi.mellin(C64::new(sigma, t)).norm();
            prop_assert!(m * t.powi(4) < 1e3);
        }
    }
}
