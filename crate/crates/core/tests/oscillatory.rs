use std::f64::consts::{FRAC_PI_4, PI};

use geovar::numerics::C64;
use geovar::oscillatory::{
    compare_sampled, i_v_direct, i_v_leading, i_v_spec, phase, phase_derivatives, sample_points, IvKernels,
    OffDiagonalPoint, SamplerConfig,
};
use geovar::trace::hbar_star;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn zero_frequency_point() -> OffDiagonalPoint {
    OffDiagonalPoint { n2: 1000, m1: 30, m2: 25, d1: 1, d2: 1, c: 1, a1: 0, v: 0, big_k: 2000.0 }
}

#[test]
fn zero_frequency_examples() {
    let p = zero_frequency_point();
    let (n2, m1, m2) = (1000.0, 30.0, 25.0);
    let x = p.stationary_point().unwrap();
    assert!((x - m1 * n2 / m2).abs() < 1e-9);
    assert_eq!(p.phase_at_stationary().unwrap(), 0.0);
    assert!(phase(x, n2, m1, m2).abs() < 1e-12);
    let f2 = p.curvature_at_stationary().unwrap();
    assert!((f2.abs() - m2.powi(3) / (2.0 * m1 * n2 * (n2 + m2))).abs() < 1e-15);
    // simplified zero-frequency form
    let k = IvKernels::default();
    let c = 1.0;
    let freq = c * p.big_k * p.big_k * m2 / (8.0 * PI * n2 * n2 * m1);
    let star = hbar_star(&k.kernel, &k.psi1, &k.psi2, &p.star_args(x), freq);
    let simple = C64::from_polar(1.0, -FRAC_PI_4) * (2.0 * c).sqrt() / (m1 * n2 * n2) * star;
    let lead = geovar::oscillatory::i_v_leading_unchecked(&p, &k).unwrap();
    assert!((lead - simple).norm() <= p.big_k.powf(-0.45) * simple.norm().max(1e-300), "{lead} {simple}");
}

#[test]
fn second_derivative_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x: f64 = rng.gen_range(500.0..3000.0);
        let n2: f64 = rng.gen_range(500.0..3000.0);
        let m1: f64 = rng.gen_range(1.0..60.0);
        let m2: f64 = rng.gen_range(1.0..60.0);
        let d2 = |h: f64| (phase(x + h, n2, m1, m2) - 2.0 * phase(x, n2, m1, m2) + phase(x - h, n2, m1, m2)) / (h * h);
        let h = 2e-2 * x;
        // Richardson step removes the h^2 term
        let fd = (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
        let f2 = phase_derivatives(x, n2, m1, m2, 2).unwrap();
        assert!((fd - f2).abs() < 1e-6 * f2.abs(), "{fd} {f2}");
    }
}

#[test]
fn second_derivative_sign_and_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let x: f64 = rng.gen_range(500.0..3000.0);
        let n2: f64 = rng.gen_range(500.0..3000.0);
        let m1: f64 = rng.gen_range(1.0..60.0);
        let m2: f64 = rng.gen_range(1.0..60.0);
        let f2 = phase_derivatives(x, n2, m1, m2, 2).unwrap();
        let shape = m1 * m1 * n2 / x.powi(3);
        assert!(f2 < 0.0);
        assert!(f2.abs() <= 4.0 * shape && f2.abs() >= shape / 4.0);
    }
    assert!(phase_derivatives(0.0, 1.0, 1.0, 1.0, 2).is_err());
}

#[test]
fn taylor_expansion_of_phase() {
    // error of the three displayed terms is of size m^3 / x^2
    for scale in [1e4f64, 1e5, 1e6] {
        let (x, n2, m1, m2) = (1.3 * scale, scale, 0.03 * scale.sqrt(), 0.05 * scale.sqrt());
        let taylor = -n2 * m1 * m1 / (4.0 * x) - x * m2 * m2 / (4.0 * n2) + m1 * m2 / 2.0;
        let f = phase(x, n2, m1, m2);
        assert!((f - taylor).abs() < 2.0 * (m1 + m2).powi(3) / (x * n2).sqrt(), "scale {scale}: {f} {taylor}");
    }
}

#[test]
fn stationary_residual_small() {
    let k = IvKernels::default();
    for p in sample_points(2000.0, 50, 11, &k, &SamplerConfig::default()).unwrap() {
        assert!(p.stationary_residual().unwrap() < 1e-8, "{p:?}");
        let x = p.stationary_point().unwrap();
        let slope = phase_derivatives(x, p.n2 as f64, p.m1 as f64, p.m2 as f64, 1).unwrap();
        assert!((slope - p.v as f64).abs() < 1e-8 * (1.0 + p.v.abs() as f64));
    }
}

#[test]
fn leading_term_phase_factor() {
    let k = IvKernels::default();
    let p = sample_points(2000.0, 20, 5, &k, &SamplerConfig::default())
        .unwrap()
        .into_iter()
        .find(|p| p.v != 0)
        .expect("a non-zero frequency");
    let lead = i_v_leading(&p, &k).unwrap();
    // the residue a1 enters only through e_c(a1 v)
    let shifted = OffDiagonalPoint { a1: p.a1 + p.c, ..p };
    let ratio = i_v_leading(&shifted, &k).unwrap() / lead;
    assert!((ratio - 1.0).norm() < 1e-9);
    assert!(lead.norm() > 0.0);
}

#[test]
fn generic_points_match_direct_quadrature() {
    let k = IvKernels::default();
    let rows = compare_sampled(2000.0, 3, 19, &k, &SamplerConfig::default()).unwrap();
    for r in rows {
        assert!(r.direct_error <= 1e-9 * r.direct.norm());
        assert!(r.relative_error <= 0.1, "{r:?}");
    }
}

#[test]
fn trivial_bound_dominates() {
    let k = IvKernels::default();
    for p in sample_points(500.0, 5, 23, &k, &SamplerConfig::default()).unwrap() {
        let d = i_v_direct(&p, &k).unwrap();
        let spec = i_v_spec(&p, |_| C64::new(0.0, 0.0), p.x_support(&k));
        assert!(d.quadrature.value.norm() <= spec.scales.trivial_bound(), "{p:?}");
        assert!(d.amplitude_error < 1e-8);
    }
}
