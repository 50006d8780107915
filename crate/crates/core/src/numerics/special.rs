//! Gamma, zeta and Bessel functions.

use std::f64::consts::PI;

use super::C64;
use crate::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2j} / (2j)!` for `j = 1..=30`, via `(-1)^{j+1} 2 zeta(2j) / (2 pi)^{2j}`.
fn bernoulli_over_factorial() -> &'static [f64; 30] {
    static TABLE: std::sync::OnceLock<[f64; 30]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 30];
        for (i, slot) in t.iter_mut().enumerate() {
            let j = (i + 1) as i32;
            let z = zeta_even(2 * j);
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            *slot = sign * 2.0 * z / (2.0 * PI).powi(2 * j);
        }
        t
    })
}

fn zeta_even(n: i32) -> f64 {
    if n == 2 {
        return PI * PI / 6.0;
    }
    // Direct sum with a tail correction; n >= 4 converges quickly.
    let terms = 200;
    let mut s = 0.0;
    for k in (1..=terms).rev() {
        s += (k as f64).powi(-n);
    }
    let m = terms as f64 + 0.5;
    s + m.powi(1 - n) / (n - 1) as f64
}

/// Bernoulli numbers B_2, B_4, ..., B_20 (exact rationals as f64).
const STIRLING_B: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Principal-ish branch of `log Gamma(z)` for complex `z` off the poles.
///
/// The imaginary part is only determined modulo `2 pi`; callers exponentiate
/// differences.
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // reflection
        let s = (C64::new(PI, 0.0) * z).sin();
        return C64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(C64::new(1.0, 0.0) - z);
    }
    let mut shift = C64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 20.0 {
        shift += w.ln();
        w += 1.0;
    }
    let mut series = C64::new(0.0, 0.0);
    let w2 = w * w;
    let mut wp = w;
    for (j, b) in STIRLING_B.iter().enumerate() {
        let n = 2.0 * (j as f64 + 1.0);
        series += *b / (n * (n - 1.0)) / wp;
        wp *= w2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift
}

/// `log Gamma(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma_real needs x > 0");
    ln_gamma(C64::new(x, 0.0)).re
}

pub fn gamma(z: C64) -> C64 {
    ln_gamma(z).exp()
}

/// Riemann zeta by Euler–Maclaurin summation. Accurate to about `1e-13`
/// relative for `|Im s| <= 1e3` and `-10 <= Re s <= 10`.
pub fn zeta(s: C64) -> Result<C64> {
    zeta_with(s, 0, 30)
}

/// Euler–Maclaurin with an explicit head length (0 picks one from `|s|`) and
/// number of correction terms, exposed for order-change checks.
pub fn zeta_with(s: C64, head: usize, order: usize) -> Result<C64> {
    if (s - 1.0).norm() < 1e-15 {
        return Err(Error::ZetaPole);
    }
    let order = order.clamp(1, 30);
    let n = if head == 0 { (s.norm() / 2.0).ceil() as usize + 30 } else { head };
    let mut acc = C64::new(0.0, 0.0);
    for k in (1..n).rev() {
        acc += (-s * (k as f64).ln()).exp();
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp();
    acc += n_pow * nf / (s - 1.0) + n_pow * 0.5;
    let table = bernoulli_over_factorial();
    // rising factorial s (s+1) ... (s+2j-2) times N^{-s-2j+1}
    let mut rising = s;
    let mut npow = n_pow / nf;
    for (j, b) in table.iter().enumerate().take(order) {
        acc += rising * npow * *b;
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        npow /= nf * nf;
    }
    Ok(acc)
}

/// Bessel `J_n(x)` for integer `n >= 0` and real `x >= 0`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_j needs x >= 0");
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x < 1.0 || x * x < 0.25 * (n as f64 + 1.0) {
        return bessel_series(n, x);
    }
    // Miller backward recurrence from well above max(n, x)
    let start = ((n as f64).max(x) + 30.0 + 8.0 * x.sqrt()) as usize;
    let start = start + start % 2;
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut norm = 0.0;
    let mut want = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        let order = k - 1;
        if order == n as usize {
            want = cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            want *= 1e-250;
        }
    }
    norm += cur;
    want / norm
}

fn bessel_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let ln_lead = n as f64 * half.ln() - ln_gamma_real(n as f64 + 1.0);
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        term *= q / (m as f64 * (m as f64 + n as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    ln_lead.exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_integers_and_half() {
        assert!((ln_gamma_real(5.0) - 24f64.ln()).abs() < 1e-14);
        let g = gamma(C64::new(0.5, 0.0));
        assert!((g.re - PI.sqrt()).abs() < 1e-14);
        // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
        let t = 7.3;
        let g = gamma(C64::new(0.5, t));
        assert!((g.norm_sqr() - PI / (PI * t).cosh()).abs() < 1e-12 * g.norm_sqr());
    }

    #[test]
    fn zeta_values() {
        let z = zeta(C64::new(2.0, 0.0)).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-14);
        let z = zeta(C64::new(-1.0, 0.0)).unwrap();
        assert!((z.re + 1.0 / 12.0).abs() < 1e-13);
        let z = zeta(C64::new(0.5, 14.134_725_141_734_695)).unwrap();
        assert!(z.norm() < 1e-12);
        assert!(zeta(C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn bessel_reference_values() {
        // scipy.special.jv
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(11, 10.0) - 0.123_116_528_001_597_67).abs() < 1e-14);
        assert!((bessel_j(11, 125.0) - 0.058_812_258_075_407_08).abs() < 1e-13);
        assert!((bessel_j(25, 3.0) - 1.492_767_400_256_469_7e-21).abs() < 1e-33);
    }
}
