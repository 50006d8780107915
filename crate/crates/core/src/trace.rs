//! Weight kernels and the averaged and single-weight Petersson formulas.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::arith::{divisor_count, gcd};
use crate::expsums::kloosterman;
use crate::hecke::{cusp_dimension, EigenTable};
use crate::measure::TestFunction;
use crate::numerics::quad::GaussLegendre;
use crate::numerics::special::bessel_j;
use crate::numerics::{e1, KahanSum, KahanSumC, C64};
use crate::{Error, Result};

/// Smooth compactly supported weight `h` on `(t0, t1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelShape {
    /// `scale * exp(-1 / (1 - x^2))` with `x` the affine image of `t` in `(-1, 1)`.
    Bump {
        t0: f64,
        t1: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for KernelShape {
    fn default() -> Self {
        Self::Bump { t0: 1.0, t1: 2.0, scale: 1.0 }
    }
}

/// `h` together with its transforms and cached moments.
#[derive(Debug, Clone)]
pub struct WeightKernel {
    shape: KernelShape,
    moment: f64,
    log_moment: f64,
    fourth: OnceLock<f64>,
}

impl Default for WeightKernel {
    fn default() -> Self {
        Self::new(KernelShape::default())
    }
}

impl WeightKernel {
    pub fn new(shape: KernelShape) -> Self {
        let k = Self { shape, moment: 0.0, log_moment: 0.0, fourth: OnceLock::new() };
        let (a, b) = k.support();
        let (ua, ub) = (a * a, b * b);
        let base = |u: f64| k.h(u.sqrt()) * u.powf(0.25) / (TAU * u).sqrt();
        let gl = GaussLegendre::new(24);
        let moment = gl.composite(ua, ub, 32, base);
        let log_moment = gl.composite(ua, ub, 32, |u| base(u) * u.ln());
        Self { moment, log_moment, ..k }
    }

    pub fn shape(&self) -> &KernelShape {
        &self.shape
    }

    pub fn support(&self) -> (f64, f64) {
        match self.shape {
            KernelShape::Bump { t0, t1, .. } => (t0, t1),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self.shape {
            KernelShape::Bump { scale, .. } => scale == 0.0,
        }
    }

    pub fn h(&self, t: f64) -> f64 {
        match self.shape {
            KernelShape::Bump { t0, t1, scale } => {
                let x = (2.0 * t - t0 - t1) / (t1 - t0);
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    scale * (-1.0 / (1.0 - x * x)).exp()
                }
            }
        }
    }

    /// `int h(sqrt u) u^{1/4} / sqrt(2 pi u) du`.
    pub fn moment(&self) -> f64 {
        self.moment
    }

    /// `int h(sqrt u) u^{1/4} log(u) / sqrt(2 pi u) du`.
    pub fn log_moment(&self) -> f64 {
        self.log_moment
    }

    /// `h^(v) = int h(t) e^{-2 pi i v t} dt`.
    pub fn fourier(&self, v: f64) -> C64 {
        let (a, b) = self.support();
        let panels = (8.0 + 8.0 * (b - a) * v.abs()).ceil() as usize;
        GaussLegendre::new(16).composite(a, b, panels, |t| C64::from_polar(self.h(t), -TAU * v * t))
    }

    /// `int v^4 |h^(v)| dv` over the real line, cached after the first call.
    pub fn fourier_fourth_moment(&self) -> f64 {
        *self.fourth.get_or_init(|| {
            // |h^| is even; beyond |v| = 200 the integrand is below 1e-5
            let gl = GaussLegendre::new(8);
            2.0 * gl.composite(0.0, 200.0, 800, |v| v.powi(4) * self.fourier(v).norm())
        })
    }

    /// `hbar(v) = int_0^inf h(sqrt u) / sqrt(2 pi u) e^{iuv} du` with its
    /// node-doubling error estimate.
    pub fn hbar_with_error(&self, v: f64) -> (C64, f64) {
        oscillatory_u_integral(self, v, |u| self.h(u.sqrt()) / (TAU * u).sqrt())
    }

    pub fn hbar(&self, v: f64) -> C64 {
        self.hbar_with_error(v).0
    }
}

/// `int w(u) e^{iuv} du` over the `u`-support of `h` with panels of at most
/// an eighth of a period; returns the finer of two node counts and their gap.
fn oscillatory_u_integral(k: &WeightKernel, v: f64, w: impl Fn(f64) -> f64) -> (C64, f64) {
    let (a, b) = k.support();
    let (ua, ub) = (a * a, b * b);
    let period = if v == 0.0 { f64::INFINITY } else { TAU / v.abs() };
    let panels = (((ub - ua) / (period / 8.0)).ceil() as usize).max(24);
    let f = |u: f64| C64::from_polar(w(u), u * v);
    let coarse = GaussLegendre::new(12).composite(ua, ub, panels, f);
    let fine = GaussLegendre::new(24).composite(ua, ub, panels, f);
    (fine, (fine - coarse).norm())
}

/// Variables of the starred kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarArgs {
    pub d1: u64,
    pub d2: u64,
    pub n1: f64,
    pub n2: f64,
    pub m1: f64,
    pub m2: f64,
    pub c: u64,
    pub big_k: f64,
}

/// Exponent slack used in the parameter window.
pub const WINDOW_EPS: f64 = 0.05;

impl StarArgs {
    /// `v = c K^2 / (8 pi sqrt(n1 (n1 + m1) n2 (n2 + m2)))`.
    pub fn frequency(&self) -> f64 {
        self.c as f64 * self.big_k * self.big_k
            / (8.0 * PI * (self.n1 * (self.n1 + self.m1) * self.n2 * (self.n2 + self.m2)).sqrt())
    }

    /// The working window: `n_i d_i` comparable to `K`, `d_i <= K^{1/32}`,
    /// `K^{1/8} <= m1 <= K^{1/2+eps}`, `1 <= m2 <= K^{1/2+eps}`,
    /// `c K^2 / (n1 n2) <= 8 pi K^eps`.
    pub fn window_check(&self) -> Result<()> {
        let k = self.big_k;
        let fail = |s: String| Err(Error::Window(s));
        for (n, d) in [(self.n1, self.d1), (self.n2, self.d2)] {
            let nd = n * d as f64;
            if !(k / 20.0..=2.0 * k).contains(&nd) {
                return fail(format!("n d = {nd} not comparable to K = {k}"));
            }
            if d as f64 > k.powf(1.0 / 32.0) {
                return fail(format!("d = {d} exceeds K^(1/32)"));
            }
        }
        let top = k.powf(0.5 + WINDOW_EPS);
        if self.m1 < k.powf(0.125) || self.m1 > top {
            return fail(format!("m1 = {} outside [K^(1/8), K^(1/2+eps)]", self.m1));
        }
        if self.m2 < 1.0 || self.m2 > top {
            return fail(format!("m2 = {} outside [1, K^(1/2+eps)]", self.m2));
        }
        let ratio = self.c as f64 * k * k / (self.n1 * self.n2);
        if ratio > 8.0 * PI * k.powf(WINDOW_EPS) {
            return fail(format!("c K^2 / (n1 n2) = {ratio} too large"));
        }
        Ok(())
    }
}

/// `hbar*(v) = (K/8) int h(sqrt u) sqrt(u) / sqrt(2 pi u) psi1(..) psi2(..)
/// exp(-sqrt(u) K m1^2 / (2 (2 n1 + m1)^2)) exp(-sqrt(u) K m2^2 / (2 (2 n2 + m2)^2)) e^{iuv} du`.
pub fn hbar_star(kernel: &WeightKernel, psi1: &TestFunction, psi2: &TestFunction, a: &StarArgs, v: f64) -> C64 {
    hbar_star_with_error(kernel, psi1, psi2, a, v).0
}

pub fn hbar_star_with_error(
    kernel: &WeightKernel,
    psi1: &TestFunction,
    psi2: &TestFunction,
    a: &StarArgs,
    v: f64,
) -> (C64, f64) {
    let k = a.big_k;
    let g1 = k / (TAU * a.d1 as f64 * (a.n1 + a.m1));
    let g2 = k / (TAU * a.d2 as f64 * (a.n2 + a.m2));
    let e1 = k * a.m1 * a.m1 / (2.0 * (2.0 * a.n1 + a.m1).powi(2));
    let e2 = k * a.m2 * a.m2 / (2.0 * (2.0 * a.n2 + a.m2).powi(2));
    hbar_star_weighted(kernel, v, |t| psi1.eval(t * g1) * psi2.eval(t * g2) * (-(e1 + e2) * t).exp(), k)
}

/// `(K/8) int h(sqrt u) sqrt(u) / sqrt(2 pi u) w(sqrt u) e^{iuv} du`.
pub fn hbar_star_weighted(kernel: &WeightKernel, v: f64, w: impl Fn(f64) -> f64, big_k: f64) -> (C64, f64) {
    let (val, err) = oscillatory_u_integral(kernel, v, |u| {
        let t = u.sqrt();
        kernel.h(t) * t / (TAU * u).sqrt() * w(t)
    });
    (val * (big_k / 8.0), err * big_k / 8.0)
}

/// [`hbar_star`] after checking the parameter window.
pub fn hbar_star_checked(
    kernel: &WeightKernel,
    psi1: &TestFunction,
    psi2: &TestFunction,
    a: &StarArgs,
) -> Result<C64> {
    a.window_check()?;
    Ok(hbar_star(kernel, psi1, psi2, a, a.frequency()))
}

/// Even weights `k` with `h((k - 1) / K) != 0`.
pub fn weights_for(kernel: &WeightKernel, big_k: f64) -> Vec<u32> {
    let (a, b) = kernel.support();
    let lo = (a * big_k + 1.0).floor() as u32;
    let hi = (b * big_k + 1.0).ceil() as u32;
    (lo..=hi).filter(|k| k % 2 == 0 && *k >= 4 && kernel.h((*k as f64 - 1.0) / big_k) != 0.0).collect()
}

/// Both sides of the averaged Petersson formula and the allowance for their gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedSides {
    pub lhs: f64,
    pub rhs: f64,
    /// `10 (sqrt(mn) / K^4 int v^4 |h^(v)| dv + 1_{m=n})`.
    pub allowance: f64,
    /// Per-modulus Bessel-average bound summed over `c`:
    /// `sum_c 2 pi |S(m, n; c)| / c * (4 pi sqrt(mn) / c) / K^4 * int v^4 |h^|`, plus `10 * 1_{m=n}`.
    pub summed_allowance: f64,
    /// Number of moduli kept on the geometric side.
    pub moduli: u64,
}

/// Safety ceiling on the modulus in every Kloosterman-Bessel sum.
pub const MAX_MODULUS: u64 = 10_000;

/// Spectral and geometric sides for `m, n` at scale `K`.
pub fn averaged_petersson_sides(m: u64, n: u64, big_k: f64, kernel: &WeightKernel, table: &EigenTable) -> Result<AveragedSides> {
    if kernel.is_zero() {
        return Ok(AveragedSides { lhs: 0.0, rhs: 0.0, allowance: 0.0, summed_allowance: 0.0, moduli: 0 });
    }
    let mut lhs = KahanSum::new();
    for k in weights_for(kernel, big_k) {
        if cusp_dimension(k) > 0 && !table.contains(k) {
            return Err(Error::Coverage { need: k as u64, have: 0 });
        }
        let w = 2.0 * kernel.h((k as f64 - 1.0) / big_k) * 2.0 * PI * PI / (k as f64 - 1.0);
        for f in table.forms(k) {
            lhs.add(w * f.lambda(m)? * f.lambda(n)? / f.sym2_l1());
        }
    }
    let mn = (m * n) as f64;
    let root = mn.sqrt();
    let diag = if m == n { kernel.fourier(0.0).re * big_k } else { 0.0 };
    let mut geo = KahanSumC::new();
    let mut bessel_bound = KahanSum::new();
    let mut quiet = 0;
    let mut total_c = 0;
    for c in 1..=MAX_MODULUS {
        total_c = c;
        let v = c as f64 * big_k * big_k / (8.0 * PI * root);
        let (hb, err) = kernel.hbar_with_error(v);
        let s = kloosterman(m as i64, n as i64, c);
        let term = e1(2.0 * root / c as f64) * hb * (s / (c as f64).sqrt());
        geo.add(term);
        bessel_bound.add(TAU * s.abs() / c as f64 * (4.0 * PI * root / c as f64));
        // Weil bound on |S| / sqrt(c)
        let weil = divisor_count(c) as f64 * (gcd(gcd(m, n), c) as f64).sqrt();
        if (hb.norm() + err) * weil < 1e-12 * geo.value().norm().max(1.0) {
            quiet += 1;
            if quiet >= 8 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if quiet < 8 {
        return Err(Error::Truncation(format!("modulus sum not settled by c = {MAX_MODULUS}")));
    }
    let rot = C64::from_polar(1.0, -TAU / 8.0);
    let rhs = diag - PI.sqrt() * mn.powf(-0.25) * big_k * (rot * geo.value()).im;
    let fourth = kernel.fourier_fourth_moment() / big_k.powi(4);
    let diag_err = if m == n { 10.0 } else { 0.0 };
    let allowance = 10.0 * root * fourth + diag_err;
    let summed_allowance = bessel_bound.value() * fourth + diag_err;
    Ok(AveragedSides { lhs: lhs.value(), rhs, allowance, summed_allowance, moduli: total_c })
}

/// Both sides of the single-weight Petersson formula
/// `(2 pi^2 / (k-1)) sum_f lambda(m) lambda(n) / L(1, sym^2 f)
///   = delta + 2 pi i^{-k} sum_c S(m, n; c) / c J_{k-1}(4 pi sqrt(mn) / c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSides {
    pub spectral: f64,
    pub geometric: f64,
    pub residual: f64,
}

pub fn classical_petersson_check(k: u32, m: u64, n: u64, table: &EigenTable) -> Result<ClassicalSides> {
    if cusp_dimension(k) > 0 && !table.contains(k) {
        return Err(Error::Coverage { need: k as u64, have: 0 });
    }
    let mut spectral = KahanSum::new();
    for f in table.forms(k) {
        spectral.add(f.lambda(m)? * f.lambda(n)? / f.sym2_l1());
    }
    let spectral = 2.0 * PI * PI / (k as f64 - 1.0) * spectral.value();
    let x = 4.0 * PI * ((m * n) as f64).sqrt();
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let mut geo = KahanSum::new();
    let mut settled = false;
    for c in 1..=MAX_MODULUS {
        let arg = x / c as f64;
        let j = bessel_j(k - 1, arg);
        geo.add(kloosterman(m as i64, n as i64, c) / c as f64 * j);
        // past the turning point J_{k-1} decreases like arg^{k-1}
        let weil = divisor_count(c) as f64 * (c as f64).sqrt() * (gcd(gcd(m, n), c) as f64).sqrt() / c as f64;
        if arg < 0.5 * (k as f64 - 1.0) && weil * j.abs() < 1e-18 {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::Truncation(format!("Bessel sum not settled by c = {MAX_MODULUS}")));
    }
    let delta = if m == n { 1.0 } else { 0.0 };
    let geometric = delta + TAU * sign * geo.value();
    Ok(ClassicalSides { spectral, geometric, residual: (spectral - geometric).abs() })
}
