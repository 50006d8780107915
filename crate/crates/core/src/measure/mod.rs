//! The vertical-geodesic measure `mu_f(psi)`, its expected value and the
//! diagonal / off-diagonal pieces of `|f(iy)|^2`.

mod psi;

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

pub use psi::TestFunction;

use crate::hecke::{HeckeEigenform, Sym2LFunction};
use crate::numerics::quad::{adaptive_with_breaks, GaussLegendre};
use crate::numerics::special::{ln_gamma, ln_gamma_real, zeta};
use crate::numerics::{KahanSum, C64};
use crate::{Error, Result};

/// Depth (in nats) below the peak at which sums and integrals are cut.
const DROP: f64 = 45.0;

/// Quadrature layout for `mu_f` (composite Gauss–Legendre in `log y`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    pub panel_width: f64,
    pub nodes: usize,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self { panel_width: 0.05, nodes: 16 }
    }
}

/// Number of Fourier terms after which `n^{k-1} e^{-4 pi n y}` has dropped
/// `DROP` nats below its largest value.
fn terms_at(k: u32, y: f64) -> usize {
    let g = |n: f64| (k as f64 - 1.0) * n.ln() + 2.0 * (n + 1.0).ln() - 4.0 * PI * n * y;
    let nstar = ((k as f64 - 1.0) / (4.0 * PI * y)).max(1.0);
    let peak = g(nstar.floor().max(1.0)).max(g(nstar.ceil()));
    let mut n = nstar.ceil() as usize;
    while g(n as f64) > peak - DROP {
        n += 1;
    }
    n
}

/// `mu_f(psi) = int_0^inf |f(iy)|^2 y^k psi(y) dy / y` for the L^2-normalised `f`.
///
/// Uses `y -> 1/y` invariance of `|f(iy)|^2 y^k`, so only `y >= 1` is sampled.
pub fn mu_f(f: &HeckeEigenform, psi: &TestFunction) -> Result<f64> {
    mu_f_with(f, psi, MeasureOptions::default())
}

pub fn mu_f_with(f: &HeckeEigenform, psi: &TestFunction, opts: MeasureOptions) -> Result<f64> {
    if psi.is_zero() {
        return Ok(0.0);
    }
    let k = f.weight();
    let kf = k as f64;
    let m = terms_at(k, 1.0);
    let lam = f.lambda_table(m)?;
    let g = |y: f64| kf * y.ln() - 4.0 * PI * y;
    let ystar = (kf / (4.0 * PI)).max(1.0);
    let mut ymax = ystar;
    while g(ymax) > g(ystar) - DROP {
        ymax += 0.05;
    }
    let (lo, hi) = psi.log_support();
    let umax = ymax.ln().min(lo.abs().max(hi.abs()));
    if umax <= 0.0 {
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = psi.log_breakpoints().into_iter().map(f64::abs).filter(|&b| b > 0.0 && b < umax).collect();
    cuts.push(0.0);
    cuts.push(umax);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let half = (kf - 1.0) / 2.0;
    let integrand = |u: f64| {
        let y = u.exp();
        let s: f64 = (1..=m)
            .map(|n| {
                let nf = n as f64;
                lam[n] * (half * nf.ln() - TAU * nf * y + 0.5 * kf * u).exp()
            })
            .sum();
        s * s * (psi.at_log(u) + psi.at_log(-u))
    };
    let gl = GaussLegendre::new(opts.nodes);
    let mut acc = KahanSum::new();
    for w in cuts.windows(2) {
        let panels = ((w[1] - w[0]) / opts.panel_width).ceil().max(1.0) as usize;
        acc.add(gl.composite(w[0], w[1], panels, integrand));
    }
    Ok(acc.value() / f.petersson_norm())
}

/// `E(psi) = (3 / pi) int_0^inf psi(y) dy / y`.
pub fn expected_value(psi: &TestFunction) -> Result<f64> {
    if psi.is_zero() {
        return Ok(0.0);
    }
    let (lo, hi) = psi.log_support();
    let mut pts = vec![lo, hi];
    pts.extend(psi.log_breakpoints().into_iter().filter(|&b| b > lo && b < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let v = adaptive_with_breaks(|u| psi.at_log(u), &pts, 1e-16, 1e-14)?;
    Ok(3.0 / PI * v)
}

/// `psi~(s)`.
pub fn mellin(psi: &TestFunction, s: C64) -> C64 {
    psi.mellin(s)
}

/// Range of `log t` carrying the Gamma(k) density `t^{k-1} e^{-t} / Gamma(k)`.
fn gamma_window(k: u32) -> (f64, f64) {
    let kf = k as f64;
    let lg = ln_gamma_real(kf);
    let dens = |v: f64| -v.exp() + kf * v - lg;
    let v0 = kf.ln();
    let (mut lo, mut hi) = (v0, v0);
    while dens(lo) > -DROP - 5.0 {
        lo -= 0.01;
    }
    while dens(hi) > -DROP - 5.0 {
        hi += 0.01;
    }
    (lo, hi)
}

/// `J(N) = Gamma(k)^{-1} int_0^inf e^{-t} t^{k-1} psi(t / (2 pi N)) dt`.
fn gamma_average(k: u32, psi: &TestFunction, big_n: f64, window: (f64, f64)) -> Result<f64> {
    let kf = k as f64;
    let lg = ln_gamma_real(kf);
    let shift = (TAU * big_n).ln();
    let (lo, hi) = window;
    let (slo, shi) = psi.log_support();
    let a = lo.max(slo + shift);
    let b = hi.min(shi + shift);
    if a >= b {
        return Ok(0.0);
    }
    let mut pts = vec![a, b];
    pts.extend(psi.log_breakpoints().into_iter().map(|x| x + shift).filter(|&x| x > a && x < b));
    let v0 = kf.ln();
    if v0 > a && v0 < b {
        pts.push(v0);
    }
    pts.sort_by(f64::total_cmp);
    adaptive_with_breaks(|v| (-v.exp() + kf * v - lg).exp() * psi.at_log(v - shift), &pts, 1e-20, 1e-13)
}

/// Range of `N = n + m` where `J(N)` can be non-negligible.
fn n_range(k: u32, psi: &TestFunction) -> (usize, usize, (f64, f64)) {
    let w = gamma_window(k);
    let (slo, shi) = psi.log_support();
    let lo = ((w.0 - shi).exp() / TAU).floor().max(2.0) as usize;
    let hi = ((w.1 - slo).exp() / TAU).ceil() as usize + 1;
    (lo, hi, w)
}

/// Diagonal part of `mu_f(psi)`: the `m = n` terms of `|f(iy)|^2`.
pub fn diagonal_part(f: &HeckeEigenform, psi: &TestFunction) -> Result<f64> {
    if psi.is_zero() {
        return Ok(0.0);
    }
    let k = f.weight();
    let (lo, hi, w) = n_range(k, psi);
    let lam = f.lambda_table(hi / 2 + 1)?;
    let mut acc = KahanSum::new();
    for n in (lo / 2).max(1)..=hi / 2 + 1 {
        let j = gamma_average(k, psi, 2.0 * n as f64, w)?;
        acc.add(lam[n] * lam[n] / (2.0 * n as f64) * j);
    }
    Ok(PI / f.sym2_l1() * acc.value())
}

/// Largest `n` with `lambda_f(n)` used by `mu_f`, `diagonal_part` and
/// `shifted_sum_s` at weight `k`.
pub fn coefficients_needed(k: u32, psi: &TestFunction) -> usize {
    if psi.is_zero() {
        return 1;
    }
    let (_, hi, _) = n_range(k, psi);
    let slo = psi.log_support().0;
    let shifted = ((k as f64 / TAU) * (-slo).exp()).ceil() as usize;
    terms_at(k, 1.0).max(hi / 2 + 1).max(shifted)
}

/// `E_psi` through the diagonal sum: `diagonal_part - E(psi)`.
pub fn error_term_diagonal(f: &HeckeEigenform, psi: &TestFunction) -> Result<f64> {
    Ok(diagonal_part(f, psi)? - expected_value(psi)?)
}

/// `S_psi` from its definition: all `m != n` terms of `|f(iy)|^2`, each
/// `y`-integral done exactly as a Gamma average of `psi`.
pub fn shifted_sum_exact(f: &HeckeEigenform, psi: &TestFunction) -> Result<f64> {
    if psi.is_zero() {
        return Ok(0.0);
    }
    let k = f.weight();
    let km1 = k as f64 - 1.0;
    let (lo, hi, w) = n_range(k, psi);
    let lam = f.lambda_table(hi)?;
    let mut acc = KahanSum::new();
    for big_n in lo..=hi {
        let j = gamma_average(k, psi, big_n as f64, w)?;
        if j == 0.0 {
            continue;
        }
        let nf = big_n as f64;
        let mut inner = KahanSum::new();
        for n in 1..big_n {
            let m = big_n - n;
            if n == m {
                continue;
            }
            let e = km1 * (2.0 * ((n as f64) * (m as f64)).sqrt() / nf).ln();
            if e < -DROP - 10.0 {
                continue;
            }
            inner.add(lam[n] * lam[m] * e.exp());
        }
        acc.add(inner.value() * j / nf);
    }
    Ok(PI / f.sym2_l1() * acc.value())
}

/// `S_psi` in the Gaussian-shift form:
/// `(pi / (2 L(1, sym^2 f))) sum_{l != 0} sum_n lambda(n) lambda(n + l) / sqrt(n (n + l))
///  exp(-k l^2 / (2 (2n + l)^2)) psi(k / (2 pi (2n + l)))`.
pub fn shifted_sum_s(f: &HeckeEigenform, psi: &TestFunction) -> Result<f64> {
    if psi.is_zero() {
        return Ok(0.0);
    }
    let k = f.weight();
    let kf = k as f64;
    let (slo, shi) = psi.log_support();
    // psi(k / (2 pi N)) needs log(k / (2 pi N)) in [slo, shi]
    let nlo = ((kf / TAU) * (-shi).exp()).floor().max(2.0) as usize;
    let nhi = ((kf / TAU) * (-slo).exp()).ceil() as usize;
    let lam = f.lambda_table(nhi)?;
    // exp(-k l^2 / (2 N^2)) < 1e-14 * e^{-DROP + 32}
    let gauss_cut = (2.0 * (DROP + 5.0) / kf).sqrt();
    let mut acc = KahanSum::new();
    for big_n in nlo..=nhi {
        let nf = big_n as f64;
        let p = psi.eval(kf / (TAU * nf));
        if p == 0.0 {
            continue;
        }
        let lmax = ((gauss_cut * nf) as usize).min(big_n - 1);
        let mut inner = KahanSum::new();
        for l in 1..=lmax {
            if (big_n - l) % 2 != 0 {
                continue;
            }
            let n = (big_n - l) / 2;
            if n == 0 {
                continue;
            }
            let g = (-kf * (l * l) as f64 / (2.0 * nf * nf)).exp();
            let t = lam[n] * lam[n + l] / ((n * (n + l)) as f64).sqrt() * g;
            // l > 0 and the mirrored l < 0 term (n + l, -l) are summed separately
            inner.add(t);
            inner.add(lam[n + l] * lam[n] / (((n + l) * n) as f64).sqrt() * g);
        }
        acc.add(p * inner.value());
    }
    Ok(PI / (2.0 * f.sym2_l1()) * acc.value())
}

/// The critical-line integrand of `E_psi` without the `psi~` factor,
/// cached per height panel so several test functions can share it.
pub struct ErrorTermLine<'a> {
    f: &'a HeckeEigenform,
    l: Sym2LFunction,
    gl: GaussLegendre,
    panels: RefCell<Vec<Vec<(f64, f64, C64)>>>,
}

/// Largest height accepted for the `E_psi` contour.
const MAX_HEIGHT: usize = 400;

impl<'a> ErrorTermLine<'a> {
    pub fn new(f: &'a HeckeEigenform) -> Result<Self> {
        let l = Sym2LFunction::new(f, f.prime_bound() as usize)?;
        Ok(Self { f, l, gl: GaussLegendre::new(16), panels: RefCell::new(Vec::new()) })
    }

    /// `zeta(s) L(s, sym^2 f) / ((4 pi)^s zeta(2s)) Gamma(k + s - 1) / Gamma(k)`.
    fn core(&self, s: C64) -> Result<C64> {
        let k = self.f.weight() as f64;
        let lg = ln_gamma(s + (k - 1.0)) - ln_gamma_real(k) - s * (4.0 * PI).ln();
        Ok(zeta(s)? * self.l.value(s)? / zeta(s * 2.0)? * lg.exp())
    }

    fn panel(&self, j: usize) -> Result<Vec<(f64, f64, C64)>> {
        if let Some(p) = self.panels.borrow().get(j) {
            return Ok(p.clone());
        }
        let mut cache = self.panels.borrow_mut();
        while cache.len() <= j {
            let a = cache.len() as f64;
            let nodes = self
                .gl
                .mapped(a, a + 1.0)
                .map(|(t, w)| Ok((t, w, self.core(C64::new(0.5, t))?)))
                .collect::<Result<Vec<_>>>()?;
            cache.push(nodes);
        }
        Ok(cache[j].clone())
    }

    /// `E_psi` from the contour on `Re s = 1/2`, truncated once the integrand
    /// stays below `1e-13` over two unit panels.
    pub fn evaluate(&self, psi: &TestFunction) -> Result<f64> {
        if psi.is_zero() {
            return Ok(0.0);
        }
        let mut acc = KahanSum::new();
        let mut quiet = 0;
        for j in 0..MAX_HEIGHT {
            // the psi~ factor alone decides when to stop; probe it before the L-values
            let probe = (0..=4)
                .map(|i| psi.mellin(C64::new(-0.5, j as f64 + 0.25 * i as f64)).norm())
                .fold(0.0, f64::max);
            let growth = (j as f64 + 2.0).powi(2) * (self.f.weight() as f64).sqrt();
            if probe * growth < 1e-14 {
                quiet += 1;
                if quiet >= 2 {
                    return Ok(2.0 * PI / self.f.sym2_l1() * acc.value());
                }
                continue;
            }
            quiet = 0;
            for (t, w, c) in self.panel(j)? {
                acc.add(w * (psi.mellin(C64::new(-0.5, t)) * c).re);
            }
        }
        Err(Error::Truncation(format!("E_psi contour needs height beyond {MAX_HEIGHT}")))
    }

    /// Largest height sampled so far.
    pub fn height(&self) -> usize {
        self.panels.borrow().len()
    }
}

/// `E_psi` from the contour integral on `Re s = 1/2`.
pub fn error_term_e(f: &HeckeEigenform, psi: &TestFunction) -> Result<f64> {
    if psi.is_zero() {
        return Ok(0.0);
    }
    ErrorTermLine::new(f)?.evaluate(psi)
}

/// All pieces of `mu_f(psi) = E(psi) + E_psi + S_psi + remainder`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub mu: f64,
    pub expected: f64,
    /// `E_psi` from the critical-line contour.
    pub e_term: f64,
    /// `S_psi` in the Gaussian-shift form.
    pub s_term: f64,
    /// `mu - expected - e_term - s_term`.
    pub residual: f64,
    /// `E_psi` from the diagonal sum.
    pub e_diagonal: f64,
    /// `S_psi` from its defining double sum.
    pub s_exact: f64,
    /// `mu - expected - e_term - s_exact`.
    pub residual_exact: f64,
}

impl MeasureReport {
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            mu: c * self.mu,
            expected: c * self.expected,
            e_term: c * self.e_term,
            s_term: c * self.s_term,
            residual: c * self.residual,
            e_diagonal: c * self.e_diagonal,
            s_exact: c * self.s_exact,
            residual_exact: c * self.residual_exact,
        }
    }
}

/// Evaluate every piece by its own routine and report the residuals.
pub fn decomposition_check(f: &HeckeEigenform, psi: &TestFunction) -> Result<MeasureReport> {
    let line = ErrorTermLine::new(f)?;
    decomposition_check_with(f, psi, &line)
}

/// As [`decomposition_check`], reusing a cached contour.
pub fn decomposition_check_with(f: &HeckeEigenform, psi: &TestFunction, line: &ErrorTermLine) -> Result<MeasureReport> {
    let mu = mu_f(f, psi)?;
    let expected = expected_value(psi)?;
    let e_term = line.evaluate(psi)?;
    let s_term = shifted_sum_s(f, psi)?;
    let e_diagonal = error_term_diagonal(f, psi)?;
    let s_exact = shifted_sum_exact(f, psi)?;
    Ok(MeasureReport {
        mu,
        expected,
        e_term,
        s_term,
        residual: mu - expected - e_term - s_term,
        e_diagonal,
        s_exact,
        residual_exact: mu - expected - e_term - s_exact,
    })
}
