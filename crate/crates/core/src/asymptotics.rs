//! Vertical-line contour integrals, the diagonal and off-diagonal main terms,
//! and the assembled variance prediction.

use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::measure::TestFunction;
use crate::numerics::quad::{tanh_sinh, GaussLegendre};
use crate::numerics::special::{gamma, ln_gamma, zeta};
use crate::numerics::{KahanSumC, C64};
use crate::trace::WeightKernel;
use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `sqrt(2) pi / 32`, the `K^{3/2} log K` coefficient.
pub fn coeff_log_k() -> f64 {
    SQRT_2 * PI / 32.0
}

/// `sqrt(2) pi / 64`, the `log u` coefficient.
pub fn coeff_log_u() -> f64 {
    SQRT_2 * PI / 64.0
}

/// `sqrt(2) pi / 16 (3 gamma / 2 - log 4 pi)`.
pub fn coeff_const() -> f64 {
    SQRT_2 * PI / 16.0 * (1.5 * EULER_GAMMA - (4.0 * PI).ln())
}

/// `sqrt(2) pi / 16`, carried by each of the two contour terms.
pub fn coeff_half_contour() -> f64 {
    SQRT_2 * PI / 16.0
}

/// `sqrt(2) pi / 8`, the contour coefficient of the final formula.
pub fn coeff_contour() -> f64 {
    SQRT_2 * PI / 8.0
}

/// `zeta(s)` with the pole reported as an error.
pub fn zeta_line(s: C64) -> Result<C64> {
    zeta(s)
}

/// Truncation and panel settings for vertical-line integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    /// Real part of the line.
    pub line: f64,
    /// Fixed height; `None` grows the height until the tail certificate holds.
    pub height: Option<f64>,
    /// Panel width in `t`.
    pub panel: f64,
    /// Largest height tried by the adaptive mode.
    pub max_height: f64,
    /// Relative size of the integrand at the truncation point, weighted by
    /// the height as a polynomial-growth margin.
    pub tail_tol: f64,
}

impl ContourSpec {
    pub fn on_line(line: f64) -> Self {
        Self { line, height: None, panel: 0.25, max_height: 1000.0, tail_tol: 1e-12 }
    }

    pub fn with_height(self, height: f64) -> Self {
        Self { height: Some(height), ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourValue {
    pub value: C64,
    pub height: f64,
    /// `|integrand(line + iT)| * T` at the truncation height.
    pub tail: f64,
}

const BLOCK: f64 = 4.0;

/// `(1 / 2 pi i) int_{(line)} f(s) ds = (1 / 2 pi) int f(line + it) dt`.
pub fn contour_integral(f: impl Fn(C64) -> Result<C64>, spec: &ContourSpec) -> Result<ContourValue> {
    let gl = GaussLegendre::new(16);
    let mut acc = KahanSumC::new();
    let mut err = None;
    let mut block = |lo: f64, hi: f64, acc: &mut KahanSumC| {
        let panels = ((hi - lo) / spec.panel).ceil().max(1.0) as usize;
        let w = (hi - lo) / panels as f64;
        for p in 0..panels {
            let a = lo + w * p as f64;
            for (t, wt) in gl.mapped(a, a + w) {
                match f(C64::new(spec.line, t)) {
                    Ok(v) => acc.add(v * wt),
                    Err(e) => {
                        err.get_or_insert(e);
                    }
                }
            }
        }
    };
    let probe = |t: f64| -> Result<f64> {
        Ok(f(C64::new(spec.line, t))?.norm().max(f(C64::new(spec.line, -t))?.norm()) * t.max(1.0))
    };
    let (value, height) = match spec.height {
        Some(h) => {
            block(-h, h, &mut acc);
            (acc.value(), h)
        }
        None => {
            let mut h = 0.0;
            let mut quiet = 0;
            loop {
                block(h, h + BLOCK, &mut acc);
                block(-h - BLOCK, -h, &mut acc);
                h += BLOCK;
                let tail = probe(h)?;
                if tail <= spec.tail_tol * acc.value().norm().max(1e-300) {
                    quiet += 1;
                    if quiet >= 2 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
                if h >= spec.max_height {
                    return Err(Error::Truncation(format!(
                        "vertical integral on Re s = {} not settled by height {}",
                        spec.line, spec.max_height
                    )));
                }
            }
            (acc.value(), h)
        }
    };
    if let Some(e) = err {
        return Err(e);
    }
    Ok(ContourValue { value: value / TAU, height, tail: probe(height)? })
}

/// `(1 / 2 pi i) int_{(1)} psi1~(-s) psi2~(s) zeta(1 - s) zeta(1 + s) ds`.
pub fn diagonal_contour(psi1: &TestFunction, psi2: &TestFunction, spec: &ContourSpec) -> Result<ContourValue> {
    contour_integral(|s| Ok(psi1.mellin(-s) * psi2.mellin(s) * zeta_line(1.0 - s)? * zeta_line(1.0 + s)?), spec)
}

/// `(1 / 2 pi i) int_{(eps)} psi1~(s) psi2~(s) zeta(1 + s) zeta(1 - s) ds`.
pub fn offdiagonal_contour(psi1: &TestFunction, psi2: &TestFunction, spec: &ContourSpec) -> Result<ContourValue> {
    contour_integral(|s| Ok(psi1.mellin(s) * psi2.mellin(s) * zeta_line(1.0 + s)? * zeta_line(1.0 - s)?), spec)
}

/// Real part of the off-diagonal line.
pub const OFFDIAGONAL_LINE: f64 = 0.25;

/// Largest imaginary part tolerated in a real-valued contour result.
pub const IMAG_TOL: f64 = 1e-9;

/// `(sqrt(2) pi / 8) (1 / 2 pi i) int_{(1)} psi1~(-s) psi2~(s) zeta(1 - s) zeta(1 + s) ds`.
pub fn contour_b(psi1: &TestFunction, psi2: &TestFunction) -> Result<f64> {
    contour_b_with(psi1, psi2, &ContourSpec::on_line(1.0))
}

pub fn contour_b_with(psi1: &TestFunction, psi2: &TestFunction, spec: &ContourSpec) -> Result<f64> {
    if psi1.is_zero() || psi2.is_zero() {
        return Ok(0.0);
    }
    let v = diagonal_contour(psi1, psi2, spec)?.value * coeff_contour();
    if v.im.abs() > IMAG_TOL * v.re.abs().max(1.0) {
        return Err(Error::Truncation(format!("contour value not real: {v}")));
    }
    Ok(v.re)
}

/// The `K^{3/2}` coefficients of the diagonal term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalTerms {
    /// Coefficient of `K^{3/2} log K`.
    pub log_k: f64,
    pub log_u: f64,
    /// `(3 gamma / 2 - log 4 pi)` part of the constant.
    pub constant: f64,
    /// `psi1~(0) psi2~'(0)` part of the constant.
    pub derivative: f64,
    /// The `zeta(1 - s) zeta(1 + s)` residue term.
    pub contour: f64,
}

pub fn diagonal_main_term(psi1: &TestFunction, psi2: &TestFunction, kernel: &WeightKernel) -> Result<DiagonalTerms> {
    if psi1.is_zero() || psi2.is_zero() || kernel.is_zero() {
        return Ok(DiagonalTerms { log_k: 0.0, log_u: 0.0, constant: 0.0, derivative: 0.0, contour: 0.0 });
    }
    let zero = C64::new(0.0, 0.0);
    let p1 = psi1.mellin(zero).re;
    let p2 = psi2.mellin(zero).re;
    let d2 = psi2.mellin_derivative(zero).re;
    let m0 = kernel.moment();
    let contour = diagonal_contour(psi1, psi2, &ContourSpec::on_line(1.0))?.value;
    Ok(DiagonalTerms {
        log_k: coeff_log_k() * p1 * p2 * m0,
        log_u: coeff_log_u() * p1 * p2 * kernel.log_moment(),
        constant: coeff_const() * p1 * p2 * m0,
        derivative: coeff_half_contour() * p1 * d2 * m0,
        contour: coeff_half_contour() * contour.re * m0,
    })
}

/// `M0 (sqrt(2) pi / 16)` times the off-diagonal contour, without the `K^{3/2}`.
pub fn offdiagonal_coefficient(psi1: &TestFunction, psi2: &TestFunction, kernel: &WeightKernel) -> Result<f64> {
    if psi1.is_zero() || psi2.is_zero() || kernel.is_zero() {
        return Ok(0.0);
    }
    let v = offdiagonal_contour(psi1, psi2, &ContourSpec::on_line(OFFDIAGONAL_LINE))?.value;
    Ok(kernel.moment() * coeff_half_contour() * v.re)
}

pub fn offdiagonal_main_term(psi1: &TestFunction, psi2: &TestFunction, kernel: &WeightKernel, big_k: f64) -> Result<f64> {
    Ok(big_k.powf(1.5) * offdiagonal_coefficient(psi1, psi2, kernel)?)
}

/// Relative size below which the derivative term counts as zero.
pub const DISCREPANCY_TOL: f64 = 1e-12;

/// The four `K^{3/2}` coefficients and the totals with and without the
/// `psi1~(0) psi2~'(0)` term, which the final theorem omits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariancePrediction {
    #[serde(rename = "K")]
    pub big_k: f64,
    #[serde(rename = "term_logK")]
    pub term_log_k: f64,
    #[serde(rename = "term_logu")]
    pub term_log_u: f64,
    /// Includes the derivative term.
    pub term_const: f64,
    /// Diagonal contour term plus the off-diagonal term.
    pub term_contour: f64,
    /// The derivative term alone.
    pub term_derivative: f64,
    /// `K^{3/2} (term_log_k log K + term_log_u + term_const + term_contour)`.
    pub total: f64,
    /// Same without the derivative term.
    pub total_theorem: f64,
    /// Set when the two totals differ.
    pub discrepancy: bool,
}

impl VariancePrediction {
    pub fn from_terms(d: &DiagonalTerms, offdiagonal: f64, big_k: f64) -> Self {
        let k32 = big_k.powf(1.5);
        let term_const = d.constant + d.derivative;
        let term_contour = d.contour + offdiagonal;
        let base = d.log_k * big_k.ln() + d.log_u + term_contour;
        Self {
            big_k,
            term_log_k: d.log_k,
            term_log_u: d.log_u,
            term_const,
            term_contour,
            term_derivative: d.derivative,
            total: k32 * (base + term_const),
            total_theorem: k32 * (base + d.constant),
            discrepancy: d.derivative.abs() > DISCREPANCY_TOL * d.log_k.abs().max(d.constant.abs()).max(d.contour.abs()),
        }
    }

    pub fn at(&self, big_k: f64) -> Self {
        let d = DiagonalTerms {
            log_k: self.term_log_k,
            log_u: self.term_log_u,
            constant: self.term_const - self.term_derivative,
            derivative: self.term_derivative,
            contour: 0.0,
        };
        Self::from_terms(&d, self.term_contour, big_k)
    }
}

pub fn variance_prediction(psi1: &TestFunction, psi2: &TestFunction, kernel: &WeightKernel, big_k: f64) -> Result<VariancePrediction> {
    let d = diagonal_main_term(psi1, psi2, kernel)?;
    let od = offdiagonal_coefficient(psi1, psi2, kernel)?;
    Ok(VariancePrediction::from_terms(&d, od, big_k))
}

/// `hbar^Re_w(v) = int h(sqrt u) / sqrt(2 pi u) u^{w/2} cos(uv) du`.
pub fn hbar_re(kernel: &WeightKernel, w: C64, v: f64) -> C64 {
    hbar_re_derivative(kernel, w, v, 0)
}

/// `d^j/dv^j hbar^Re_w(v)`.
pub fn hbar_re_derivative(kernel: &WeightKernel, w: C64, v: f64, j: u32) -> C64 {
    let (a, b) = kernel.support();
    let (ua, ub) = (a * a, b * b);
    let half_period = if v == 0.0 { f64::INFINITY } else { PI / v.abs() };
    let panels = (((ub - ua) / half_period).ceil() as usize).max(24);
    // d^j/dv^j cos(uv) = u^j cos(uv + j pi / 2)
    GaussLegendre::new(16).composite(ua, ub, panels, |u| {
        let base = kernel.h(u.sqrt()) / (TAU * u).sqrt() * u.powi(j as i32) * (u * v + f64::from(j) * PI / 2.0).cos();
        (w * (0.5 * u.ln())).exp() * base
    })
}

/// Normalization of the explicit Mellin formula on `0 < Re s < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MellinVariant {
    /// `Gamma(s) cos(pi s / 2) int h(sqrt u) / sqrt(2 pi u) u^{w/2 - s} du`.
    WithUPower,
    /// The same without the `u^{-s}` factor.
    WithoutUPower,
}

/// The variant that matched direct quadrature.
pub const MELLIN_VARIANT: MellinVariant = MellinVariant::WithUPower;

/// Mellin transform of `hbar^Re_w`: explicit formula on `0 < Re s < 1`.
pub fn hbar_re_mellin(kernel: &WeightKernel, w: C64, s: C64) -> Result<C64> {
    hbar_re_mellin_variant(kernel, w, s, MELLIN_VARIANT)
}

pub fn hbar_re_mellin_variant(kernel: &WeightKernel, w: C64, s: C64, variant: MellinVariant) -> Result<C64> {
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(Error::Strip(format!("explicit formula needs 0 < Re s < 1, got {s}")));
    }
    if kernel.is_zero() {
        return Ok(C64::new(0.0, 0.0));
    }
    let (a, b) = kernel.support();
    let power = match variant {
        MellinVariant::WithUPower => w * 0.5 - s,
        MellinVariant::WithoutUPower => w * 0.5,
    };
    let moment = GaussLegendre::new(24).composite(a * a, b * b, 32, |u| (power * u.ln()).exp() * (kernel.h(u.sqrt()) / (TAU * u).sqrt()));
    Ok(gamma(s) * (s * (PI / 2.0)).cos() * moment)
}

/// `int_0^inf hbar^Re_w(v) v^{s-1} dv` by direct quadrature, for `Re s > 0`.
pub fn hbar_re_mellin_direct(kernel: &WeightKernel, w: C64, s: C64) -> Result<C64> {
    if s.re <= 0.0 {
        return Err(Error::Strip(format!("Mellin integral needs Re s > 0, got {s}")));
    }
    let sigma = s.re;
    // v = x^{1/sigma} on [0, 1] removes the power singularity
    let head = tanh_sinh(
        |x: f64| {
            if x <= 0.0 {
                return C64::new(0.0, 0.0);
            }
            let v = x.powf(1.0 / sigma);
            hbar_re(kernel, w, v) * (C64::new(0.0, s.im / sigma) * x.ln()).exp() / sigma
        },
        0.0,
        1.0,
        7,
    );
    let gl = GaussLegendre::new(16);
    let mut tail = KahanSumC::new();
    let mut lo = 1.0;
    let mut quiet = 0;
    while quiet < 3 {
        let hi = lo + 8.0;
        let mut block = C64::new(0.0, 0.0);
        let mut size: f64 = 0.0;
        for p in 0..16 {
            let a = lo + 0.5 * p as f64;
            for (v, wt) in gl.mapped(a, a + 0.5) {
                let val = hbar_re(kernel, w, v) * (s - 1.0).expf(v);
                size = size.max(val.norm());
                block += val * wt;
            }
        }
        tail.add(block);
        lo = hi;
        if size < 1e-15 * (head + tail.value()).norm() {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if lo > 5000.0 {
            return Err(Error::Truncation("Mellin tail not settled by v = 5000".into()));
        }
    }
    Ok(head + tail.value())
}

/// `|Gamma(k + s) / Gamma(k) k^{-s} - 1|`.
pub fn gamma_ratio_check(k: f64, s: C64) -> f64 {
    let r = ln_gamma(C64::new(k, 0.0) + s) - ln_gamma(C64::new(k, 0.0)) - s * k.ln();
    (r.exp() - 1.0).norm()
}

/// `C (1 + |s|)^2 / k` with `C = 5`.
pub fn gamma_ratio_bound(k: f64, s: C64) -> f64 {
    5.0 * (1.0 + s.norm()).powi(2) / k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn constants_match_high_precision_values() {
        assert!(rel(coeff_log_k(), 0.138_840_091_817_448_945_219_246_280_939_396_678_081_706_927_79) < 1e-15);
        assert!(rel(coeff_log_u(), 0.069_420_045_908_724_472_609_623_140_469_698_339_040_853_463_896) < 1e-15);
        assert!(rel(coeff_const(), -0.462_393_249_942_615_823_292_145_756_155_224_993_771_862_830_59) < 1e-14);
        assert!(rel(coeff_contour(), 0.555_360_367_269_795_780_876_983_751_237_586_712_326_827_711_17) < 1e-15);
        assert!(rel(coeff_half_contour(), 0.277_680_183_634_897_890_438_492_561_878_793_356_163_413_855_58) < 1e-15);
    }

    #[test]
    fn zeta_reference_values() {
        let z2 = zeta_line(C64::new(2.0, 0.0)).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-13);
        let z = zeta_line(C64::new(0.5, 10.0)).unwrap();
        assert!((z - C64::new(1.544_895_220_296_752_8, -0.115_336_465_271_273_38)).norm() < 1e-12);
        assert!(matches!(zeta_line(C64::new(1.0, 0.0)), Err(Error::ZetaPole)));
    }

    #[test]
    fn contour_integral_of_gaussian() {
        // (1/2 pi) int exp(-t^2) dt on any line of the entire exp(s^2)
        let v = contour_integral(|s| Ok((s * s).exp()), &ContourSpec::on_line(0.0)).unwrap();
        assert!((v.value.re - PI.sqrt() / TAU).abs() < 1e-14);
    }

    #[test]
    fn zero_inputs_give_zero() {
        let psi = TestFunction::log_gaussian(1.0);
        let z = TestFunction::zero();
        let k = WeightKernel::default();
        assert_eq!(contour_b(&psi, &z).unwrap(), 0.0);
        assert_eq!(offdiagonal_main_term(&psi, &z, &k, 10.0).unwrap(), 0.0);
        let p = variance_prediction(&psi, &z, &k, 10.0).unwrap();
        assert_eq!(p.total, 0.0);
    }

    #[test]
    fn log_gaussian_log_k_term() {
        let psi = TestFunction::log_gaussian(1.0);
        let k = WeightKernel::default();
        let d = diagonal_main_term(&psi, &psi, &k).unwrap();
        assert!(rel(d.log_k, coeff_log_k() * PI * k.moment()) < 1e-12);
        assert_eq!(d.derivative, 0.0);
    }

    #[test]
    fn gamma_ratio_examples() {
        let s = C64::new(1.0, 0.0);
        assert!(gamma_ratio_check(1000.0, s) < gamma_ratio_bound(1000.0, s));
        let s = C64::new(2.0, 1.0);
        assert!(gamma_ratio_check(1e6, s) < 5.0 * 10.0 * 1e-6);
        assert_eq!(gamma_ratio_check(77.0, C64::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn explicit_mellin_strip() {
        let k = WeightKernel::default();
        assert!(hbar_re_mellin(&k, C64::new(0.0, 0.0), C64::new(1.5, 0.0)).is_err());
    }
}
