use serde::{Deserialize, Serialize};

use crate::numerics::quad::GaussLegendre;
use crate::numerics::C64;

/// Test function on the positive reals, described by its shape in `u = log y`.
///
/// Every variant except a shifted log-Gaussian satisfies `psi(y) = psi(1/y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `scale * exp(-((log y - shift) / sigma)^2)`.
    LogGaussian {
        sigma: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        shift: f64,
    },
    /// Mean-zero variant `scale * (1 - 2 u^2 / sigma^2) exp(-u^2 / sigma^2)`.
    LogHermite {
        sigma: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `scale * exp(-1 / (1 - (log y / a)^2))` for `|log y| < a`.
    Bump {
        a: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Pointwise sum.
    Sum { terms: Vec<TestFunction> },
}

fn one() -> f64 {
    1.0
}

impl Default for TestFunction {
    fn default() -> Self {
        Self::Bump { a: std::f64::consts::LN_2, scale: 1.0 }
    }
}

fn bump(u: f64, a: f64) -> f64 {
    let x = u / a;
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

impl TestFunction {
    pub fn log_gaussian(sigma: f64) -> Self {
        Self::LogGaussian { sigma, scale: 1.0, shift: 0.0 }
    }

    pub fn log_hermite(sigma: f64) -> Self {
        Self::LogHermite { sigma, scale: 1.0 }
    }

    pub fn bump(a: f64) -> Self {
        Self::Bump { a, scale: 1.0 }
    }

    pub fn zero() -> Self {
        Self::Sum { terms: Vec::new() }
    }

    /// `c * psi`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Self::LogGaussian { sigma, scale, shift } => Self::LogGaussian { sigma: *sigma, scale: scale * c, shift: *shift },
            Self::LogHermite { sigma, scale } => Self::LogHermite { sigma: *sigma, scale: scale * c },
            Self::Bump { a, scale } => Self::Bump { a: *a, scale: scale * c },
            Self::Sum { terms } => Self::Sum { terms: terms.iter().map(|t| t.scaled(c)).collect() },
        }
    }

    /// `psi + other`.
    pub fn plus(&self, other: &Self) -> Self {
        Self::Sum { terms: vec![self.clone(), other.clone()] }
    }

    /// `psi(e^u)`.
    pub fn at_log(&self, u: f64) -> f64 {
        match self {
            Self::LogGaussian { sigma, scale, shift } => {
                let x = (u - shift) / sigma;
                scale * (-x * x).exp()
            }
            Self::LogHermite { sigma, scale } => {
                let x2 = (u / sigma).powi(2);
                scale * (1.0 - 2.0 * x2) * (-x2).exp()
            }
            Self::Bump { a, scale } => scale * bump(u, *a),
            Self::Sum { terms } => terms.iter().map(|t| t.at_log(u)).sum(),
        }
    }

    /// `psi(y)`.
    pub fn eval(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        self.at_log(y.ln())
    }

    pub fn is_even(&self) -> bool {
        match self {
            Self::LogGaussian { shift, .. } => *shift == 0.0,
            Self::Sum { terms } => terms.iter().all(Self::is_even),
            _ => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::LogGaussian { scale, .. } | Self::LogHermite { scale, .. } | Self::Bump { scale, .. } => *scale == 0.0,
            Self::Sum { terms } => terms.iter().all(Self::is_zero),
        }
    }

    /// Interval in `log y` outside which `|psi| < 1e-20 |scale|`.
    pub fn log_support(&self) -> (f64, f64) {
        match self {
            Self::LogGaussian { sigma, shift, .. } => (shift - 6.8 * sigma, shift + 6.8 * sigma),
            Self::LogHermite { sigma, .. } => (-7.2 * sigma, 7.2 * sigma),
            Self::Bump { a, .. } => (-a, *a),
            Self::Sum { terms } => terms
                .iter()
                .map(Self::log_support)
                .fold((0.0, 0.0), |(lo, hi), (a, b)| (f64::min(lo, a), f64::max(hi, b))),
        }
    }

    /// Whether the support is genuinely compact.
    pub fn is_compact(&self) -> bool {
        match self {
            Self::Bump { .. } => true,
            Self::Sum { terms } => terms.iter().all(Self::is_compact),
            _ => false,
        }
    }

    /// Points in `log y` where the function is not analytic.
    pub fn log_breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Bump { a, .. } => vec![-a, *a],
            Self::Sum { terms } => terms.iter().flat_map(Self::log_breakpoints).collect(),
            _ => Vec::new(),
        }
    }

    /// Number of derivatives available in closed form (smooth shapes).
    pub fn derivative_order(&self) -> u32 {
        u32::MAX
    }

    /// `psi~(s) = int_0^inf psi(1/y) y^{s-1} dy = int psi(e^{-u}) e^{su} du`.
    pub fn mellin(&self, s: C64) -> C64 {
        let pi_sqrt = std::f64::consts::PI.sqrt();
        match self {
            Self::LogGaussian { sigma, scale, shift } => {
                let g = (s * s * (sigma * sigma / 4.0)).exp() * (sigma * pi_sqrt * scale);
                g * (-s * *shift).exp()
            }
            Self::LogHermite { sigma, scale } => {
                let s2 = s * s;
                (s2 * (sigma * sigma / 4.0)).exp() * s2 * (-sigma * pi_sqrt * sigma * sigma / 2.0 * scale)
            }
            Self::Bump { a, scale } => bump_mellin(*a, s, 0) * *scale,
            Self::Sum { terms } => terms.iter().map(|t| t.mellin(s)).sum(),
        }
    }

    /// `d/ds psi~(s)`.
    pub fn mellin_derivative(&self, s: C64) -> C64 {
        match self {
            Self::LogGaussian { sigma, shift, .. } => self.mellin(s) * (s * (sigma * sigma / 2.0) - *shift),
            Self::LogHermite { sigma, scale } => {
                let pi_sqrt = std::f64::consts::PI.sqrt();
                let c = -sigma * pi_sqrt * sigma * sigma / 2.0 * scale;
                let e = (s * s * (sigma * sigma / 4.0)).exp();
                e * c * (s * 2.0 + s * s * s * (sigma * sigma / 2.0))
            }
            Self::Bump { a, scale } => bump_mellin(*a, s, 1) * *scale,
            Self::Sum { terms } => terms.iter().map(|t| t.mellin_derivative(s)).sum(),
        }
    }

    /// `int_0^inf psi(y) dy / y`.
    pub fn log_integral(&self) -> f64 {
        self.mellin(C64::new(0.0, 0.0)).re
    }
}

/// `int_{-a}^{a} u^j b(u) e^{su} du` by composite Gauss–Legendre.
fn bump_mellin(a: f64, s: C64, j: i32) -> C64 {
    let gl = GaussLegendre::new(20);
    let panels = (8.0 + 2.0 * a * s.im.abs() / std::f64::consts::PI).ceil() as usize;
    gl.composite(-a, a, panels, |u| {
        let w = bump(u, a) * u.powi(j);
        (s * u).exp() * w
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_mellin_reference_values() {
        let p = TestFunction::log_gaussian(1.0);
        assert!((p.mellin(C64::new(0.0, 0.0)).re - 1.772_453_850_905_516).abs() < 1e-14);
        assert!((p.mellin(C64::new(1.0, 0.0)).re - 2.275_875_794_468_747_5).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let gl = GaussLegendre::new(40);
        for p in [TestFunction::log_gaussian(0.7), TestFunction::log_hermite(0.9), TestFunction::LogGaussian { sigma: 0.8, scale: 1.3, shift: 0.4 }] {
            for s in [C64::new(0.3, 2.0), C64::new(-1.0, 0.5), C64::new(1.0, -3.0)] {
                let q = gl.composite(-12.0, 12.0, 48, |u| (s * u).exp() * p.at_log(-u));
                assert!((q - p.mellin(s)).norm() < 1e-12, "{p:?} {s}");
                let d = gl.composite(-12.0, 12.0, 48, |u| (s * u).exp() * (u * p.at_log(-u)));
                assert!((d - p.mellin_derivative(s)).norm() < 1e-11, "{p:?} {s}");
            }
        }
    }

    #[test]
    fn config_round_trip() {
        let p = TestFunction::bump(0.5).plus(&TestFunction::log_gaussian(1.0));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<TestFunction>(&s).unwrap(), p);
        let q: TestFunction = serde_json::from_str(r#"{"kind":"log_gaussian","sigma":1.0}"#).unwrap();
        assert_eq!(q, TestFunction::log_gaussian(1.0));
    }
}
