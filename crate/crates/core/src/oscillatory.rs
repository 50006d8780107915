//! Stationary phase: the leading-term formula with its error budget, an
//! adaptive oscillatory quadrature used as oracle, and the off-diagonal
//! integral `I_v` with its stationary point and phase values.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::measure::TestFunction;
use crate::numerics::interp::PiecewiseChebyshev;
use crate::numerics::jet::Jet;
use crate::numerics::quad::GaussLegendre;
use crate::numerics::{e1, KahanSumC, C64};
use crate::trace::{hbar_star, StarArgs, WeightKernel};
use crate::{Error, Result};

/// Size parameters of the stationary-phase lemma for `t -> f(t) / c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseScales {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub v1: f64,
    pub q: f64,
}

impl PhaseScales {
    pub fn z(&self) -> f64 {
        self.q + self.x + self.y + self.v1 + 1.0
    }

    /// `Y >= Z^{3/20}` and `V1 >= V >= Q Z^{1/40} / Y^{1/2}`.
    pub fn admissible(&self) -> bool {
        let z = self.z();
        self.y >= z.powf(0.15) && self.v1 >= self.v && self.v >= self.q * z.powf(0.025) / self.y.sqrt()
    }

    /// `constant * Q^{3/2} X / Y^{3/2} * (V^{-2} + Y^{2/3} / Q^2)`.
    pub fn error_budget(&self, constant: f64) -> f64 {
        constant * self.q.powf(1.5) * self.x / self.y.powf(1.5) * (self.v.powi(-2) + self.y.powf(2.0 / 3.0) / (self.q * self.q))
    }

    /// `X Q / sqrt(Y) + 1`.
    pub fn trivial_bound(&self) -> f64 {
        self.x * self.q / self.y.sqrt() + 1.0
    }
}

type RealFn<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

/// `int_J amplitude(t) e(phase(t) / modulus) dt` with the data needed by
/// the leading-term route.
pub struct PhaseSpec<'a> {
    pub phase: RealFn<'a>,
    pub slope: RealFn<'a>,
    pub curvature: RealFn<'a>,
    pub amplitude: Box<dyn Fn(f64) -> C64 + 'a>,
    /// Interval containing the support of the amplitude.
    pub interval: (f64, f64),
    pub scales: PhaseScales,
    pub modulus: f64,
}

impl<'a> PhaseSpec<'a> {
    pub fn new(
        phase: impl Fn(f64) -> f64 + 'a,
        slope: impl Fn(f64) -> f64 + 'a,
        curvature: impl Fn(f64) -> f64 + 'a,
        amplitude: impl Fn(f64) -> C64 + 'a,
        interval: (f64, f64),
        scales: PhaseScales,
    ) -> Self {
        Self {
            phase: Box::new(phase),
            slope: Box::new(slope),
            curvature: Box::new(curvature),
            amplitude: Box::new(amplitude),
            interval,
            scales,
            modulus: 1.0,
        }
    }

    pub fn with_modulus(mut self, c: f64) -> Self {
        self.modulus = c;
        self
    }

    fn integrand(&self, t: f64) -> C64 {
        (self.amplitude)(t) * e1((self.phase)(t) / self.modulus)
    }
}

/// Options of [`stationary_leading_term`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingOptions {
    /// Constant in front of the error budget.
    pub constant: f64,
    /// Analytic guess for the stationary point; bisection is bracketed
    /// within 10% of it when the bracket contains a sign change.
    pub seed: Option<f64>,
    pub require_admissible: bool,
}

impl Default for LeadingOptions {
    fn default() -> Self {
        Self { constant: 10.0, seed: None, require_admissible: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingTerm {
    pub value: C64,
    pub budget: f64,
    pub t0: f64,
    pub curvature: f64,
}

const ROOT_GRID: usize = 256;

/// Unique zero of `slope` in `interval`.
pub fn stationary_point(spec: &PhaseSpec, seed: Option<f64>) -> Result<f64> {
    let (a, b) = spec.interval;
    let f = &spec.slope;
    let h = (b - a) / ROOT_GRID as f64;
    let mut changes = Vec::new();
    let mut prev = f(a);
    for i in 1..=ROOT_GRID {
        let t = a + h * i as f64;
        let cur = f(t);
        if prev == 0.0 || prev.signum() != cur.signum() {
            changes.push((t - h, t));
        }
        prev = cur;
    }
    changes.dedup_by(|x, y| x.0 == y.1);
    let (mut lo, mut hi) = match changes.len() {
        0 => return Err(Error::NoStationaryPoint),
        1 => changes[0],
        _ => return Err(Error::MultipleStationaryPoints),
    };
    if let Some(s) = seed {
        let (sl, sh) = ((0.9 * s).max(a), (1.1 * s).min(b));
        if sl < sh && f(sl).signum() != f(sh).signum() {
            (lo, hi) = (sl, sh);
        }
    }
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * mid.abs().max(1.0) {
            break;
        }
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..3 {
        let step = f(t) / (spec.curvature)(t);
        if step.is_finite() && (t - step) > a && (t - step) < b {
            t -= step;
        }
    }
    Ok(t)
}

/// `e^{sgn(f'') pi i / 4} e(f(t0) / c) sqrt(c) / sqrt|f''(t0)| h(t0)` with
/// the lemma's error budget.
pub fn stationary_leading_term(spec: &PhaseSpec, opts: LeadingOptions) -> Result<LeadingTerm> {
    if opts.require_admissible && !spec.scales.admissible() {
        return Err(Error::Window(format!("stationary-phase scales not admissible: {:?}", spec.scales)));
    }
    let t0 = stationary_point(spec, opts.seed)?;
    let curvature = (spec.curvature)(t0);
    let rot = C64::from_polar(1.0, curvature.signum() * FRAC_PI_4);
    let value = rot * e1((spec.phase)(t0) / spec.modulus) * (spec.modulus / curvature.abs()).sqrt() * (spec.amplitude)(t0);
    Ok(LeadingTerm { value, budget: spec.scales.error_budget(opts.constant), t0, curvature })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: C64,
    pub error: f64,
    pub panels: usize,
}

/// Relative node-doubling target of the direct quadrature.
pub const DIRECT_TOL: f64 = 1e-9;
/// Ceiling on the number of panels.
pub const MAX_PANELS: usize = 2_000_000;

/// Panel quadrature with at least sixteen nodes per local period; panels are
/// halved until the 16- and 32-node rules agree to [`DIRECT_TOL`].
pub fn direct_oscillatory_quadrature(spec: &PhaseSpec) -> Result<Quadrature> {
    let (a, b) = spec.interval;
    let coarse = GaussLegendre::new(16);
    let fine = GaussLegendre::new(32);
    let mut last = None;
    for level in 0..8 {
        let periods_per_panel = 1.0 / f64::from(1u32 << level);
        let max_w = (b - a) / (16.0 * f64::from(1u32 << level));
        let width_at = |t: f64| {
            let freq = (spec.slope)(t).abs() / spec.modulus;
            if freq > 0.0 {
                max_w.min(periods_per_panel / freq)
            } else {
                max_w
            }
        };
        let mut sum = KahanSumC::new();
        let mut gap = KahanSumC::new();
        let mut scale = 0.0;
        let mut t = a;
        let mut panels = 0;
        while t < b {
            let w0 = width_at(t);
            let w = w0.min(width_at((t + 0.5 * w0).min(b))).min(b - t);
            let hi = if b - (t + w) < 1e-12 * w { b } else { t + w };
            let vc = coarse.integrate(t, hi, |s| spec.integrand(s));
            let mut vf = C64::new(0.0, 0.0);
            for (s, w) in fine.mapped(t, hi) {
                let g = spec.integrand(s);
                vf += g * w;
                scale += g.norm() * w;
            }
            sum.add(vf);
            gap.add(vf - vc);
            t = hi;
            panels += 1;
            if panels > MAX_PANELS {
                return Err(Error::Quadrature(format!("period resolution needs more than {MAX_PANELS} panels")));
            }
        }
        let value = sum.value();
        let err = gap.value().norm();
        let q = Quadrature { value, error: err, panels };
        if err <= DIRECT_TOL * value.norm() || err <= 1e-15 * scale {
            return Ok(q);
        }
        last = Some(q);
    }
    let q = last.expect("at least one level");
    Err(Error::Quadrature(format!(
        "node doubling gap {:e} above tolerance with {} panels",
        q.error, q.panels
    )))
}

/// `f(x, n2, m1, m2) = 2 sqrt(x (x + m1) n2 (n2 + m2)) - 2 x n2 - x m2 - n2 m1`,
/// written without cancellation.
pub fn phase(x: f64, n2: f64, m1: f64, m2: f64) -> f64 {
    let p = x * (x + m1);
    let q = n2 * (n2 + m2);
    let s = 2.0 * x * n2 + x * m2 + n2 * m1;
    let d = x * m2 - n2 * m1;
    -d * d / (2.0 * (p * q).sqrt() + s)
}

fn phase_slope(x: f64, n2: f64, m1: f64, m2: f64) -> f64 {
    let p = x * (x + m1);
    let q = n2 * (n2 + m2);
    (m1 * m1 * q - m2 * m2 * p) / (p.sqrt() * ((2.0 * x + m1) * q.sqrt() + (2.0 * n2 + m2) * p.sqrt()))
}

fn phase_curvature(x: f64, n2: f64, m1: f64, m2: f64) -> f64 {
    let p = x * (x + m1);
    let q = n2 * (n2 + m2);
    -0.5 * m1 * m1 * (q / (p * p * p)).sqrt()
}

const JET_ORDER: usize = 12;

/// `d^order f / dx^order`: closed forms through order two, Taylor arithmetic above.
pub fn phase_derivatives(x: f64, n2: f64, m1: f64, m2: f64, order: usize) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Window(format!("x = {x} must be positive")));
    }
    match order {
        0 => Ok(phase(x, n2, m1, m2)),
        1 => Ok(phase_slope(x, n2, m1, m2)),
        2 => Ok(phase_curvature(x, n2, m1, m2)),
        j if j < JET_ORDER => {
            let t = Jet::<JET_ORDER>::variable(x);
            let root = (t * (t + m1)).scale(n2 * (n2 + m2)).sqrt().scale(2.0);
            let f = root - t.scale(2.0 * n2 + m2) + (-n2 * m1);
            Ok(f.derivative(j))
        }
        j => Err(Error::Window(format!("derivative order {j} above {}", JET_ORDER - 1))),
    }
}

/// Test functions and weight kernel entering `hbar*`.
#[derive(Debug, Clone)]
pub struct IvKernels {
    pub kernel: WeightKernel,
    pub psi1: TestFunction,
    pub psi2: TestFunction,
}

impl Default for IvKernels {
    /// Log-Gaussians centred at `y = e^{-1.4}`, which puts `n_i` near `K`
    /// and keeps `m_i / n_i` small.
    fn default() -> Self {
        let psi = TestFunction::LogGaussian { sigma: 0.3, scale: 1.0, shift: -1.4 };
        Self { kernel: WeightKernel::default(), psi1: psi.clone(), psi2: psi }
    }
}

/// One term `I_v(n2, m1, m2, d1, d2, c)` with the residue `a1` of `n1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffDiagonalPoint {
    pub n2: u64,
    pub m1: u64,
    pub m2: u64,
    pub d1: u64,
    pub d2: u64,
    pub c: u64,
    pub a1: u64,
    pub v: i64,
    pub big_k: f64,
}

impl OffDiagonalPoint {
    fn reals(&self) -> (f64, f64, f64, f64) {
        (self.n2 as f64, self.m1 as f64, self.m2 as f64, self.v as f64)
    }

    /// `(v + m2)^2 + 4 v n2`.
    pub fn discriminant(&self) -> f64 {
        let (n2, _, m2, v) = self.reals();
        (v + m2) * (v + m2) + 4.0 * v * n2
    }

    fn root_discriminant(&self) -> Result<f64> {
        let d = self.discriminant();
        if d <= 0.0 {
            return Err(Error::Window(format!("(v + m2)^2 + 4 v n2 = {d} is not positive")));
        }
        Ok(d.sqrt())
    }

    /// `x_v* = (m1 / 2) (-1 + (v + m2 + 2 n2) / sqrt(D))`.
    pub fn stationary_point(&self) -> Result<f64> {
        let (n2, m1, m2, v) = self.reals();
        let r = self.root_discriminant()?;
        let x = 0.5 * m1 * (v + m2 + 2.0 * n2 - r) / r;
        if x <= 0.0 {
            return Err(Error::Window(format!("stationary point {x} not positive")));
        }
        Ok(x)
    }

    /// `f''(x_v*) = -D^{3/2} / (2 m1 n2 (m2 + n2))`.
    pub fn curvature_at_stationary(&self) -> Result<f64> {
        let (n2, m1, m2, _) = self.reals();
        Ok(-self.discriminant().powf(1.5) / (2.0 * m1 * n2 * (m2 + n2)))
    }

    /// `a1 v + (m1 / 2) (v + m2 - sqrt(D))`, the phase at `x_v*` before division by `c`.
    pub fn phase_at_stationary(&self) -> Result<f64> {
        let (_, m1, m2, v) = self.reals();
        let r = self.root_discriminant()?;
        // v + m2 - sqrt(D) = -4 v n2 / (v + m2 + sqrt(D)) when v + m2 > 0
        let tail = if v + m2 > 0.0 { -4.0 * v * self.n2 as f64 / (v + m2 + r) } else { v + m2 - r };
        Ok(self.a1 as f64 * v + 0.5 * m1 * tail)
    }

    /// `|f'(x_v*) - v|` relative to the size of the two terms of `f'`.
    pub fn stationary_residual(&self) -> Result<f64> {
        let (n2, m1, m2, v) = self.reals();
        let x = self.stationary_point()?;
        let p = x * (x + m1);
        let q = n2 * (n2 + m2);
        let denom = p.sqrt() * ((2.0 * x + m1) * q.sqrt() + (2.0 * n2 + m2) * p.sqrt());
        let size = (m1 * m1 * q + m2 * m2 * p) / denom;
        Ok((phase_slope(x, n2, m1, m2) - v).abs() / size.max(v.abs()))
    }

    /// Arguments of `hbar*` with `n1` replaced by `x`.
    pub fn star_args(&self, x: f64) -> StarArgs {
        StarArgs {
            d1: self.d1,
            d2: self.d2,
            n1: x,
            n2: self.n2 as f64,
            m1: self.m1 as f64,
            m2: self.m2 as f64,
            c: self.c,
            big_k: self.big_k,
        }
    }

    /// Window conditions evaluated at `n1 = x_v*`.
    pub fn window_check(&self) -> Result<()> {
        self.star_args(self.stationary_point()?).window_check()
    }

    /// `m1 / x_v* + m2 / n2`, the size of the simplification made in the leading formula.
    pub fn shift_ratio(&self) -> Result<f64> {
        Ok(self.m1 as f64 / self.stationary_point()? + self.m2 as f64 / self.n2 as f64)
    }

    /// Range of `x` on which `psi1` of the `hbar*` integrand can be non-zero.
    pub fn x_support(&self, kernels: &IvKernels) -> (f64, f64) {
        let (t0, t1) = kernels.kernel.support();
        let (lo, hi) = kernels.psi1.log_support();
        let scale = self.big_k / (TAU * self.d1 as f64);
        let m1 = self.m1 as f64;
        ((t0 * scale * (-hi).exp() - m1).max(1e-9), t1 * scale * (-lo).exp() - m1)
    }
}

/// `e_c(a1 v + (m1/2)(v + m2 - sqrt(D))) e^{-pi i/4} sqrt(c) /
/// (d1 d2 sqrt|f''(x_v*)| x_v*^{3/2} n2^{3/2}) hbar*(c K^2 / (8 pi n2 x_v*))`.
pub fn i_v_leading(point: &OffDiagonalPoint, kernels: &IvKernels) -> Result<C64> {
    point.window_check()?;
    i_v_leading_unchecked(point, kernels)
}

/// [`i_v_leading`] without the window check, for diagnostics.
pub fn i_v_leading_unchecked(point: &OffDiagonalPoint, kernels: &IvKernels) -> Result<C64> {
    let x = point.stationary_point()?;
    let f2 = point.curvature_at_stationary()?;
    let c = point.c as f64;
    let n2 = point.n2 as f64;
    let freq = c * point.big_k * point.big_k / (8.0 * PI * n2 * x);
    let star = hbar_star(&kernels.kernel, &kernels.psi1, &kernels.psi2, &point.star_args(x), freq);
    let phase = e1(point.phase_at_stationary()? / c) * C64::from_polar(1.0, -FRAC_PI_4);
    let size = c.sqrt() / (f2.abs().sqrt() * x.powf(1.5) * n2.powf(1.5) * (point.d1 * point.d2) as f64);
    Ok(phase * size * star)
}

/// Amplitude of the defining integral of `I_v` at `x`.
fn i_v_amplitude(point: &OffDiagonalPoint, kernels: &IvKernels, x: f64) -> C64 {
    let args = point.star_args(x);
    let pq = x * (x + args.m1) * args.n2 * (args.n2 + args.m2);
    let star = hbar_star(&kernels.kernel, &kernels.psi1, &kernels.psi2, &args, args.frequency());
    star / ((point.d1 * point.d2) as f64 * pq.powf(0.75))
}

/// The defining integral of `I_v` as a [`PhaseSpec`] with phase `f(x) - v (x - a1)`.
pub fn i_v_spec<'a>(point: &'a OffDiagonalPoint, amplitude: impl Fn(f64) -> C64 + 'a, interval: (f64, f64)) -> PhaseSpec<'a> {
    let (n2, m1, m2, v) = point.reals();
    let a1 = point.a1 as f64;
    let k = point.big_k;
    let d1 = point.d1 as f64;
    // f'' ~ m1^2 n2 / x^3, x ~ K / d1, amplitude derivatives ~ K^eps / x
    let x_scale = k / d1;
    let amp = (d1 / x_scale).powf(1.5) / n2.powf(1.5) * k;
    let scales = PhaseScales {
        x: amp,
        y: m1 * m1 * n2 * d1 / (point.c as f64 * k),
        v: x_scale / k.powf(crate::trace::WINDOW_EPS),
        v1: x_scale / k.powf(crate::trace::WINDOW_EPS),
        q: x_scale,
    };
    PhaseSpec::new(
        move |x| phase(x, n2, m1, m2) - v * (x - a1),
        move |x| phase_slope(x, n2, m1, m2) - v,
        move |x| phase_curvature(x, n2, m1, m2),
        amplitude,
        interval,
        scales,
    )
    .with_modulus(point.c as f64)
}

/// Panels and nodes of the amplitude interpolant used by [`i_v_direct`].
pub const AMPLITUDE_PANELS: usize = 64;
pub const AMPLITUDE_NODES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvDirect {
    pub quadrature: Quadrature,
    /// Largest interpolation gap at panel midpoints relative to the peak amplitude.
    pub amplitude_error: f64,
}

/// Direct quadrature of the defining integral of `I_v`. The slowly varying
/// amplitude is replaced by a piecewise Chebyshev interpolant; the phase is
/// evaluated exactly at every node.
pub fn i_v_direct(point: &OffDiagonalPoint, kernels: &IvKernels) -> Result<IvDirect> {
    let (a, b) = point.x_support(kernels);
    let amp = |x: f64| i_v_amplitude(point, kernels, x);
    let interp = PiecewiseChebyshev::new(a, b, AMPLITUDE_PANELS, AMPLITUDE_NODES, amp);
    let mut peak: f64 = 0.0;
    let mut gap: f64 = 0.0;
    for x in interp.panel_midpoints() {
        let exact = amp(x);
        peak = peak.max(exact.norm());
        gap = gap.max((interp.eval(x) - exact).norm());
    }
    let spec = i_v_spec(point, |x| interp.eval(x), (a, b));
    let quadrature = direct_oscillatory_quadrature(&spec)?;
    Ok(IvDirect { quadrature, amplitude_error: if peak > 0.0 { gap / peak } else { 0.0 } })
}

/// Sampling ranges for [`sample_points`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Range of `n2 / K` and of the target `x_v* / K`.
    pub n_range: (f64, f64),
    /// Largest `|v|`.
    pub v_max: i64,
    /// Ceiling on `m1 / x_v* + m2 / n2`.
    pub max_shift_ratio: f64,
    /// Ceiling on the stationary width `sqrt(c / |f''|)` relative to `x_v*`.
    pub max_width_ratio: f64,
    /// Largest modulus.
    pub c_max: u64,
    /// Largest distance of the test-function arguments at `x_v*` from the
    /// centre of their log-support, as a fraction of the half-width.
    pub centrality: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { n_range: (0.5, 1.6), v_max: 2, max_shift_ratio: 0.07, max_width_ratio: 0.1, c_max: 1, centrality: 0.5 }
    }
}

/// Seeded draw of window-admissible points with the stationary point inside
/// the bulk of the amplitude.
pub fn sample_points(big_k: f64, count: usize, seed: u64, kernels: &IvKernels, cfg: &SamplerConfig) -> Result<Vec<OffDiagonalPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let (lo, hi) = cfg.n_range;
    let m_top = big_k.powf(0.5 + crate::trace::WINDOW_EPS);
    let d_max = (big_k.powf(1.0 / 32.0).floor() as u64).max(1);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 10_000 * count.max(1) {
            return Err(Error::Config(format!("sampler found only {} of {count} points", out.len())));
        }
        let c = rng.gen_range(1..=cfg.c_max);
        let d1 = rng.gen_range(1..=d_max);
        let d2 = rng.gen_range(1..=d_max);
        let n2 = (rng.gen_range(lo..hi) * big_k / d2 as f64).round() as u64;
        let x_target = rng.gen_range(lo..hi) * big_k / d1 as f64;
        let v = rng.gen_range(-cfg.v_max..=cfg.v_max);
        let m2 = rng.gen_range(1..=m_top as u64);
        let mut p = OffDiagonalPoint { n2, m1: 1, m2, d1, d2, c, a1: rng.gen_range(0..c), v, big_k };
        let Ok(r) = p.root_discriminant() else { continue };
        let m1 = (x_target * r / n2 as f64).round();
        if m1 < 1.0 || m1 > m_top {
            continue;
        }
        p.m1 = m1 as u64;
        let Ok(x) = p.stationary_point() else { continue };
        if p.window_check().is_err() || p.shift_ratio()? > cfg.max_shift_ratio {
            continue;
        }
        let width = (c as f64 / p.curvature_at_stationary()?.abs()).sqrt();
        if width > cfg.max_width_ratio * x {
            continue;
        }
        // keep the stationary point inside the bulk of both test functions
        let u_mid = 0.5 * (kernels.kernel.support().0 + kernels.kernel.support().1);
        let central = |psi: &TestFunction, n: f64, m: u64, d: u64| {
            let y = (u_mid * big_k / (TAU * d as f64 * (n + m as f64))).ln();
            let (lo, hi) = psi.log_support();
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            (y - mid).abs() <= cfg.centrality * half
        };
        if !central(&kernels.psi1, x, p.m1, d1) || !central(&kernels.psi2, n2 as f64, m2, d2) {
            continue;
        }
        out.push(p);
    }
    Ok(out)
}

/// Leading term against direct quadrature at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseComparison {
    pub point: OffDiagonalPoint,
    pub stationary_point: f64,
    /// `|f'(x*)|` relative to the size of the terms in `f'`.
    pub stationary_residual: f64,
    pub leading: C64,
    pub direct: C64,
    pub direct_error: f64,
    pub relative_error: f64,
}

/// Sample `count` points and compare both evaluations at each.
pub fn compare_sampled(big_k: f64, count: usize, seed: u64, kernels: &IvKernels, cfg: &SamplerConfig) -> Result<Vec<PhaseComparison>> {
    sample_points(big_k, count, seed, kernels, cfg)?
        .iter()
        .map(|p| {
            let leading = i_v_leading(p, kernels)?;
            let d = i_v_direct(p, kernels)?;
            let direct = d.quadrature.value;
            Ok(PhaseComparison {
                point: *p,
                stationary_point: p.stationary_point()?,
                stationary_residual: p.stationary_residual()?,
                leading,
                direct,
                direct_error: d.quadrature.error,
                relative_error: (leading - direct).norm() / direct.norm(),
            })
        })
        .collect()
}
