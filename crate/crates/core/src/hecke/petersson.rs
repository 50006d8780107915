use std::f64::consts::{PI, TAU};

use super::qexp::QExpansion;
use crate::numerics::quad::GaussLegendre;
use crate::numerics::{KahanSum, C64};
use crate::{Error, Result};

/// Quadrature layout for the Petersson norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeterssonOptions {
    /// Gauss–Legendre panels across `0 <= x <= 1/2`.
    pub x_panels: usize,
    /// Nodes per panel in both directions.
    pub nodes: usize,
    /// Width of the `y` panels above the arc.
    pub y_panel_width: f64,
    /// Truncation depth in nats below the peak of the integrand.
    pub drop_nats: f64,
}

impl Default for PeterssonOptions {
    fn default() -> Self {
        Self { x_panels: 4, nodes: 24, y_panel_width: 0.1, drop_nats: 45.0 }
    }
}

impl PeterssonOptions {
    /// Same layout with twice the nodes per panel.
    pub fn doubled(self) -> Self {
        Self { nodes: 2 * self.nodes, ..self }
    }
}

const Y_MIN: f64 = 0.866_025_403_784_438_6;

fn ln_weight(k: u32, n: f64, y: f64) -> f64 {
    (k as f64 - 1.0) * n.ln() + 2.0 * (n + 1.0).ln() - 4.0 * PI * n * y
}

/// Number of Fourier terms needed for the Petersson integral of weight `k`.
pub fn petersson_terms(k: u32) -> usize {
    terms_for(k, PeterssonOptions::default().drop_nats)
}

fn terms_for(k: u32, drop: f64) -> usize {
    let peak = (1..200).map(|n| ln_weight(k, n as f64, Y_MIN)).fold(f64::NEG_INFINITY, f64::max);
    let nstar = ((k as f64 - 1.0) / (4.0 * PI * Y_MIN)).ceil() as usize;
    let mut n = nstar.max(1);
    while ln_weight(k, n as f64, Y_MIN) > peak - drop {
        n += 1;
    }
    n
}

/// Upper end of the `y` range: `y^{k-2} e^{-4 pi y}` has dropped `drop` nats.
fn y_max(k: u32, drop: f64) -> f64 {
    let g = |y: f64| (k as f64 - 2.0) * y.ln() - 4.0 * PI * y;
    let ystar = ((k as f64 - 2.0) / (4.0 * PI)).max(1.0);
    let mut y = ystar;
    while g(y) > g(ystar) - drop {
        y += 0.1;
    }
    y
}

/// Scaled Fourier terms `lambda(n) n^{(k-1)/2} e^{-2 pi n y} y^{(k-2)/2}`, so
/// that `|sum_n t_n e(nx)|^2` is the Petersson integrand.
fn scaled_terms(k: u32, lambda: &[f64], m: usize, y: f64, out: &mut [f64]) {
    let half = (k as f64 - 1.0) / 2.0;
    let ly = (k as f64 - 2.0) / 2.0 * y.ln();
    for n in 1..=m {
        let nf = n as f64;
        out[n] = lambda[n] * (half * nf.ln() - TAU * nf * y + ly).exp();
    }
}

fn integrand(terms: &[f64], phases: &[C64]) -> f64 {
    let mut s = C64::new(0.0, 0.0);
    for (t, e) in terms.iter().zip(phases).skip(1) {
        s += e * *t;
    }
    s.norm_sqr()
}

fn phase_table(x: f64, m: usize) -> Vec<C64> {
    (0..=m).map(|n| C64::from_polar(1.0, TAU * n as f64 * x)).collect()
}

fn check_coverage(k: u32, lambda: &[f64], drop: f64) -> Result<usize> {
    let m = terms_for(k, drop);
    if lambda.len() <= m {
        return Err(Error::Unattainable((-drop).exp()));
    }
    Ok(m)
}

/// `<F, F>` for `F = sum lambda(n) n^{(k-1)/2} q^n` by two-dimensional
/// quadrature over the fundamental domain, cut at `y <= Y_max`.
///
/// `lambda[n]` holds the normalised coefficient of `q^n`; index 0 is ignored.
pub fn petersson_norm(k: u32, lambda: &[f64], opts: PeterssonOptions) -> Result<f64> {
    let m = check_coverage(k, lambda, opts.drop_nats)?;
    let ymax = y_max(k, opts.drop_nats);
    let gl = GaussLegendre::new(opts.nodes);
    let mut terms = vec![0.0; m + 1];
    let mut acc = KahanSum::new();
    for p in 0..opts.x_panels {
        let a = 0.5 * p as f64 / opts.x_panels as f64;
        let b = 0.5 * (p + 1) as f64 / opts.x_panels as f64;
        for (x, wx) in gl.mapped(a, b) {
            let ph = phase_table(x, m);
            // arc region sqrt(1 - x^2) <= y <= 1
            let y0 = (1.0 - x * x).sqrt();
            let mut inner = KahanSum::new();
            for (y, wy) in gl.mapped(y0, 1.0) {
                scaled_terms(k, lambda, m, y, &mut terms);
                inner.add(wy * integrand(&terms, &ph));
            }
            acc.add(wx * inner.value());
        }
    }
    let panels = ((ymax - 1.0) / opts.y_panel_width).ceil() as usize;
    let xs: Vec<(f64, f64)> = (0..opts.x_panels)
        .flat_map(|p| {
            let a = 0.5 * p as f64 / opts.x_panels as f64;
            let b = 0.5 * (p + 1) as f64 / opts.x_panels as f64;
            gl.mapped(a, b).collect::<Vec<_>>()
        })
        .collect();
    let phases: Vec<Vec<C64>> = xs.iter().map(|&(x, _)| phase_table(x, m)).collect();
    for p in 0..panels {
        let a = 1.0 + p as f64 * opts.y_panel_width;
        let b = a + opts.y_panel_width;
        for (y, wy) in gl.mapped(a, b) {
            scaled_terms(k, lambda, m, y, &mut terms);
            let mut inner = KahanSum::new();
            for ((_, wx), ph) in xs.iter().zip(&phases) {
                inner.add(wx * integrand(&terms, ph));
            }
            acc.add(wy * inner.value());
        }
    }
    Ok(2.0 * acc.value())
}

/// Same integral with the `x` direction done exactly for `y >= 1` (Parseval)
/// and an adaptive `y` rule; used as an independent check.
pub fn petersson_norm_hybrid(k: u32, lambda: &[f64], opts: PeterssonOptions) -> Result<f64> {
    let m = check_coverage(k, lambda, opts.drop_nats)?;
    let ymax = y_max(k, opts.drop_nats);
    let half = (k as f64 - 1.0) / 2.0;
    let upper = crate::numerics::quad::adaptive(
        |y: f64| {
            (1..=m)
                .map(|n| {
                    let nf = n as f64;
                    let t = lambda[n] * (half * nf.ln() - TAU * nf * y).exp();
                    t * t * y.powi(k as i32 - 2)
                })
                .collect::<KahanSum>()
                .value()
        },
        1.0,
        ymax,
        0.0,
        1e-14,
    )?;
    let gl = GaussLegendre::new(opts.nodes + 8);
    let mut terms = vec![0.0; m + 1];
    let mut lower = KahanSum::new();
    for p in 0..2 * opts.x_panels {
        let a = 0.25 * p as f64 / opts.x_panels as f64;
        let b = 0.25 * (p + 1) as f64 / opts.x_panels as f64;
        for (x, wx) in gl.mapped(a, b) {
            let ph = phase_table(x, m);
            let y0 = (1.0 - x * x).sqrt();
            let mid = 0.5 * (y0 + 1.0);
            let mut inner = KahanSum::new();
            for (lo, hi) in [(y0, mid), (mid, 1.0)] {
                for (y, wy) in gl.mapped(lo, hi) {
                    scaled_terms(k, lambda, m, y, &mut terms);
                    inner.add(wy * integrand(&terms, &ph));
                }
            }
            lower.add(wx * inner.value());
        }
    }
    Ok(upper + 2.0 * lower.value())
}

impl QExpansion {
    /// `<f, f>` of this (cusp form) expansion.
    pub fn petersson_norm(&self, opts: PeterssonOptions) -> Result<f64> {
        petersson_norm(self.weight(), &self.normalized_coefficients(), opts)
    }
}
