//! Piecewise Chebyshev interpolation of smooth functions.

use std::f64::consts::PI;

use super::quad::Integrand;

/// Interpolant on equal panels of `[a, b]`, each with `n` Chebyshev points
/// of the first kind, evaluated by the barycentric formula.
#[derive(Debug, Clone)]
pub struct PiecewiseChebyshev<T> {
    a: f64,
    width: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<Vec<T>>,
}

impl<T: Integrand> PiecewiseChebyshev<T> {
    pub fn new(a: f64, b: f64, panels: usize, n: usize, f: impl Fn(f64) -> T) -> Self {
        let width = (b - a) / panels as f64;
        let nodes: Vec<f64> = (0..n).map(|j| ((2 * j + 1) as f64 * PI / (2 * n) as f64).cos()).collect();
        let weights: Vec<f64> = (0..n)
            .map(|j| {
                let s = ((2 * j + 1) as f64 * PI / (2 * n) as f64).sin();
                if j % 2 == 0 { s } else { -s }
            })
            .collect();
        let values = (0..panels)
            .map(|p| {
                let lo = a + width * p as f64;
                nodes.iter().map(|&x| f(lo + 0.5 * width * (x + 1.0))).collect()
            })
            .collect();
        Self { a, width, nodes, weights, values }
    }

    pub fn eval(&self, t: f64) -> T {
        let p = (((t - self.a) / self.width).floor().max(0.0) as usize).min(self.values.len() - 1);
        let lo = self.a + self.width * p as f64;
        let x = 2.0 * (t - lo) / self.width - 1.0;
        let vals = &self.values[p];
        let mut num = T::zero();
        let mut den = 0.0;
        for ((&xj, &wj), &vj) in self.nodes.iter().zip(&self.weights).zip(vals) {
            let d = x - xj;
            if d == 0.0 {
                return vj;
            }
            let c = wj / d;
            num = num + vj * c;
            den += c;
        }
        num * (1.0 / den)
    }

    /// Midpoints of all panels, where the interpolant is least constrained.
    pub fn panel_midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |p| self.a + self.width * (p as f64 + 0.5))
    }
}
