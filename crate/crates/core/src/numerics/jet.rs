//! Truncated Taylor arithmetic for exact higher derivatives of closed forms.
//!
//! A `Jet<N>` stores `c_0 .. c_{N-1}` of `f(x0 + t) = sum c_j t^j`.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const N: usize>(pub [f64; N]);

impl<const N: usize> Jet<N> {
    pub fn constant(c: f64) -> Self {
        let mut a = [0.0; N];
        a[0] = c;
        Jet(a)
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut a = [0.0; N];
        a[0] = x0;
        if N > 1 {
            a[1] = 1.0;
        }
        Jet(a)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `j`-th derivative at the expansion point.
    pub fn derivative(&self, j: usize) -> f64 {
        let fact: f64 = (1..=j).map(|i| i as f64).product();
        self.0[j] * fact
    }

    pub fn recip(self) -> Self {
        let a = self.0;
        let mut r = [0.0; N];
        r[0] = 1.0 / a[0];
        for n in 1..N {
            let s: f64 = (1..=n).map(|k| a[k] * r[n - k]).sum();
            r[n] = -s / a[0];
        }
        Jet(r)
    }

    pub fn sqrt(self) -> Self {
        let a = self.0;
        let mut r = [0.0; N];
        r[0] = a[0].sqrt();
        for n in 1..N {
            let s: f64 = (1..n).map(|k| r[k] * r[n - k]).sum();
            r[n] = (a[n] - s) / (2.0 * r[0]);
        }
        Jet(r)
    }

    pub fn scale(self, c: f64) -> Self {
        Jet(self.0.map(|x| x * c))
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = self.0;
        r.iter_mut().zip(o.0).for_each(|(x, y)| *x += y);
        Jet(r)
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut r = self.0;
        r.iter_mut().zip(o.0).for_each(|(x, y)| *x -= y);
        Jet(r)
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet(self.0.map(|x| -x))
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut r = [0.0; N];
        for i in 0..N {
            for j in 0..N - i {
                r[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(r)
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    fn add(mut self, c: f64) -> Self {
        self.0[0] += c;
        self
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        self.scale(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_sqrt_rational() {
        // g(x) = sqrt(x) / (1 + x) at x = 2
        let x = Jet::<4>::variable(2.0);
        let g = x.sqrt() / (x + 1.0);
        let h = 1e-3;
        let f = |x: f64| x.sqrt() / (1.0 + x);
        let fd2 = (f(2.0 + h) - 2.0 * f(2.0) + f(2.0 - h)) / (h * h);
        assert!((g.derivative(2) - fd2).abs() < 1e-6);
        assert!((g.value() - f(2.0)).abs() < 1e-15);
    }
}
