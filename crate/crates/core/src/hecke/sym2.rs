use std::f64::consts::PI;

use super::eigen::HeckeEigenform;
use crate::numerics::special::{ln_gamma, ln_gamma_real};
use crate::numerics::{KahanSumC, C64};
use crate::{Error, Result};

/// `L(1, sym^2 f)` from the Petersson norm of `F = sum lambda(n) n^{(k-1)/2} q^n`:
/// `2 pi^2 (4 pi)^{k-1} <F, F> / Gamma(k)`, evaluated in log space.
pub fn sym2_l1_from_norm(k: u32, norm: f64) -> f64 {
    let kf = k as f64;
    ((2.0 * PI * PI).ln() + (kf - 1.0) * (4.0 * PI).ln() + norm.ln() - ln_gamma_real(kf)).exp()
}

/// `L(s, sym^2 f)` through a smoothed approximate functional equation.
#[derive(Debug, Clone)]
pub struct Sym2LFunction {
    weight: u32,
    /// Dirichlet coefficients `A(n)`, index 0 unused.
    coeffs: Vec<f64>,
}

/// Shape of the smoothing weight `exp(w^2 / A^2)`.
const SMOOTHING: f64 = 5.0;
/// Abscissa of the inner contour.
const LINE: f64 = 1.5;
/// Trapezoid step on the inner contour.
const STEP: f64 = 0.125;

impl Sym2LFunction {
    /// Coefficients up to `nmax` from the prime eigenvalues of `f`.
    pub fn new(f: &HeckeEigenform, nmax: usize) -> Result<Self> {
        if (nmax as u64) > f.prime_bound() && crate::arith::primes_up_to(nmax as u64).last() > Some(&f.prime_bound()) {
            return Err(Error::Coverage { need: nmax as u64, have: f.prime_bound() });
        }
        let lp = |p: u64| f.lambda_primes().get(&p).copied().ok_or(Error::MissingPrime(p));
        Self::from_prime_data(f.weight(), nmax, lp)
    }

    pub fn from_prime_data(weight: u32, nmax: usize, lambda_p: impl Fn(u64) -> Result<f64>) -> Result<Self> {
        let mut coeffs = vec![0.0; nmax + 1];
        if nmax >= 1 {
            coeffs[1] = 1.0;
        }
        let mut spf = vec![0usize; nmax + 1];
        for i in 2..=nmax {
            if spf[i] == 0 {
                let mut j = i;
                while j <= nmax {
                    if spf[j] == 0 {
                        spf[j] = i;
                    }
                    j += i;
                }
            }
        }
        let mut pp_cache: std::collections::HashMap<usize, Vec<f64>> = Default::default();
        for n in 2..=nmax {
            let p = spf[n];
            let mut m = n;
            let mut e = 0usize;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if !pp_cache.contains_key(&p) {
                let l = lambda_p(p as u64)?;
                let a = l * l - 1.0;
                // local factor 1 / ((1 - a X + a X^2 - X^3))
                let mut v = vec![1.0];
                let mut q = p;
                while q <= nmax {
                    let j = v.len();
                    let t = a * v[j - 1] - if j >= 2 { a * v[j - 2] } else { 0.0 } + if j >= 3 { v[j - 3] } else { 0.0 };
                    v.push(t);
                    q = q.saturating_mul(p);
                }
                pp_cache.insert(p, v);
            }
            coeffs[n] = pp_cache[&p][e] * coeffs[m];
        }
        Ok(Self { weight, coeffs })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn coefficient(&self, n: usize) -> f64 {
        self.coeffs[n]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `log gamma(s)` for `Lambda(s) = gamma(s) L(s)`,
    /// `gamma(s) = Gamma_R(s + 1) Gamma_C(s + k - 1)`.
    pub fn ln_gamma_factor(&self, s: C64) -> C64 {
        let k = self.weight as f64;
        let a = (s + 1.0) * 0.5;
        let b = s + (k - 1.0);
        -a * PI.ln() + ln_gamma(a) + 2f64.ln() - b * (2.0 * PI).ln() + ln_gamma(b)
    }

    fn half_sum(&self, s: C64) -> Result<C64> {
        let g0 = self.ln_gamma_factor(s);
        let mut nodes = Vec::new();
        let mut wmax: f64 = 0.0;
        for j in 0i64.. {
            let mut done = true;
            for sign in [1i64, -1] {
                if j == 0 && sign == -1 {
                    continue;
                }
                let w = C64::new(LINE, (sign * j) as f64 * STEP);
                let weight = (self.ln_gamma_factor(s + w) - g0 + w * w / (SMOOTHING * SMOOTHING)).exp() / w
                    * (STEP / (2.0 * PI));
                wmax = wmax.max(weight.norm());
                if weight.norm() > 1e-20 * wmax {
                    done = false;
                }
                nodes.push((w, weight));
            }
            if done && j > 8 {
                break;
            }
            if j > 4000 {
                return Err(Error::Truncation("inner contour of the functional equation".into()));
            }
        }
        let mut acc = KahanSumC::new();
        let mut quiet = 0usize;
        let mut n = 1usize;
        loop {
            if n > self.len() {
                return Err(Error::Coverage { need: (n as u64) * 2, have: self.len() as u64 });
            }
            let ln = (n as f64).ln();
            let v: C64 = nodes.iter().map(|(w, wt)| wt * (-w * ln).exp()).sum();
            let term = v * (-s * ln).exp() * self.coeffs[n];
            acc.add(term);
            if v.norm() < 1e-15 {
                quiet += 1;
                if quiet >= 20 {
                    break;
                }
            } else {
                quiet = 0;
            }
            n += 1;
        }
        Ok(acc.value())
    }

    /// Terms needed at height `t`, a conservative estimate from the
    /// analytic conductor.
    pub fn terms_needed(weight: u32, t: f64) -> usize {
        let k = weight as f64;
        let q = (k + t.abs() + 2.0) * (t.abs() + 3.0).sqrt() / (2.0 * PI);
        (30.0 * q + 200.0) as usize
    }

    /// `L(s, sym^2 f)`.
    pub fn value(&self, s: C64) -> Result<C64> {
        let one = C64::new(1.0, 0.0);
        let direct = self.half_sum(s)?;
        let dual = self.half_sum(one - s)?;
        let ratio = (self.ln_gamma_factor(one - s) - self.ln_gamma_factor(s)).exp();
        Ok(direct + ratio * dual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::eigenforms;

    #[test]
    fn value_at_one_matches_norm() {
        let f = &eigenforms(12, 600).unwrap()[0];
        let l = Sym2LFunction::new(f, 600).unwrap();
        let v = l.value(C64::new(1.0, 0.0)).unwrap();
        assert!(v.im.abs() < 1e-12);
        assert!((v.re / f.sym2_l1() - 1.0).abs() < 1e-9, "{} vs {}", v.re, f.sym2_l1());
    }

    #[test]
    fn reflection_symmetry_on_critical_line() {
        let f = &eigenforms(16, 600).unwrap()[0];
        let l = Sym2LFunction::new(f, 600).unwrap();
        let a = l.value(C64::new(0.5, 3.0)).unwrap();
        let b = l.value(C64::new(0.5, -3.0)).unwrap();
        assert!((a - b.conj()).norm() < 1e-10);
    }
}
