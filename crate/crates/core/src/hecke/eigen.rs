use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::petersson::{petersson_norm, petersson_terms, PeterssonOptions};
use super::poly::{det, gcd_with_derivative_degree, isolate_real_roots, minor, ratio_to_f64, refine_root, IntPoly};
use super::qexp::QExpansion;
use super::series::{cusp_dimension, echelon_basis};
use super::sym2::sym2_l1_from_norm;
use crate::arith::{factorize, primes_up_to};
use crate::{Error, Result};

/// Exact echelon basis of `S_k` to a fixed truncation.
#[derive(Debug, Clone)]
pub struct HeckeSpace {
    weight: u32,
    basis: Vec<Vec<BigInt>>,
}

impl HeckeSpace {
    pub fn new(weight: u32, truncation: usize) -> Result<Self> {
        if weight % 2 == 1 || weight < 4 {
            return Err(Error::InvalidWeight(weight));
        }
        let d = cusp_dimension(weight);
        if truncation < d {
            return Err(Error::TruncationTooSmall { got: truncation, need: d });
        }
        Ok(Self { weight, basis: echelon_basis(weight, truncation) })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn truncation(&self) -> usize {
        self.basis.first().map_or(0, |b| b.len() - 1)
    }

    pub fn basis(&self) -> Vec<QExpansion> {
        self.basis
            .iter()
            .map(|b| QExpansion::from_integers(self.weight, b.clone()).expect("valid weight"))
            .collect()
    }

    /// Matrix of `T_p` in the echelon basis: column `j` holds the coordinates
    /// of `T_p b_j`, read off at `q^1 .. q^dim`.
    pub fn hecke_matrix(&self, p: u64) -> Result<Vec<Vec<BigInt>>> {
        let d = self.dimension();
        let p = p as usize;
        if p * d > self.truncation() {
            return Err(Error::TruncationTooSmall { got: self.truncation(), need: p * d });
        }
        let pk = BigInt::from(p).pow(self.weight - 1);
        let mut m = vec![vec![BigInt::zero(); d]; d];
        for (j, b) in self.basis.iter().enumerate() {
            for (i, row) in m.iter_mut().enumerate() {
                let n = i + 1;
                let mut v = b[p * n].clone();
                if n % p == 0 {
                    v += &pk * &b[n / p];
                }
                row[j] = v;
            }
        }
        Ok(m)
    }

    /// Characteristic polynomial `det(X I - T_p)`.
    pub fn charpoly(&self, p: u64) -> Result<IntPoly> {
        let m = self.hecke_matrix(p)?;
        let c = char_matrix(&m);
        let d = det(&c);
        Ok(if m.len() % 2 == 1 { d.neg() } else { d })
    }

    /// Diagonalise `T_2` and attach normalised eigenvalues at all primes up
    /// to the truncation.
    pub fn eigenforms(&self) -> Result<Vec<HeckeEigenform>> {
        let d = self.dimension();
        if d == 0 {
            return Ok(Vec::new());
        }
        let k = self.weight;
        if self.truncation() < 2 * d + 2 {
            return Err(Error::TruncationTooSmall { got: self.truncation(), need: 2 * d + 2 });
        }
        let m = self.hecke_matrix(2)?;
        let c = char_matrix(&m);
        let chi = det(&c);
        if gcd_with_derivative_degree(&chi) > 0 {
            return Err(Error::RepeatedEigenvalue(k));
        }
        let roots = isolate_real_roots(&chi);
        if roots.len() != d {
            return Err(Error::RepeatedEigenvalue(k));
        }
        let n = self.truncation();
        let bits = precision_bits(k, n, d);
        let primes = primes_up_to(n as u64);
        let mut out = Vec::with_capacity(d);
        for (lo, hi) in &roots {
            let a = refine_root(&chi, lo, hi, bits);
            // eigenvector: a column of adj(M - alpha I), scaled so x_1 = 1
            let col_entries: Vec<Vec<IntPoly>> = (0..d)
                .map(|col| {
                    (0..d)
                        .map(|i| {
                            let p = det(&minor(&c, col, i));
                            if (i + col) % 2 == 1 {
                                p.neg()
                            } else {
                                p
                            }
                        })
                        .collect()
                })
                .collect();
            let deg = d.saturating_sub(1);
            let values: Vec<Vec<BigInt>> = col_entries
                .iter()
                .map(|col| col.iter().map(|p| p.eval_dyadic_scaled(&a, bits, deg)).collect())
                .collect();
            let best = values
                .iter()
                .max_by_key(|v| v[0].bits())
                .expect("dimension >= 1");
            if best[0].is_zero() {
                return Err(Error::RepeatedEigenvalue(k));
            }
            let den = &best[0];
            let mut lambda = BTreeMap::new();
            for &p in &primes {
                let num: BigInt = best
                    .iter()
                    .zip(&self.basis)
                    .map(|(v, b)| v * &b[p as usize])
                    .sum();
                let lam = normalized_ratio(&num, den, p, k);
                lambda.insert(p, lam);
            }
            out.push(HeckeEigenform::assemble(k, lambda, bits)?);
        }
        out.sort_by(|x, y| x.lambda_prime(2).total_cmp(&y.lambda_prime(2)));
        Ok(out)
    }
}

fn char_matrix(m: &[Vec<BigInt>]) -> Vec<Vec<IntPoly>> {
    m.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| if i == j { IntPoly::c_minus_x(v.clone()) } else { IntPoly::constant(v.clone()) })
                .collect()
        })
        .collect()
}

fn precision_bits(k: u32, n: usize, d: usize) -> u64 {
    let logn = ((n + 1) as f64).log2();
    (256.0 + k as f64 * logn + (k as f64 + 8.0) * d as f64).ceil() as u64
}

/// `(num / den) / p^{(k-1)/2}` computed through its exact square.
fn normalized_ratio(num: &BigInt, den: &BigInt, p: u64, k: u32) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let sq = num * num;
    let dsq = den * den * BigInt::from(p).pow(k - 1);
    let mag = ratio_to_f64(&sq, &dsq).sqrt();
    if num.is_negative() == den.is_negative() {
        mag
    } else {
        -mag
    }
}

/// A normalised Hecke eigenform: `a_f(n) = lambda_f(n) n^{(k-1)/2}`,
/// `lambda_f(1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeEigenform {
    weight: u32,
    lambda_p: BTreeMap<u64, f64>,
    petersson_norm: f64,
    sym2_l1: f64,
    precision_bits: u64,
}

impl HeckeEigenform {
    fn assemble(weight: u32, lambda_p: BTreeMap<u64, f64>, precision_bits: u64) -> Result<Self> {
        let mut f = Self { weight, lambda_p, petersson_norm: f64::NAN, sym2_l1: f64::NAN, precision_bits };
        let m = petersson_terms(weight);
        let lam = f.lambda_table(m)?;
        f.petersson_norm = petersson_norm(weight, &lam, PeterssonOptions::default())?;
        f.sym2_l1 = sym2_l1_from_norm(weight, f.petersson_norm);
        Ok(f)
    }

    /// Rebuild from stored data (for example the JSON cache).
    pub fn from_parts(
        weight: u32,
        lambda_p: BTreeMap<u64, f64>,
        petersson_norm: f64,
        sym2_l1: f64,
        precision_bits: u64,
    ) -> Self {
        Self { weight, lambda_p, petersson_norm, sym2_l1, precision_bits }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn petersson_norm(&self) -> f64 {
        self.petersson_norm
    }

    pub fn sym2_l1(&self) -> f64 {
        self.sym2_l1
    }

    pub fn precision_bits(&self) -> u64 {
        self.precision_bits
    }

    /// Largest prime with a stored eigenvalue.
    pub fn prime_bound(&self) -> u64 {
        self.lambda_p.keys().next_back().copied().unwrap_or(1)
    }

    pub fn lambda_primes(&self) -> &BTreeMap<u64, f64> {
        &self.lambda_p
    }

    fn lambda_prime(&self, p: u64) -> f64 {
        self.lambda_p.get(&p).copied().unwrap_or(f64::NAN)
    }

    /// `lambda_f(p^e)` by the prime-power recursion.
    pub fn lambda_prime_power(&self, p: u64, e: u32) -> Result<f64> {
        let lp = *self.lambda_p.get(&p).ok_or(Error::MissingPrime(p))?;
        let (mut prev, mut cur) = (1.0, lp);
        if e == 0 {
            return Ok(1.0);
        }
        for _ in 1..e {
            (prev, cur) = (cur, lp * cur - prev);
        }
        Ok(cur)
    }

    /// `lambda_f(n)` by multiplicativity.
    pub fn lambda(&self, n: u64) -> Result<f64> {
        assert!(n >= 1, "lambda is defined for n >= 1");
        factorize(n)
            .into_iter()
            .try_fold(1.0, |acc, (p, e)| Ok(acc * self.lambda_prime_power(p, e)?))
    }

    /// `lambda_f(n)` for `0 <= n <= nmax` (index 0 holds 0).
    pub fn lambda_table(&self, nmax: usize) -> Result<Vec<f64>> {
        let bound = self.prime_bound();
        if nmax > 1 && (nmax as u64) > bound && primes_up_to(nmax as u64).last().is_some_and(|&p| p > bound) {
            return Err(Error::Coverage { need: nmax as u64, have: bound });
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
        let mut t = vec![0.0; nmax + 1];
        if nmax >= 1 {
            t[1] = 1.0;
        }
        for n in 2..=nmax {
            let p = spf[n];
            let mut m = n;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            t[n] = self.lambda_prime_power(p as u64, e)? * t[m];
        }
        Ok(t)
    }
}

/// Eigenforms of weight `k` with eigenvalues at every prime up to `n`.
pub fn eigenforms(k: u32, n: usize) -> Result<Vec<HeckeEigenform>> {
    let d = cusp_dimension(k);
    if k % 2 == 1 || k < 4 {
        return Err(Error::InvalidWeight(k));
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    if n < 2 * d + 2 {
        return Err(Error::TruncationTooSmall { got: n, need: 2 * d + 2 });
    }
    let n_eff = n.max(petersson_terms(k) + 1);
    HeckeSpace::new(k, n_eff)?.eigenforms()
}

/// JSON cache of the eigen-data of one weight.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EigenCache {
    pub k: u32,
    pub dim: usize,
    pub precision: u32,
    pub eigenforms: Vec<EigenCacheEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EigenCacheEntry {
    pub lambda_2: String,
    pub lambda_primes: BTreeMap<u64, String>,
    pub petersson_norm: String,
    #[serde(rename = "sym2_L1")]
    pub sym2_l1: String,
}

impl EigenCache {
    /// Significant decimal digits written per value.
    pub const DIGITS: u32 = 17;

    pub fn from_forms(k: u32, forms: &[HeckeEigenform], primes_up_to: u64) -> Self {
        let fmt = |x: f64| format!("{:.*e}", Self::DIGITS as usize - 1, x);
        Self {
            k,
            dim: forms.len(),
            precision: Self::DIGITS,
            eigenforms: forms
                .iter()
                .map(|f| EigenCacheEntry {
                    lambda_2: fmt(f.lambda_prime(2)),
                    lambda_primes: f
                        .lambda_p
                        .iter()
                        .filter(|(&p, _)| p <= primes_up_to)
                        .map(|(&p, &v)| (p, fmt(v)))
                        .collect(),
                    petersson_norm: fmt(f.petersson_norm),
                    sym2_l1: fmt(f.sym2_l1),
                })
                .collect(),
        }
    }

    pub fn to_forms(&self) -> Result<Vec<HeckeEigenform>> {
        let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Config(format!("bad number {s}: {e}")));
        self.eigenforms
            .iter()
            .map(|e| {
                let lambda = e
                    .lambda_primes
                    .iter()
                    .map(|(&p, v)| Ok((p, parse(v)?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                Ok(HeckeEigenform::from_parts(
                    self.k,
                    lambda,
                    parse(&e.petersson_norm)?,
                    parse(&e.sym2_l1)?,
                    53,
                ))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_eigenvalues() {
        let f = &eigenforms(12, 50).unwrap()[0];
        let l2 = -24.0 / 2f64.powf(5.5);
        assert!((f.lambda(2).unwrap() - l2).abs() < 1e-15);
        assert!((f.lambda(4).unwrap() + 0.71875).abs() < 1e-14);
        assert_eq!(f.lambda(1).unwrap(), 1.0);
        let l8 = 84480.0 / 8f64.powf(5.5);
        assert!((f.lambda(8).unwrap() - l8).abs() < 1e-14);
    }

    #[test]
    fn hecke_operators_commute() {
        let s = HeckeSpace::new(36, 40).unwrap();
        let a = s.hecke_matrix(2).unwrap();
        let b = s.hecke_matrix(3).unwrap();
        let mul = |x: &Vec<Vec<BigInt>>, y: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            let d = x.len();
            (0..d)
                .map(|i| (0..d).map(|j| (0..d).map(|l| &x[i][l] * &y[l][j]).sum()).collect())
                .collect()
        };
        assert_eq!(mul(&a, &b), mul(&b, &a));
    }
}

/// Eigenforms for a set of weights, each computed to the same truncation.
#[derive(Debug, Clone, Default)]
pub struct EigenTable {
    forms: BTreeMap<u32, Vec<HeckeEigenform>>,
}

impl EigenTable {
    pub fn build(weights: impl IntoIterator<Item = u32>, truncation: usize) -> Result<Self> {
        let mut forms = BTreeMap::new();
        for k in weights {
            forms.insert(k, eigenforms(k, truncation)?);
        }
        Ok(Self { forms })
    }

    pub fn insert(&mut self, k: u32, forms: Vec<HeckeEigenform>) {
        self.forms.insert(k, forms);
    }

    /// Forms of weight `k`; empty when the weight was not built.
    pub fn forms(&self, k: u32) -> &[HeckeEigenform] {
        self.forms.get(&k).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, k: u32) -> bool {
        self.forms.contains_key(&k)
    }

    pub fn weights(&self) -> impl Iterator<Item = u32> + '_ {
        self.forms.keys().copied()
    }
}
