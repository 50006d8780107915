use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::poly::ratio_to_f64;
use super::series::{cusp_dimension, echelon_basis};
use crate::{Error, Result};

/// Truncated q-expansion `sum_{n <= N} c(n) q^n` with exact rational
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QExpansion {
    weight: u32,
    coeffs: Vec<BigRational>,
}

impl QExpansion {
    pub fn new(weight: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        if weight < 4 || weight % 2 == 1 {
            return Err(Error::InvalidWeight(weight));
        }
        if coeffs.len() < 2 {
            return Err(Error::TruncationTooSmall { got: coeffs.len().saturating_sub(1), need: 1 });
        }
        Ok(Self { weight, coeffs })
    }

    pub fn from_integers(weight: u32, coeffs: Vec<BigInt>) -> Result<Self> {
        Self::new(weight, coeffs.into_iter().map(BigRational::from_integer).collect())
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Largest exponent `N` carried.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&BigRational> {
        self.coeffs.get(n)
    }

    pub fn is_cusp_form(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        Self { weight: self.weight, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// `c(n) / n^{(k-1)/2}` as floats, index 0 set to zero.
    pub fn normalized_coefficients(&self) -> Vec<f64> {
        let half = (self.weight as f64 - 1.0) / 2.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n == 0 {
                    return 0.0;
                }
                let v = c.to_f64().filter(|v| v.is_finite()).unwrap_or_else(|| ratio_to_f64(c.numer(), c.denom()));
                v * (-half * (n as f64).ln()).exp()
            })
            .collect()
    }
}

/// Echelonised basis of `S_k`: element `i` is `q^{i+1} + O(q^{dim+1})`.
pub fn victor_miller_basis(k: u32, n: usize) -> Result<Vec<QExpansion>> {
    if k % 2 == 1 {
        return Err(Error::InvalidWeight(k));
    }
    let d = cusp_dimension(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    if n < d {
        return Err(Error::TruncationTooSmall { got: n, need: d });
    }
    echelon_basis(k, n)
        .into_iter()
        .map(|c| QExpansion::from_integers(k, c))
        .collect()
}
