//! Kloosterman sums and the character sums built from them, evaluated exactly
//! as integer combinations of `c`-th roots of unity.

use serde::{Deserialize, Serialize};

use crate::arith::{divisor_count, euler_phi, gcd, mod_inv};
use crate::numerics::{KahanSum, C64};
use crate::{Error, Result};

/// Default ceiling on the modulus of the quadruple sum.
pub const QUADRUPLE_GUARD: u64 = 60;
/// Default ceiling on the modulus of the Salié-type sum.
pub const SALIE_GUARD: u64 = 200;

/// `sum_r counts[r] zeta_c^r`, an element of `Z[zeta_c]` kept as the
/// exponent histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSum {
    modulus: u64,
    counts: Vec<i64>,
}

impl RootSum {
    pub fn zero(c: u64) -> Self {
        Self { modulus: c, counts: vec![0; c as usize] }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    fn push(&mut self, r: u64) {
        self.counts[r as usize] += 1;
    }

    /// Exactly real: the histogram is symmetric under `r -> -r`.
    pub fn is_real(&self) -> bool {
        let c = self.counts.len();
        (1..c).all(|r| self.counts[r] == self.counts[c - r])
    }

    /// Numerical value.
    pub fn value(&self) -> C64 {
        let c = self.modulus as f64;
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for (r, &n) in self.counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let t = std::f64::consts::TAU * r as f64 / c;
            re.add(n as f64 * t.cos());
            im.add(n as f64 * t.sin());
        }
        C64::new(re.value(), im.value())
    }

    /// Nearest integer together with the distance to it.
    pub fn rounded(&self) -> (i128, f64) {
        let v = self.value();
        let r = v.re.round();
        (r as i128, (v - C64::new(r, 0.0)).norm())
    }
}

/// Modulus and arguments of a residue sum, reduced modulo `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSumSpec {
    pub modulus: u64,
    pub args: [u64; 4],
}

impl ResidueSumSpec {
    pub fn new(modulus: u64, args: [i64; 4]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Config("modulus must be positive".into()));
        }
        let c = modulus as i64;
        Ok(Self { modulus, args: args.map(|a| a.rem_euclid(c) as u64) })
    }
}

fn units_with_inverses(c: u64) -> Vec<(u64, u64)> {
    (0..c)
        .filter(|&x| gcd(x, c) == 1)
        .map(|x| (x % c, mod_inv(x as i64, c as i64).map_or(0, |v| v as u64)))
        .collect()
}

/// Exact `S(m, n; c) = sum_{x mod c, (x, c) = 1} e_c(m x + n xbar)`.
pub fn kloosterman_exact(m: i64, n: i64, c: u64) -> RootSum {
    let spec = ResidueSumSpec::new(c.max(1), [m, n, 0, 0]).expect("positive modulus");
    let [m, n, _, _] = spec.args;
    let mut acc = RootSum::zero(c);
    for (x, xb) in units_with_inverses(c) {
        acc.push(((m as u128 * x as u128 + n as u128 * xb as u128) % c as u128) as u64);
    }
    acc
}

/// `S(m, n; c)` as a real number.
pub fn kloosterman(m: i64, n: i64, c: u64) -> f64 {
    kloosterman_exact(m, n, c).value().re
}

/// Brute-force quadruple sum over `a1, a2, b1, b2 mod c` of
/// `S(a1 (a1 + b1), a2 (a2 + b2); c) e_c(2 a1 a2 + a1 b2 + a2 b1)`.
pub fn quadruple_sum(c: u64) -> Result<i128> {
    quadruple_sum_guarded(c, QUADRUPLE_GUARD)
}

pub fn quadruple_sum_guarded(c: u64, guard: u64) -> Result<i128> {
    if c == 0 || c > guard {
        return Err(Error::Guard { c, max: guard });
    }
    let acc = quadruple_histogram(c);
    let (v, dist) = acc.rounded();
    if dist >= 1e-6 {
        return Err(Error::Quadrature(format!("quadruple sum for c = {c} is {dist:e} from an integer")));
    }
    Ok(v)
}

/// Exponent histogram of the quadruple sum.
///
/// The exponent is `(a1^2 x + a2^2 xbar + 2 a1 a2) + b1 (a1 x + a2) + b2 (a2 xbar + a1)`,
/// so the `b` loops only add constants.
pub fn quadruple_histogram(c: u64) -> RootSum {
    let units = units_with_inverses(c);
    let mut counts = vec![0i64; c as usize];
    let cu = c as usize;
    for a1 in 0..c {
        for a2 in 0..c {
            for &(x, xb) in &units {
                let base = ((a1 * a1 % c) * x + (a2 * a2 % c) * xb + 2 * a1 * a2) % c;
                let u = ((a1 * x + a2) % c) as usize;
                let v = ((a2 * xb + a1) % c) as usize;
                let mut e1 = base as usize;
                for _b1 in 0..c {
                    let mut e = e1;
                    for _b2 in 0..c {
                        counts[e] += 1;
                        e += v;
                        if e >= cu {
                            e -= cu;
                        }
                    }
                    e1 += u;
                    if e1 >= cu {
                        e1 -= cu;
                    }
                }
            }
        }
    }
    RootSum { modulus: c, counts }
}

/// `c^3 phi(c)`.
pub fn quadruple_target(c: u64) -> i128 {
    (c as i128).pow(3) * euler_phi(c) as i128
}

/// Order of the loops in [`salie_type_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumOrder {
    /// `a`, then `b`, then the Kloosterman variable.
    Residues,
    /// Kloosterman variable outermost, residues reversed.
    UnitsFirst,
}

/// `sum_{a, b mod c} S(a (a + l1), b (b + l2); c) e_c(2ab + l2 a + l1 b)`.
pub fn salie_type_sum(c: u64, l1: i64, l2: i64, order: SumOrder) -> Result<RootSum> {
    if c == 0 || c > SALIE_GUARD {
        return Err(Error::Guard { c, max: SALIE_GUARD });
    }
    let spec = ResidueSumSpec::new(c, [l1, l2, 0, 0])?;
    let [l1, l2, _, _] = spec.args;
    let units = units_with_inverses(c);
    let mut acc = RootSum::zero(c);
    let term = |a: u64, b: u64, x: u64, xb: u64| -> u64 {
        let m = a * ((a + l1) % c) % c;
        let n = b * ((b + l2) % c) % c;
        (m * x + n * xb + 2 * a * b + l2 * a + l1 * b) % c
    };
    match order {
        SumOrder::Residues => {
            for a in 0..c {
                for b in 0..c {
                    for &(x, xb) in &units {
                        acc.push(term(a, b, x, xb));
                    }
                }
            }
        }
        SumOrder::UnitsFirst => {
            for &(x, xb) in units.iter().rev() {
                for b in (0..c).rev() {
                    for a in (0..c).rev() {
                        acc.push(term(a, b, x, xb));
                    }
                }
            }
        }
    }
    Ok(acc)
}

/// Outcome of a Weil-bound sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeilReport {
    pub checked: usize,
    /// `(m, n, c, |S|, bound)` for every violation.
    pub violations: Vec<(i64, i64, u64, f64, f64)>,
    /// Largest `|S| / bound` seen.
    pub worst_ratio: f64,
}

/// Check `|S(m, n; c)| <= d(c) sqrt(gcd(m, n, c)) sqrt(c)` on every sample.
pub fn weil_check(samples: &[(i64, i64, u64)]) -> WeilReport {
    let mut violations = Vec::new();
    let mut worst: f64 = 0.0;
    for &(m, n, c) in samples {
        let s = kloosterman_exact(m, n, c);
        debug_assert!(s.is_real());
        let v = s.value().re.abs();
        let g = gcd(gcd(m.unsigned_abs(), n.unsigned_abs()), c);
        let bound = divisor_count(c) as f64 * (g as f64).sqrt() * (c as f64).sqrt();
        worst = worst.max(v / bound);
        if v > bound * (1.0 + 1e-12) {
            violations.push((m, n, c, v, bound));
        }
    }
    WeilReport { checked: samples.len(), violations, worst_ratio: worst }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_kloosterman_values() {
        assert_eq!(kloosterman(1, 1, 1), 1.0);
        assert!((kloosterman(1, 1, 2) - 1.0).abs() < 1e-15);
        assert!((kloosterman(0, 0, 12) - 4.0).abs() < 1e-13);
        // S(1, 1; 5) = 2 + 2 cos(4 pi / 5)
        assert!((kloosterman(1, 1, 5) - 0.3819660112501049).abs() < 1e-13);
        assert!((kloosterman(1, 1, 3) + 1.0).abs() < 1e-13);
        assert!((kloosterman(1, 1, 4) + 2.0).abs() < 1e-13);
        assert!((kloosterman(2, 3, 7) - 1.1099162641747466).abs() < 1e-13);
        let s7: f64 = [(1u64, 1u64), (2, 4), (3, 5), (4, 2), (5, 3), (6, 6)]
            .iter()
            .map(|&(x, xb)| (std::f64::consts::TAU * ((x + xb) % 7) as f64 / 7.0).cos())
            .sum();
        assert!((kloosterman(1, 1, 7) - s7).abs() < 1e-13);
    }

    #[test]
    fn quadruple_small_moduli() {
        assert_eq!(quadruple_sum(1).unwrap(), 1);
        assert_eq!(quadruple_sum(2).unwrap(), 8);
        assert_eq!(quadruple_sum(6).unwrap(), 432);
        assert!(matches!(quadruple_sum(61), Err(Error::Guard { .. })));
    }

    #[test]
    fn salie_trivial_modulus_and_orders() {
        assert_eq!(salie_type_sum(1, 3, -2, SumOrder::Residues).unwrap().value(), C64::new(1.0, 0.0));
        let a = salie_type_sum(9, 1, 1, SumOrder::Residues).unwrap();
        let b = salie_type_sum(9, 1, 1, SumOrder::UnitsFirst).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn salie_zero_shift_matches_double_loop() {
        for c in [3u64, 8, 10] {
            let direct: C64 = (0..c)
                .flat_map(|a| (0..c).map(move |b| (a, b)))
                .map(|(a, b)| {
                    let s = kloosterman((a * a) as i64, (b * b) as i64, c);
                    crate::numerics::e1((2 * a * b) as f64 / c as f64) * s
                })
                .sum();
            let v = salie_type_sum(c, 0, 0, SumOrder::Residues).unwrap().value();
            assert!((direct - v).norm() < 1e-9);
        }
    }
}
