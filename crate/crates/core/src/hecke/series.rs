//! Exact q-series of level-one modular forms via multimodular arithmetic.
//!
//! Every series is computed modulo several 61-bit primes with plain `u64`
//! arithmetic and lifted to `BigInt` by Chinese remaindering. One spare prime
//! certifies each lift.

use num_bigint::BigInt;
use crate::arith::{mul_mod, pow_mod};

/// Deterministic Miller–Rabin for 64-bit integers.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The `count` largest primes below `2^61`.
pub fn moduli(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = (1u64 << 61) - 1;
    while out.len() < count {
        if is_prime_u64(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

/// Truncated product modulo `p` of two series of equal length.
pub fn mul_trunc(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().min(b.len());
    let mut out = vec![0u64; n];
    let first_a = a.iter().position(|&x| x != 0).unwrap_or(n);
    let first_b = b.iter().position(|&x| x != 0).unwrap_or(n);
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc: u128 = 0;
        let mut pending = 0;
        if k < first_a + first_b {
            continue;
        }
        for i in first_a..=(k - first_b) {
            acc += a[i] as u128 * b[k - i] as u128;
            pending += 1;
            if pending == 32 {
                acc %= p as u128;
                pending = 0;
            }
        }
        *slot = (acc % p as u128) as u64;
    }
    out
}

fn sigma_mod(r: u32, n: usize, p: u64) -> Vec<u64> {
    let mut s = vec![0u64; n + 1];
    for d in 1..=n {
        let dr = pow_mod(d as u64 % p, r as u64, p);
        let mut m = d;
        while m <= n {
            s[m] = (s[m] + dr) % p;
            m += d;
        }
    }
    s
}

/// `E_4`, `E_6` and `Delta` modulo `p`, truncated after `q^n`.
pub fn eisenstein_delta(n: usize, p: u64) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let s3 = sigma_mod(3, n, p);
    let s5 = sigma_mod(5, n, p);
    let mut e4: Vec<u64> = s3.iter().map(|&x| mul_mod(240, x, p)).collect();
    let mut e6: Vec<u64> = s5.iter().map(|&x| (p - mul_mod(504, x, p)) % p).collect();
    e4[0] = 1;
    e6[0] = 1;
    let e4sq = mul_trunc(&e4, &e4, p);
    let e4cube = mul_trunc(&e4sq, &e4, p);
    let e6sq = mul_trunc(&e6, &e6, p);
    let inv1728 = pow_mod(1728, p - 2, p);
    let delta = e4cube
        .iter()
        .zip(&e6sq)
        .map(|(&a, &b)| mul_mod((a + p - b) % p, inv1728, p))
        .collect();
    (e4, e6, delta)
}

fn power(base: &[u64], e: u32, p: u64) -> Vec<u64> {
    let mut r = vec![0u64; base.len()];
    r[0] = 1;
    for _ in 0..e {
        r = mul_trunc(&r, base, p);
    }
    r
}

/// `dim S_k` for the full modular group.
pub fn cusp_dimension(k: u32) -> usize {
    if k < 12 || k % 2 == 1 {
        return 0;
    }
    let d = (k / 12) as usize;
    if k % 12 == 2 {
        d - 1
    } else {
        d
    }
}

/// Exponents `(j, a, b)` of the monomials `Delta^j E_4^a E_6^b` of weight `k`,
/// `j = 1..=dim`, with `a` in `{0, 1, 2}`.
pub fn monomials(k: u32) -> Vec<(u32, u32, u32)> {
    (1..=cusp_dimension(k) as u32)
        .map(|j| {
            let m = k - 12 * j;
            let a = (0..3)
                .find(|a| m >= 4 * a && (m - 4 * a) % 6 == 0)
                .expect("weight decomposes as 4a + 6b");
            (j, a, (m - 4 * a) / 6)
        })
        .collect()
}

/// Echelon basis of `S_k` modulo `p`: element `i` is `q^{i+1} + O(q^{dim+1})`.
fn echelon_mod(k: u32, n: usize, p: u64) -> Vec<Vec<u64>> {
    let (e4, e6, delta) = eisenstein_delta(n, p);
    let mons = monomials(k);
    let mut basis: Vec<Vec<u64>> = mons
        .iter()
        .map(|&(j, a, b)| {
            let mut g = power(&delta, j, p);
            if a > 0 {
                g = mul_trunc(&g, &power(&e4, a, p), p);
            }
            if b > 0 {
                g = mul_trunc(&g, &power(&e6, b, p), p);
            }
            g
        })
        .collect();
    let d = basis.len();
    for i in (0..d).rev() {
        for j in i + 1..d {
            let c = basis[i][j + 1];
            if c == 0 {
                continue;
            }
            let (lo, hi) = basis.split_at_mut(j);
            for (x, &y) in lo[i].iter_mut().zip(&hi[0]) {
                *x = (*x + p - mul_mod(c, y, p)) % p;
            }
        }
    }
    basis
}

fn crt_lift(residues: &[u64], primes: &[u64]) -> (BigInt, BigInt) {
    let mut x = BigInt::from(residues[0]);
    let mut m = BigInt::from(primes[0]);
    for (&r, &p) in residues.iter().zip(primes).skip(1) {
        let pb = BigInt::from(p);
        let xm: u64 = (&x % &pb).try_into().expect("residue fits");
        let mm: u64 = (&m % &pb).try_into().expect("residue fits");
        let inv = pow_mod(mm, p - 2, p);
        let t = mul_mod((r + p - xm) % p, inv, p);
        x += &m * t;
        m *= pb;
    }
    let half: BigInt = &m >> 1;
    if x > half {
        x -= &m;
    }
    (x, m)
}

fn lift_all(per_prime: &[Vec<Vec<u64>>], primes: &[u64]) -> Vec<Vec<BigInt>> {
    let d = per_prime[0].len();
    let n = per_prime[0].first().map_or(0, Vec::len);
    (0..d)
        .map(|i| {
            (0..n)
                .map(|c| {
                    let res: Vec<u64> = per_prime.iter().map(|b| b[i][c]).collect();
                    crt_lift(&res, primes).0
                })
                .collect()
        })
        .collect()
}

/// Exact integer echelon basis of `S_k`, coefficients of `q^0 ..= q^n`.
pub fn echelon_basis(k: u32, n: usize) -> Vec<Vec<BigInt>> {
    let d = cusp_dimension(k);
    if d == 0 {
        return Vec::new();
    }
    let est_bits = (k as f64 - 1.0) * ((n + 2) as f64).log2() + 24.0 * d as f64 + 64.0;
    let mut count = (est_bits / 60.0).ceil() as usize + 1;
    loop {
        let primes = moduli(count + 1);
        let per_prime: Vec<Vec<Vec<u64>>> = primes.iter().map(|&p| echelon_mod(k, n, p)).collect();
        let lifted = lift_all(&per_prime[..count], &primes[..count]);
        let check = primes[count];
        let ok = lifted.iter().zip(&per_prime[count]).all(|(row, res)| {
            row.iter().zip(res).all(|(v, &r)| {
                let m: BigInt = ((v % BigInt::from(check)) + BigInt::from(check)) % BigInt::from(check);
                m == BigInt::from(r)
            })
        });
        if ok {
            return lifted;
        }
        count += count / 2 + 1;
    }
}
