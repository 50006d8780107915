//! Integer and rational polynomials: determinants over `Z[X]`, Sturm
//! sequences and dyadic root refinement.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense integer polynomial, coefficients from degree 0 upwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn constant(c: BigInt) -> Self {
        IntPoly(vec![c]).trimmed()
    }

    /// `c - X`
    pub fn c_minus_x(c: BigInt) -> Self {
        IntPoly(vec![c, -BigInt::one()])
    }

    pub fn zero() -> Self {
        IntPoly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let v = (0..n)
            .map(|i| {
                self.0.get(i).cloned().unwrap_or_default() + o.0.get(i).cloned().unwrap_or_default()
            })
            .collect();
        IntPoly(v).trimmed()
    }

    pub fn neg(&self) -> Self {
        IntPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        IntPoly(v).trimmed()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntPoly(self.0.iter().map(|a| a * c).collect()).trimmed()
    }

    pub fn derivative(&self) -> Self {
        IntPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
        .trimmed()
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    /// `2^{E D} p(A / 2^E)` as an exact integer, for `D >= deg p`.
    pub fn eval_dyadic_scaled(&self, a: &BigInt, e: u64, d: usize) -> BigInt {
        let mut sum = BigInt::zero();
        let mut apow = BigInt::one();
        for (j, c) in self.0.iter().enumerate() {
            sum += c * &apow << (e as usize * (d - j));
            apow *= a;
        }
        sum
    }

    pub fn to_rational(&self) -> RatPoly {
        RatPoly(self.0.iter().cloned().map(BigRational::from_integer).collect())
    }
}

/// Determinant of a square matrix over `Z[X]` by cofactor expansion.
pub fn det(m: &[Vec<IntPoly>]) -> IntPoly {
    let n = m.len();
    match n {
        0 => IntPoly::constant(BigInt::one()),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = IntPoly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor = minor(m, 0, j);
                let term = m[0][j].mul(&det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.add(&term.neg()) };
            }
            acc
        }
    }
}

pub fn minor(m: &[Vec<IntPoly>], row: usize, col: usize) -> Vec<Vec<IntPoly>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

/// Rational polynomial used for Sturm sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly(pub Vec<BigRational>);

impl RatPoly {
    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.clone().trimmed().0.len().checked_sub(1)
    }

    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        let d = d.clone().trimmed();
        let dn = d.0.len();
        assert!(dn > 0, "division by the zero polynomial");
        let mut r = self.clone().trimmed().0;
        let lead = d.0[dn - 1].clone();
        while r.len() >= dn {
            let q = r[r.len() - 1].clone() / &lead;
            let shift = r.len() - dn;
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= &q * c;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        RatPoly(r)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

/// Degree of `gcd(p, p')`; zero iff `p` is squarefree.
pub fn gcd_with_derivative_degree(p: &IntPoly) -> usize {
    let mut a = p.to_rational();
    let mut b = p.derivative().to_rational();
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a.degree().unwrap_or(0)
}

pub fn sturm_sequence(p: &IntPoly) -> Vec<RatPoly> {
    let mut seq = vec![p.to_rational(), p.derivative().to_rational()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(RatPoly(r.0.into_iter().map(|c| -c).collect()));
    }
    seq
}

fn sign_changes(seq: &[RatPoly], x: &BigRational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|p| {
            let v = p.eval(x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|s| *s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Disjoint rational intervals `(lo, hi]`, each holding exactly one real root.
pub fn isolate_real_roots(p: &IntPoly) -> Vec<(BigRational, BigRational)> {
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Vec::new();
    }
    let lead = p.0[deg].abs();
    let bound = p.0[..deg]
        .iter()
        .map(|c| BigRational::new(c.abs(), lead.clone()))
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
        + BigRational::one();
    let seq = sturm_sequence(p);
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let n = sign_changes(&seq, &lo) as i64 - sign_changes(&seq, &hi) as i64;
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Refine the simple root in `(lo, hi]` to an integer `A` with the root in
/// `[A / 2^E, (A + 1) / 2^E]`.
pub fn refine_root(p: &IntPoly, lo: &BigRational, hi: &BigRational, e: u64) -> BigInt {
    let scale = BigInt::one() << e as usize;
    let d = p.degree().unwrap_or(0);
    let mut a = (lo.numer() * &scale).div_floor(lo.denom());
    let mut b = (hi.numer() * &scale).div_ceil(hi.denom());
    let sign = |x: &BigInt| p.eval_dyadic_scaled(x, e, d).sign();
    let sa = sign(&a);
    if sa == num_bigint::Sign::NoSign {
        return a;
    }
    while &b - &a > BigInt::one() {
        let m: BigInt = (&a + &b) >> 1;
        let sm = sign(&m);
        if sm == num_bigint::Sign::NoSign {
            return m;
        }
        if sm == sa {
            a = m;
        } else {
            b = m;
        }
    }
    a
}

/// `n / d` as the nearest `f64`, valid far outside the `f64` range of either.
pub fn ratio_to_f64(n: &BigInt, d: &BigInt) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let shift = d.bits() as i64 - n.bits() as i64 + 80;
    let q = if shift >= 0 {
        (n << shift as usize) / d
    } else {
        n / (d << (-shift) as usize)
    };
    let (mant, exp) = to_f64_parts(&q);
    mant * 2f64.powi((exp - shift) as i32)
}

fn to_f64_parts(q: &BigInt) -> (f64, i64) {
    let bits = q.bits() as i64;
    let drop = (bits - 64).max(0);
    let top: BigInt = q >> drop as usize;
    let v: i128 = top.try_into().expect("fits after shift");
    (v as f64, drop)
}
