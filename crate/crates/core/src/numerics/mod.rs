//! Floating-point building blocks shared by every analytic module.

pub mod interp;
pub mod jet;
pub mod quad;
pub mod special;

pub use num_complex::Complex64 as C64;

/// Neumaier-compensated accumulator. Summation order stays whatever the
/// caller uses, so results are reproducible for a fixed loop order.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSumC {
    re: KahanSum,
    im: KahanSum,
}

impl KahanSumC {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}

/// `e(x) = exp(2 pi i x)`.
pub fn e1(x: f64) -> C64 {
    let t = std::f64::consts::TAU * x.rem_euclid(1.0);
    C64::new(t.cos(), t.sin())
}

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
