//! Compensated (Kahan) summation for real and complex accumulators.
//!
//! Every long sum in this crate — coefficient sums, theta-series
//! assemblies, contour integrals — runs through one of these accumulators
//! in a fixed deterministic order, so results are reproducible bit-for-bit
//! across runs and independent of tolerance settings elsewhere.

use num_complex::Complex64;

/// Kahan summation accumulator for `f64`.
///
/// Tracks a running compensation term that recaptures the low-order bits
/// lost when a small addend meets a large partial sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    /// Fresh accumulator at zero.
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one value.
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    /// Current compensated total.
    pub fn value(&self) -> f64 {
        self.sum
    }

    /// Sum an iterator in its own order.
    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

/// Componentwise Kahan accumulator for `Complex64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    /// Fresh accumulator at zero.
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one complex value.
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    /// Current compensated total.
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}
