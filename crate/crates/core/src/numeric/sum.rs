//! Compensated accumulators.
//!
//! The moment recurrences sum a few hundred to a few thousand weighted
//! terms per index. [`Neumaier`] keeps the rounding error of those sums at
//! O(ε) independent of the term count; [`DoubleDouble`] carries roughly 106
//! bits and additionally captures the low half of every product.

use std::ops::{Add, Mul, Sub};

/// Running sum with the accumulation interface shared by both precisions.
pub trait Accumulator: Default {
    fn push(&mut self, x: f64);

    /// Adds `a * b`.
    fn push_prod(&mut self, a: f64, b: f64);

    fn value(&self) -> f64;
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Kahan–Babuška–Neumaier summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Accumulator for Neumaier {
    #[inline]
    fn push(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn push_prod(&mut self, a: f64, b: f64) {
        self.push(a * b);
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const fn new(hi: f64) -> Self {
        DoubleDouble { hi, lo: 0.0 }
    }

    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        DoubleDouble { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::new(x)
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;

    fn add(self, rhs: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = DoubleDouble;

    fn sub(self, rhs: DoubleDouble) -> DoubleDouble {
        self + DoubleDouble {
            hi: -rhs.hi,
            lo: -rhs.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;

    fn mul(self, rhs: DoubleDouble) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Accumulator for DoubleDouble {
    #[inline]
    fn push(&mut self, x: f64) {
        *self = *self + DoubleDouble::new(x);
    }

    #[inline]
    fn push_prod(&mut self, a: f64, b: f64) {
        *self = *self + DoubleDouble::from_prod(a, b);
    }

    #[inline]
    fn value(&self) -> f64 {
        self.to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ill_conditioned() -> Vec<f64> {
        // 1 + 1e-16 repeated, then -1: exact sum is 1e4 * 1e-16.
        let mut v = vec![1.0];
        v.extend(std::iter::repeat_n(1e-16, 10_000));
        v.push(-1.0);
        v
    }

    #[test]
    fn naive_sum_loses_the_small_terms() {
        let naive: f64 = ill_conditioned().iter().sum();
        assert!((naive - 1e-12).abs() > 1e-13);
    }

    #[test]
    fn neumaier_recovers_small_terms() {
        let mut acc = Neumaier::default();
        for x in ill_conditioned() {
            acc.push(x);
        }
        // the compensation term is itself summed naively: O(n ε²) residue
        assert!((acc.value() - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn double_double_recovers_small_terms() {
        let mut acc = DoubleDouble::default();
        for x in ill_conditioned() {
            acc.push(x);
        }
        assert!((acc.value() - 1e-12).abs() < 1e-25);
    }

    #[test]
    fn double_double_product_keeps_low_bits() {
        // (1 + 2^-30)^2 = 1 + 2^-29 + 2^-60; the last bit is lost in f64.
        let a = 1.0 + 2f64.powi(-30);
        let mut acc = DoubleDouble::default();
        acc.push_prod(a, a);
        acc.push(-1.0);
        acc.push(-(2f64.powi(-29)));
        assert_eq!(acc.value(), 2f64.powi(-60));
    }
}
