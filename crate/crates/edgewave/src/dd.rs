//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 32 significant decimal digits. Only the operations needed by the
//! Airy series, the Gauss-Legendre node computation and the determinant LU are
//! provided. The algorithms are the classical error-free transformations of
//! Dekker and Knuth, with `mul_add` supplying the exact product.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
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

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };

    /// Builds a value from an already normalized pair.
    pub const fn from_parts(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    pub fn new(hi: f64, lo: f64) -> Dd {
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn powi(self, n: u32) -> Dd {
        let mut result = Dd::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result *= base;
            }
            base = base * base;
            e >>= 1;
        }
        result
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from(self.hi.sqrt());
        }
        // One Newton step on the f64 root doubles the number of correct digits.
        let x = self.hi.sqrt();
        let xx = Dd::from(x) * Dd::from(x);
        let corr = (self - xx).hi / (2.0 * x);
        Dd::new(x, corr)
    }

    /// Real `n`-th root of a positive value, refined by Newton in double-double.
    pub fn nth_root(self, n: u32) -> Dd {
        assert!(n >= 1);
        if n == 1 || self.hi == 0.0 {
            return self;
        }
        let mut y = Dd::from(self.hi.powf(1.0 / n as f64));
        for _ in 0..3 {
            let yn1 = y.powi(n - 1);
            y = y - (yn1 * y - self) / (yn1 * n as f64);
        }
        y
    }

    /// Natural logarithm of a positive value. The result carries full f64
    /// accuracy relative to the argument, which is all the determinant needs.
    pub fn ln_f64(self) -> f64 {
        self.hi.ln() + (self.lo / self.hi).ln_1p()
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }
}

impl From<i64> for Dd {
    fn from(x: i64) -> Dd {
        let hi = x as f64;
        let lo = (x - hi as i64) as f64;
        Dd::new(hi, lo)
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, b: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, b);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, b: f64) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        // Long division: three f64 quotient digits.
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let (p1, p2) = two_prod(q1, b);
        let (s, e) = two_sum(self.hi, -p1);
        let e = e - p2 + self.lo;
        let q2 = (s + e) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_has_nonzero_tail() {
        let t = Dd::ONE / Dd::from(3.0);
        let back = t * 3.0 - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31, "{back:?}");
        assert!(t.lo() != 0.0);
    }

    #[test]
    fn sqrt_two_squares_back() {
        let s = Dd::from(2.0).sqrt();
        assert!((s * s - 2.0).to_f64().abs() < 1e-31);
    }

    #[test]
    fn cube_root_is_exact_to_dd() {
        let x = Dd::from(1.5);
        let y = x.nth_root(3);
        assert!((y.powi(3) - x).to_f64().abs() < 1e-31);
    }

    #[test]
    fn cancellation_is_recovered() {
        // (1 + 2^-60) - 1 vanishes in f64 but not here.
        let tiny = 2f64.powi(-60);
        let a = Dd::ONE + tiny;
        assert_eq!((a - Dd::ONE).to_f64(), tiny);
    }

    #[test]
    fn division_by_f64_matches_dd_division() {
        let a = Dd::from(7.0) / Dd::from(11.0);
        let b = Dd::from(7.0) / 11.0;
        assert!((a - b).to_f64().abs() < 1e-32);
    }

    #[test]
    fn ln_uses_tail() {
        let x = Dd::new(1.0, 1e-20);
        assert!((x.ln_f64() - 1e-20).abs() < 1e-35);
    }
}
