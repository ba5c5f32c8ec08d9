//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! values with `|lo| <= ulp(hi)/2`, giving about 106 bits of significand.
//!
//! The error-free transformations follow Dekker and Knuth; products use
//! fused multiply-add.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

use super::Real;

#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

/// Taylor terms for exp on the reduced argument `|r| < 2^-11`.
const TAYLOR_TERMS: usize = 18;

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

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        Self {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    fn trunc(self) -> Self {
        let hi = self.hi.trunc();
        if hi == self.hi {
            let (h, l) = quick_two_sum(hi, self.lo.trunc());
            Self { hi: h, lo: l }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    fn exp_impl(self) -> Self {
        if self.hi > 709.0 {
            return Self::new(f64::INFINITY, 0.0);
        }
        if self.hi < -745.0 {
            return Self::zero();
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::one();
        }
        // x = k ln2 + r, then exp(r) = (exp(r / 2^10))^(2^10).
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        let r = r.ldexp(-10);
        // expm1 by Taylor, then (1 + s)^2 - 1 = s (s + 2) keeps the small
        // part exact through the squarings.
        let mut term = r;
        let mut sum = r;
        for i in 2..=TAYLOR_TERMS {
            term = term * r / Self::from(i as f64);
            sum += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        let two = Self::from(2.0);
        for _ in 0..10 {
            sum = sum * (sum + two);
        }
        let sum = sum + Self::one();
        sum.ldexp(k as i32)
    }

    fn ln_impl(self) -> Self {
        if self.hi <= 0.0 {
            return Self::new(f64::NAN, 0.0);
        }
        // Newton on exp: y <- y + x exp(-y) - 1, quadratic convergence from
        // the f64 seed.
        let mut y = Self::from(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp_impl() - Self::one();
        }
        y
    }

    fn sqrt_impl(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::zero()
            } else {
                Self::new(f64::NAN, 0.0)
            };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = Self::from(ax);
        let resid = (self - ax_dd * ax_dd).hi;
        ax_dd + Self::from(resid * x * 0.5)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.hi, f)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - b * (self / b).trunc()
    }
}

macro_rules! forward_assign {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}

forward_assign!(AddAssign, add_assign, +);
forward_assign!(SubAssign, sub_assign, -);
forward_assign!(MulAssign, mul_assign, *);
forward_assign!(DivAssign, div_assign, /);

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self { hi: 0.0, lo: 0.0 }
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self { hi: 1.0, lo: 0.0 }
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = <f64 as Num>::FromStrRadixErr;

    /// Parses through `f64`, so only the leading double is recovered.
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Self::from)
    }
}

impl Real for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        Self::from(x)
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn epsilon() -> Self {
        // 2^-104
        Self::from(4.930_380_657_631_324e-32)
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }
    fn sqrt(self) -> Self {
        self.sqrt_impl()
    }
    fn exp(self) -> Self {
        self.exp_impl()
    }
    fn ln(self) -> Self {
        self.ln_impl()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::from(x)
    }

    #[test]
    fn one_third_times_three() {
        let third = dd(1.0) / dd(3.0);
        let back = third * dd(3.0) - dd(1.0);
        assert!(back.abs().to_f64() < 1e-31);
        // hi part is the correctly rounded double
        assert_eq!(third.hi(), 1.0 / 3.0);
        assert!(third.lo() != 0.0);
    }

    #[test]
    fn sqrt_two_squared() {
        let r = dd(2.0).sqrt();
        let err = (r * r - dd(2.0)).abs();
        assert!(err.to_f64() < 1e-31, "{err:?}");
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[1e-6, 0.1, 0.5, 1.0, 2.0, 10.0, 123.456, 1e6] {
            let y = dd(x).ln().exp();
            let rel = ((y - dd(x)) / dd(x)).abs().to_f64();
            assert!(rel < 1e-30, "x={x} rel={rel:e}");
        }
    }

    #[test]
    fn exp_one_matches_known_digits() {
        // e = 2.718281828459045235360287471352662...
        let e = dd(1.0).exp();
        assert_eq!(e.hi(), std::f64::consts::E);
        let reference = DoubleDouble::new(std::f64::consts::E, 1.445_646_891_729_250_2e-16);
        assert!((e - reference).abs().to_f64() < 1e-31);
    }

    #[test]
    fn powf_fractional() {
        let x = dd(9.0).powf(dd(0.5));
        assert!((x - dd(3.0)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn rem_and_ordering() {
        assert_eq!((dd(7.0) % dd(3.0)).to_f64(), 1.0);
        assert!(DoubleDouble::new(1.0, 1e-20) > dd(1.0));
        assert!(dd(-1.0).abs() == dd(1.0));
    }
}
