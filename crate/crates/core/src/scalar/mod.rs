//! Real scalar abstraction.
//!
//! Every numerical routine in the crate is generic over [`Real`]. The main
//! path runs in `f64`; [`DoubleDouble`] is used to re-evaluate suspicious
//! results at roughly 32 significant digits, and `f32` is supported for
//! completeness.

mod double_double;

pub use double_double::DoubleDouble;

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_traits::Num;

/// Complex scalar over a real field.
pub type Complex<T> = num_complex::Complex<T>;

/// Real floating-point field used by the linear algebra kernels.
pub trait Real:
    Copy
    + Debug
    + Display
    + Default
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Unit roundoff of the format.
    fn epsilon() -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    /// Natural logarithm; only called on positive arguments.
    fn ln(self) -> Self;
    fn is_finite(self) -> bool;

    /// `self^e` for `self > 0`.
    fn powf(self, e: Self) -> Self {
        (e * self.ln()).exp()
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    /// Translates a relative tolerance calibrated for `f64` into this format
    /// by scaling with the ratio of unit roundoffs. Identity for `f64`.
    fn rescale_tol(f64_tol: f64) -> Self {
        Self::from_f64(f64_tol * (Self::epsilon().to_f64() / f64::EPSILON))
    }
}

macro_rules! impl_real_for_primitive {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
            #[inline]
            fn epsilon() -> Self {
                <$t>::EPSILON
            }
            #[inline]
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            #[inline]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline]
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            #[inline]
            fn ln(self) -> Self {
                <$t>::ln(self)
            }
            #[inline]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
            #[inline]
            fn powf(self, e: Self) -> Self {
                <$t>::powf(self, e)
            }
        }
    };
}

impl_real_for_primitive!(f32);
impl_real_for_primitive!(f64);

/// Modulus of a complex number without intermediate overflow for moderate
/// magnitudes.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    let (a, b) = (z.re.abs(), z.im.abs());
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big == T::zero() {
        return T::zero();
    }
    let ratio = small / big;
    big * (T::one() + ratio * ratio).sqrt()
}

#[inline]
pub(crate) fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescale_tol_is_identity_for_f64() {
        assert_eq!(f64::rescale_tol(1e-12), 1e-12);
        assert!(f32::rescale_tol(1e-12) > 1e-6);
        assert!(DoubleDouble::rescale_tol(1e-12).to_f64() < 1e-26);
    }

    #[test]
    fn cabs_matches_hypot() {
        let z = Complex::new(3.0_f64, -4.0);
        assert_eq!(cabs(z), 5.0);
        assert_eq!(cabs(Complex::new(0.0_f64, 0.0)), 0.0);
    }
}
