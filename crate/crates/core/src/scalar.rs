//! Scalar abstraction shared by every solver in the crate.
//!
//! All algorithms are written against [`Scalar`]. Exact types (the
//! [`Rational`](crate::Rational) alias) report a zero tolerance, so every
//! comparison is an exact comparison and argmax ties are true ties. Floating
//! point types are supported for quick exploratory runs and use a small
//! absolute tolerance instead.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// Absolute threshold under which a value counts as zero.
    fn tolerance() -> Self;

    fn from_rational(value: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// True when arithmetic is exact (tolerance is zero).
    fn is_exact() -> bool {
        Self::tolerance().is_zero()
    }

    fn from_int(value: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(value)))
    }

    fn ratio(numer: i64, denom: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    fn from_usize(value: usize) -> Self {
        Self::from_int(value as i64)
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    fn is_strictly_positive(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_strictly_negative(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_negligible()
    }

    /// `self > other` beyond the tolerance.
    fn definitely_gt(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_strictly_positive()
    }

    /// `self < other` beyond the tolerance.
    fn definitely_lt(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_strictly_negative()
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn from_rational(value: &BigRational) -> Self {
        value.clone()
    }

    fn to_f64(&self) -> f64 {
        // numer/denom may overflow f64 individually for huge values
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let scaled = (self.clone() * BigRational::from_integer(BigInt::from(1u64 << 52)))
                    .round()
                    .to_integer();
                scaled.to_f64().unwrap_or(f64::NAN) / (1u64 << 52) as f64
            }
        }
    }

    fn is_exact() -> bool {
        true
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn from_rational(value: &BigRational) -> Self {
        <BigRational as Scalar>::to_f64(value)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }

    fn from_rational(value: &BigRational) -> Self {
        <BigRational as Scalar>::to_f64(value) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

/// Sum of an iterator of scalars.
pub(crate) fn sum<T: Scalar, I: IntoIterator<Item = T>>(items: I) -> T {
    items.into_iter().fold(T::zero(), |acc, v| acc + v)
}

pub(crate) fn half<T: Scalar>() -> T {
    T::one() / (T::one() + T::one())
}
