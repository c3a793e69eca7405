//! Arithmetic modes.
//!
//! `f64` compares within a tolerance; [`Rational`] compares exactly and
//! ignores every tolerance it is handed.

use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for arithmetic without rounding.
    const EXACT: bool;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// `None` for non-finite input.
    fn from_f64(value: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// Equality in this arithmetic mode: `|a - b| <= tol` for floats, `a == b`
    /// for rationals.
    fn near(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.to_f64() - other.to_f64()).abs() <= tol
        }
    }

    /// `self > bound + tol` (exactly `self > bound` for rationals).
    fn exceeds(&self, bound: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self > bound
        } else {
            self.to_f64() > bound.to_f64() + tol
        }
    }

    /// `self >= -tol` (exactly `self >= 0` for rationals).
    fn is_nonnegative(&self, tol: f64) -> bool {
        if Self::EXACT {
            *self >= Self::zero()
        } else {
            self.to_f64() >= -tol
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn from_f64(value: f64) -> Option<Self> {
        value.is_finite().then_some(value)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        libm::fabs(*self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_f64(value: f64) -> Option<Self> {
        Rational::from_float(value)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Sum of a sequence of scalars, starting from zero.
pub fn sum<'a, S: Scalar + 'a>(values: impl IntoIterator<Item = &'a S>) -> S {
    values
        .into_iter()
        .fold(S::zero(), |acc, v| acc + v.clone())
}

/// Numeric slack for the float mode. Rational arithmetic ignores all of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Equality of derived quantities.
    pub tol: f64,
    /// Normalization of measures and kernels at construction.
    pub norm: f64,
    /// The {0, 1} dichotomy of deterministic conditional probabilities.
    pub det: f64,
    /// Identification of two axes by direction.
    pub axis: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        tol: 1e-9,
        norm: 1e-12,
        det: 1e-6,
        axis: 1e-9,
    };

    pub fn with_tol(tol: f64) -> Self {
        Tolerances {
            tol,
            ..Self::DEFAULT
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_comparisons_ignore_tolerance() {
        let a = Rational::from_ratio(1, 3);
        let b = Rational::from_ratio(1, 3) + Rational::from_ratio(1, 1_000_000_000_000);
        assert!(!a.near(&b, 1.0));
        assert!(b.exceeds(&a, 1.0));
        assert!(a.near(&Rational::from_ratio(2, 6), 0.0));
    }

    #[test]
    fn float_comparisons_use_tolerance() {
        assert!(0.1f64.near(&(0.1 + 1e-12), 1e-9));
        assert!(!2.0f64.exceeds(&2.0, 1e-9));
        assert!((2.0 + 1e-6f64).exceeds(&2.0, 1e-9));
        assert!((-1e-13f64).is_nonnegative(1e-12));
    }

    #[test]
    fn rational_from_binary_float_is_exact() {
        let r = Rational::from_f64(0.375).unwrap();
        assert_eq!(r, Rational::from_ratio(3, 8));
        assert!(<Rational as Scalar>::from_f64(f64::NAN).is_none());
    }
}
