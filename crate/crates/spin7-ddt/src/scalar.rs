//! Scalar abstraction: exact rationals or binary64 floats.
//!
//! Every algebraic object in this crate is generic over [`Scalar`]. The
//! rational instantiation ([`Rat`]) is the default for identity
//! verification: arithmetic is closed and associative with no rounding, so
//! an identity either holds on the nose or it does not. The float
//! instantiation is used where eigenvalue or transcendental steps are
//! unavoidable (normal forms, the cubic solver, spectral sweeps);
//! comparisons there go through an explicit absolute tolerance.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arbitrary-precision rational scalar.
pub type Rat = BigRational;

/// Default absolute tolerance for float-mode comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Abstract scalar: exact rational or f64.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Structural zero test (exact equality with 0, even in float mode).
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// Square root when representable: always for f64 (of non-negatives),
    /// only perfect squares for rationals.
    fn sqrt_exact(&self) -> Option<Self>;

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
    /// |self| <= tol, with tol ignored in exact mode.
    fn is_zero_tol(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.abs_f64() <= tol
        }
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        // Good enough for the magnitudes in this crate; exact values stay exact.
        let n = self.numer();
        let d = self.denom();
        bigint_to_f64(n) / bigint_to_f64(d)
    }
    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt_exact(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }
}

/// Convenience: exact rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_int(n)
}

/// Convenience: exact rational num/den.
pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_exact() {
        assert_eq!(ratio(9, 4).sqrt_exact(), Some(ratio(3, 2)));
        assert_eq!(rat(2).sqrt_exact(), None);
        assert_eq!(rat(-4).sqrt_exact(), None);
    }

    #[test]
    fn float_tolerance() {
        assert!(1e-10f64.is_zero_tol(1e-9));
        assert!(!1e-8f64.is_zero_tol(1e-9));
        // exact mode ignores the tolerance
        assert!(!ratio(1, 1_000_000_000_000).is_zero_tol(1.0));
    }
}
