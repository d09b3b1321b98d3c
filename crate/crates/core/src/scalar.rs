//! Scalar abstraction for the generating-function engines.
//!
//! Everything that manipulates PGF coefficients is written against
//! [`Scalar`], so the same code runs over exact rationals (the default,
//! see [`crate::Rational`]) and over `f64` for quick numeric work.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, NumAssignRef, Signed, ToPrimitive};

/// A commutative ring/field element usable as a polynomial coefficient.
///
/// Division is only used by code paths that require a field (rationals,
/// floats); integer scalars are fine for pure ring operations.
/// In-place operations by reference (`a += &b`) keep big-number kernels
/// from cloning every operand.
pub trait Scalar: Clone + Debug + Num + NumAssignRef + FromPrimitive + PartialOrd + Signed {}

impl<T> Scalar for T where
    T: Clone + Debug + Num + NumAssignRef + FromPrimitive + PartialOrd + Signed
{
}

/// Lossy conversion to `f64`, used for reporting and float cross-checks.
pub trait ToF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl ToF64 for f64 {
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl ToF64 for f32 {
    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl ToF64 for BigInt {
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl ToF64 for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// `n` as a scalar. Panics only if the scalar cannot represent small
/// integers, which none of the supported types do.
pub fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("scalar type must represent small integers")
}

/// Formats an exact rational as `"num/den"`; integers keep the `/1`.
pub fn fraction_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_fraction(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}
