//! Scalar bounds shared by the dense matrix and polynomial containers.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed};

/// Exact commutative ring element usable as a matrix or polynomial entry.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> {}

impl<T> Scalar for T where T: Clone + Debug + PartialEq + Num + Neg<Output = T> {}

/// Arbitrary-precision integer.
pub type Integer = BigInt;

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub fn int(n: i64) -> Integer {
    Integer::from(n)
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(Integer::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(Integer::from(n), Integer::from(d))
}

/// Integer value of a rational, if it has denominator one.
pub fn rational_to_integer(q: &Rational) -> Option<Integer> {
    if q.denom().is_one() {
        Some(q.numer().clone())
    } else {
        None
    }
}

pub fn is_unit_integer(n: &Integer) -> bool {
    n.abs().is_one()
}

pub fn nonzero<T: Scalar>(x: &T) -> bool {
    !x.is_zero()
}
