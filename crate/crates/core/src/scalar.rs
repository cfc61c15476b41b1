//! Scalar abstraction shared by the series, polynomial and recurrence code.
//!
//! Counting paths use exact integers; generating-function identities use
//! exact rationals. Both plug in through [`Scalar`], and the operations that
//! need true division (series exponential) additionally ask for [`Field`].

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num};

/// A commutative ring element with an embedding of the naturals.
pub trait Scalar: Num + Clone + Debug {
    fn from_u64(n: u64) -> Self;
}

/// A scalar whose `/` is exact field division (not truncating).
pub trait Field: Scalar {}

macro_rules! impl_scalar_prim {
    ($($t:ty),*) => {
        $(impl Scalar for $t {
            fn from_u64(n: u64) -> Self {
                <$t as FromPrimitive>::from_u64(n).expect("value does not fit the scalar type")
            }
        })*
    };
}

impl_scalar_prim!(i64, i128, u64, u128, f32, f64);

impl Scalar for BigInt {
    fn from_u64(n: u64) -> Self {
        BigInt::from(n)
    }
}

impl Scalar for BigUint {
    fn from_u64(n: u64) -> Self {
        BigUint::from(n)
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Scalar + num_integer::Integer,
{
    fn from_u64(n: u64) -> Self {
        Ratio::from_integer(T::from_u64(n))
    }
}

impl Field for f32 {}
impl Field for f64 {}
impl<T> Field for Ratio<T> where T: Scalar + num_integer::Integer {}
