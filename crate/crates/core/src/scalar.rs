//! Integer rings usable as polynomial coefficients.
//!
//! Symbolic work (constraint generation, model checking) runs over
//! [`BigInt`]; fast sampling and exhaustive search run over `i64`.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

/// A signed, exactly-represented integer type.
pub trait Coefficient:
    Signed
    + Clone
    + Ord
    + Hash
    + Debug
    + Display
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Narrow an arbitrary-precision value, `None` if it does not fit.
    fn from_big(value: &BigInt) -> Option<Self>;

    fn to_big(&self) -> BigInt;

    /// `self^exp`, `None` on overflow.
    fn checked_pow(&self, exp: u32) -> Option<Self> {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc.checked_mul(self)?;
        }
        Some(acc)
    }
}

impl Coefficient for i64 {
    fn from_big(value: &BigInt) -> Option<Self> {
        value.to_i64()
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coefficient for i128 {
    fn from_big(value: &BigInt) -> Option<Self> {
        value.to_i128()
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coefficient for BigInt {
    fn from_big(value: &BigInt) -> Option<Self> {
        Some(value.clone())
    }

    fn to_big(&self) -> BigInt {
        self.clone()
    }
}
