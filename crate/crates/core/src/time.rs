//! Scalar time type used throughout the crate.
//!
//! All times (release dates, durations, setups, completion times) are
//! non-negative integers. The solver is generic over any unsigned primitive
//! integer; `u64` is the default used by the CLI and the crate-root aliases.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{PrimInt, Unsigned};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Integer time unit.
pub trait Time:
    PrimInt + Unsigned + Hash + Debug + Display + FromStr + Default + Send + Sync + Serialize + DeserializeOwned + 'static
{
    /// Lossless widening used by overflow-checked arithmetic and the oracle.
    fn as_u128(self) -> u128 {
        self.to_u128().expect("unsigned primitive fits in u128")
    }

    /// Narrowing conversion; `None` when `v` does not fit.
    fn from_u128(v: u128) -> Option<Self> {
        <Self as num_traits::NumCast>::from(v)
    }

    fn from_u64(v: u64) -> Option<Self> {
        <Self as num_traits::NumCast>::from(v)
    }
}

impl<T> Time for T where
    T: PrimInt
        + Unsigned
        + Hash
        + Debug
        + Display
        + FromStr
        + Default
        + Send
        + Sync
        + Serialize
        + DeserializeOwned
        + 'static
{
}
