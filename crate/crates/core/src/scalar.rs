//! Scalar abstraction for the numeric kernel.
//!
//! Everything numeric is generic over [`Scalar`] so the same code path can
//! train in `f32` and be gradient-checked against finite differences in
//! `f64`. Only the two float primitives implement it.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};
use rand::distributions::uniform::SampleUniform;

pub trait Scalar:
    Float
    + NumAssignOps
    + FromPrimitive
    + ToPrimitive
    + SampleUniform
    + Sum
    + Display
    + Debug
    + FromStr<Err = std::num::ParseFloatError>
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; used for config constants and literals.
    fn lit(v: f64) -> Self {
        Self::from(v).expect("finite f64 converts to any Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
