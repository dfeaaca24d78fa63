//! Floating-point abstraction used across the crate.
//!
//! Everything geometric (layouts, k-means, scores) is generic over [`Scalar`]
//! so the same code runs in `f32` or `f64`. The crate root exports `f64`
//! aliases for the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::distributions::uniform::SampleUniform;

/// Floating-point scalar the geometry and metric code is generic over.
///
/// Implemented for `f32` and `f64`. The bounds cover arithmetic
/// (`Float + NumAssign + Sum`), conversions to and from primitives,
/// uniform sampling, and the marker traits needed to move work across
/// threads.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + SampleUniform
    + Sum
    + Send
    + Sync
    + Display
    + Debug
    + Default
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an `f64` constant into `F`.
///
/// Infallible for the provided `f32`/`f64` impls; the panic only fires if a
/// future exotic scalar cannot represent the value at all.
pub(crate) fn cast<F: Scalar>(value: f64) -> F {
    F::from_f64(value).expect("f64 constant not representable in scalar type")
}

/// Convert a count into `F` (rounding for huge counts in `f32`).
pub(crate) fn cast_usize<F: Scalar>(count: usize) -> F {
    F::from_usize(count).expect("count not representable in scalar type")
}
