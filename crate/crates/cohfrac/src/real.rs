//! Scalar abstraction for the floating-point types supported by the crate.

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the library.
///
/// Implemented for `f32` and `f64`. All core math is written against this
/// trait; the `f64` aliases at the crate root fix the usual choice.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + core::fmt::Debug
    + core::fmt::Display
    + core::iter::Sum
    + core::ops::AddAssign
    + core::ops::SubAssign
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy view as `f64`, for diagnostics and output formatting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar type.
pub(crate) fn scalar<F: Real>(v: f64) -> F {
    F::from_f64(v).expect("constant not representable in scalar type")
}
