//! Scalar abstraction for the numeric core.
//!
//! All estimation, distribution and optimization code is generic over
//! [`Real`], so the same routines run in `f32` or `f64`. Concrete `f64`
//! aliases for the main domain types live at the crate root.

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + serde::Serialize
    + for<'de> serde::Deserialize<'de>
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, for numeric constants in generic code.
    fn of(v: f64) -> Self;

    /// Widening conversion to `f64` (exact for `f32` and `f64`).
    fn as_f64(self) -> f64;

    /// Scalar from a count.
    fn from_count(n: usize) -> Self {
        Self::of(n as f64)
    }
}

impl Real for f32 {
    fn of(v: f64) -> Self {
        v as f32
    }
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Real for f64 {
    fn of(v: f64) -> Self {
        v
    }
    fn as_f64(self) -> f64 {
        self
    }
}

/// Sorts a slice of scalars ascending. Inputs are validated finite upstream,
/// so `partial_cmp` cannot fail.
pub fn sort_ascending<T: Real>(values: &mut [T]) {
    values.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value in sort"));
}
