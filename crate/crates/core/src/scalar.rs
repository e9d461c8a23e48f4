//! Scalar abstraction shared by the cost models.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the analytic models are written against.
///
/// Implemented for `f32` and `f64`. Counts (gates, qubits, braid steps) stay
/// integral; only probabilities, expectations and physical quantities are
/// generic.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal or config value. Panics only if the target
    /// type cannot represent it at all, which never happens for f32/f64.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 value representable in scalar type")
    }

    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `self <= other` up to a few units of relative rounding.
    #[inline]
    fn le_rel(self, other: Self) -> bool {
        let tol = Self::epsilon() * Self::lit(16.0);
        self <= other + other.abs() * tol
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Rounds half away from zero and converts to a count. Negative or NaN
/// inputs map to zero.
pub fn round_count<T: Real>(x: T) -> u64 {
    if !(x > T::zero()) {
        return 0;
    }
    (x + T::lit(0.5)).floor().to_u64().unwrap_or(u64::MAX)
}

/// Ceiling to a count; saturates at `u64::MAX`.
pub fn ceil_count<T: Real>(x: T) -> u64 {
    if !(x > T::zero()) {
        return 0;
    }
    x.ceil().to_u64().unwrap_or(u64::MAX)
}
