//! Scalar abstraction for the numeric core.
//!
//! Everything downstream (kinetics, right-hand sides, root solves, the
//! integrator) is generic over [`Scalar`] so the same code instantiates at
//! `f64` (the default, see the `*64` aliases at the crate root) or `f32`.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Converts an `f64` literal (tolerances, tableau constants).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert")
    }

    /// Widens to `f64` for diagnostics and error payloads.
    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}

/// Shorthand for `T::lit` usable in expression position.
pub fn lit<T: Scalar>(x: f64) -> T {
    T::lit(x)
}
