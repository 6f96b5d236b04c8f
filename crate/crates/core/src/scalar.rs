//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_traits::ToPrimitive;
use serde::Serialize;

/// Real floating-point scalar (`f32` or `f64`).
pub trait Real: RealField + ToPrimitive + Copy + Serialize {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts a scalar to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Tolerance floor for `T`: the requested tolerance, but never below a few ulps.
#[inline]
pub fn tol_floor<T: Real>(requested: f64) -> T {
    let eps = T::default_epsilon() * lit(16.0);
    let req: T = lit(requested);
    if req > eps {
        req
    } else {
        eps
    }
}
