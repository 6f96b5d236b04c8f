//! Orlicz norms, projection families in finite-dimensional model spaces, the
//! geometric constants attached to them, and constructive similarity checks
//! for perturbed families.
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the aliases
//! below fix `f64`.

// `!(x > y)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decomposition;
pub mod error;
pub mod estimate;
pub mod geometry;
pub mod io;
pub mod numeric;
pub mod orlicz;
pub mod report;
pub mod scalar;
pub mod scenario;
pub mod stability;
pub mod sweep;

pub use nalgebra;

pub use error::{Error, Result};
pub use estimate::{Method, Witness};
pub use scalar::Real;

pub type Orlicz = orlicz::OrliczFunction<f64>;
pub type Norm = orlicz::NormSpec<f64>;
pub type Space = decomposition::ModelSpace<f64>;
pub type Family = decomposition::ProjectionFamily<f64>;
pub type Span = decomposition::Subspace<f64>;
pub type Estimate = estimate::ConstantEstimate<f64>;
pub type Stability = stability::StabilityReport<f64>;
