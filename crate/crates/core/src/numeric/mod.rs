//! Shared numerical services: bracketing root finder, gamma function, dense
//! spectral factorizations, operator norms, unit-sphere sampling and the
//! derivative-free local search used by the sampled constant estimators.

mod gamma;
mod linalg;
mod sampling;
mod search;
mod solver;

pub use gamma::gamma_fn;
pub use linalg::{
    certified_upper_bound, column_sum_norm, invert_with_condition, numerical_rank, operator_norm, operator_norm_bound,
    row_sum_norm, singular_values, spectral_norm, svd, symmetric_spectrum, Inversion, SpectralFactorization,
    SymmetricSpectrum, SINGULAR_CONDITION,
};
pub use sampling::{gaussian_vector, seeded_rng, stream_rng, UnitSphereSampler};
pub use search::{distance_to_span, maximize, AscentOptions};
pub use solver::{Bracket, BracketSolver};

/// Default absolute tolerance.
pub const ABS_TOL: f64 = 1e-12;
/// Default relative tolerance.
pub const REL_TOL: f64 = 1e-9;
