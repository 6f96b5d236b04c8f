//! Stability of decompositions under perturbation: openings, the λ budget,
//! the perturbation constant ς, and the constructive similarity `S = Σ PₙJₙ`.

pub mod lambda;
pub mod modulus;
pub mod opening;
pub mod sigma;
pub mod similarity;

pub use lambda::{check_opening_condition, lambda_threshold, LambdaReport, OpeningCondition};
pub use modulus::reduced_minimum_modulus;
pub use opening::{opening, OpeningReport};
pub use sigma::{perturbation_blocks, perturbation_sigma, perturbation_sigma_from, sigma_ratio};
pub use similarity::{
    build_similarity, c0_stability_check, hilbertian_stability_check, kato_check, StabilityReport, Verdict, DIRECTION,
    MARGINAL_BAND, SIMILARITY_TOL,
};
