//! Geometric constants of decompositions and of the ambient space.

pub mod khintchine;
pub mod rademacher;
pub mod riesz;
pub mod type_cotype;
pub mod unconditional;

pub use khintchine::{haagerup_p0, khintchine_constants, lp_sandwich, KhintchineConstants, LpSandwich, SandwichBranch};
pub use rademacher::{
    min_max_sign_norm, rademacher_average, signed_sum_norm, AveragePower, SignMode, MAX_SIGN_VECTORS,
};
pub use riesz::{besselian_constant, block_ratio, gram_operator, hilbertian_constant, riesz_constant};
pub use type_cotype::{
    or_type_probe, random_vector_sets, type_cotype_check, ProbeKind, ProbeReport, TypeCotypeReport, VIOLATION_TOL,
};
pub use unconditional::{coefficient_patterns, pattern_ratio, unconditional_constant, CoefficientSet};

use nalgebra::DVector;

use crate::decomposition::ProjectionFamily;
use crate::numeric::UnitSphereSampler;
use crate::scalar::Real;

/// Sampled unit vectors followed by the structured probes: coordinate
/// vectors, the all-ones vector and its block components.
pub(crate) fn probe_points<T: Real>(fam: &ProjectionFamily<T>, samples: usize, seed: u64) -> Vec<DVector<T>> {
    let n = fam.dim();
    let mut pts: Vec<DVector<T>> = UnitSphereSampler::new(fam.space().norm.clone(), n, seed).take(samples).collect();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = T::one();
        pts.push(e);
    }
    let ones = DVector::from_element(n, T::one());
    for p in fam.blocks() {
        let v = p * &ones;
        if v.iter().any(|a| *a != T::zero()) {
            pts.push(v);
        }
    }
    pts.push(ones);
    pts
}
