//! The perturbation constant ς of a pair of projection families.

use nalgebra::{DMatrix, DVector};

use crate::decomposition::ProjectionFamily;
use crate::error::{Error, Result};
use crate::estimate::{ConstantEstimate, Method, Witness};
use crate::numeric::{maximize, operator_norm, operator_norm_bound, symmetric_spectrum, AscentOptions};
use crate::orlicz::{ExactClass, NormSpec};
use crate::scalar::Real;

use crate::geometry::probe_points;

/// `Aₙ = Pₙ(Jₙ − Pₙ)` for `n ≥ first`.
pub fn perturbation_blocks<T: Real>(
    p: &ProjectionFamily<T>,
    j: &ProjectionFamily<T>,
    first: usize,
) -> Result<Vec<DMatrix<T>>> {
    if p.dim() != j.dim() {
        return Err(Error::Dimension { expected: p.dim(), found: j.dim() });
    }
    if p.len() != j.len() {
        return Err(Error::Dimension { expected: p.len(), found: j.len() });
    }
    Ok(p.blocks().iter().zip(j.blocks()).skip(first).map(|(pn, jn)| pn * (jn - pn)).collect())
}

/// `sup_{‖x‖=1} ‖(‖Pₙ(Jₙ − Pₙ)x‖)_{n≥1}‖_Ψ`.
pub fn perturbation_sigma<T: Real>(
    p: &ProjectionFamily<T>,
    j: &ProjectionFamily<T>,
    psi: &NormSpec<T>,
    samples: usize,
    seed: u64,
) -> Result<ConstantEstimate<T>> {
    perturbation_sigma_from(p, j, psi, 1, samples, seed)
}

/// [`perturbation_sigma`] with the blocks `n ≥ first` in the aggregate.
///
/// Exact for a Euclidean ambient with `Ψ = t²` (`ς² = λ_max(Σ AₙᵀAₙ)`) and
/// for `Ψ = max` over ℓ₂, ℓ₁ or max-norm ambients (`ς = maxₙ ‖Aₙ‖`).
/// Otherwise a sampled lower bound with a certified upper bound.
pub fn perturbation_sigma_from<T: Real>(
    p: &ProjectionFamily<T>,
    j: &ProjectionFamily<T>,
    psi: &NormSpec<T>,
    first: usize,
    samples: usize,
    seed: u64,
) -> Result<ConstantEstimate<T>> {
    let blocks = perturbation_blocks(p, j, first)?;
    let n = p.dim();
    let ambient = &p.space().norm;
    if blocks.is_empty() {
        return Ok(ConstantEstimate::new(T::zero(), Method::ExactEnumeration, Witness::None, 0));
    }
    if ambient.is_euclidean() && psi.is_euclidean() {
        let mut g = DMatrix::zeros(n, n);
        for a in &blocks {
            g += a.transpose() * a;
        }
        let (top, v) = symmetric_spectrum(&g).max();
        return Ok(ConstantEstimate::new(
            top.max(T::zero()).sqrt(),
            Method::SpectralExact,
            Witness::Vector { vector: v.as_slice().to_vec() },
            1,
        ));
    }
    if let (Some(class), NormSpec::Max) = (ambient.exact_class(), psi) {
        let (value, witness) = blocks
            .iter()
            .map(|a| operator_norm(a, ambient, 0, seed))
            .map(|e| (e.value, e.witness))
            .reduce(|a, b| if b.0 > a.0 { b } else { a })
            .expect("nonempty");
        let method = if class == ExactClass::L2 { Method::SpectralExact } else { Method::ExactEnumeration };
        return Ok(ConstantEstimate::new(value, method, witness, blocks.len()));
    }
    let starts = probe_points(p, samples, seed);
    let trials = starts.len();
    let f = |x: &DVector<T>| {
        let nx = ambient.norm(x.as_slice());
        if !(nx > T::zero()) {
            return T::zero();
        }
        let profile: Vec<T> = blocks.iter().map(|a| ambient.norm((a * x).as_slice())).collect();
        psi.norm(&profile) / nx
    };
    let (x, value) = maximize(f, starts, &AscentOptions::default());
    let bounds: Vec<T> = blocks.iter().map(|a| operator_norm_bound(a, ambient)).collect();
    let ones = psi.norm(&vec![T::one(); bounds.len()]);
    let mut single = vec![T::zero(); bounds.len()];
    single[0] = T::one();
    let unit = psi.norm(&single);
    let top = bounds.iter().fold(T::zero(), |a, b| a.max(*b));
    let sum = bounds.iter().fold(T::zero(), |a, b| a + *b);
    Ok(ConstantEstimate::new(
        value,
        Method::SampledLowerBound,
        Witness::Vector { vector: x.as_slice().to_vec() },
        trials,
    )
    .with_upper_bound((top * ones).min(sum * unit)))
}

/// `‖(‖Aₙx‖)ₙ‖_Ψ / ‖x‖` for a witness re-evaluation.
pub fn sigma_ratio<T: Real>(
    p: &ProjectionFamily<T>,
    j: &ProjectionFamily<T>,
    psi: &NormSpec<T>,
    first: usize,
    x: &DVector<T>,
) -> Result<T> {
    let ambient = &p.space().norm;
    let blocks = perturbation_blocks(p, j, first)?;
    let profile: Vec<T> = blocks.iter().map(|a| ambient.norm((a * x).as_slice())).collect();
    Ok(psi.norm(&profile) / ambient.norm(x.as_slice()))
}
