//! The admissible opening budget λ and the opening condition.

use serde::Serialize;

use crate::decomposition::{range_subspace, ProjectionFamily, Subspace};
use crate::error::{Error, Result};
use crate::numeric::operator_norm_bound;
use crate::scalar::{lit, Real};

use super::opening::opening;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct LambdaReport<T> {
    pub lambda: T,
    /// `sup_n ‖Σ_{j≤n} Pⱼ‖`
    pub partial_sum_sup: T,
    /// `sup_n ‖Pₙ‖`
    pub block_sup: T,
    /// True when the operator norms are exact; otherwise they are certified
    /// upper bounds and λ is a certified lower bound.
    pub exact: bool,
}

/// `λ = 1 / (4·sup_n‖Σ_{j≤n}Pⱼ‖·(1 + sup_n‖Pₙ‖)²)` in the ambient operator norm.
pub fn lambda_threshold<T: Real>(fam: &ProjectionFamily<T>) -> LambdaReport<T> {
    let norm = &fam.space().norm;
    let partial_sum_sup =
        fam.partial_sums().iter().map(|m| operator_norm_bound(m, norm)).fold(T::zero(), |a, b| a.max(b));
    let block_sup = fam.blocks().iter().map(|m| operator_norm_bound(m, norm)).fold(T::zero(), |a, b| a.max(b));
    let one_plus = T::one() + block_sup;
    LambdaReport {
        lambda: T::one() / (lit::<T>(4.0) * partial_sum_sup * one_plus * one_plus),
        partial_sum_sup,
        block_sup,
        exact: norm.exact_class().is_some(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct OpeningCondition<T> {
    pub openings: Vec<T>,
    /// `(Σ θₙᵖ)^{1/p}`
    pub sum: T,
    pub lambda: T,
    pub satisfied: bool,
}

/// Checks `(Σ θ(𝔐ₙ, 𝔑ₙ)ᵖ)^{1/p} ≤ λ` with `𝔐ₙ` the block ranges.
pub fn check_opening_condition<T: Real>(
    fam: &ProjectionFamily<T>,
    candidates: &[Subspace<T>],
    p: T,
    samples: usize,
    seed: u64,
) -> Result<OpeningCondition<T>> {
    if candidates.len() != fam.len() {
        return Err(Error::Dimension { expected: fam.len(), found: candidates.len() });
    }
    if !(p >= T::one()) {
        return Err(Error::invalid("opening aggregate exponent must be at least 1"));
    }
    let norm = &fam.space().norm;
    let openings = fam
        .blocks()
        .iter()
        .zip(candidates)
        .map(|(pn, cand)| Ok(opening(&range_subspace(pn, fam.space())?, cand, norm, samples, seed)?.theta))
        .collect::<Result<Vec<T>>>()?;
    let sum = if p.is_finite() {
        openings.iter().fold(T::zero(), |s, t| s + t.powf(p)).powf(T::one() / p)
    } else {
        openings.iter().fold(T::zero(), |s, t| s.max(*t))
    };
    let lambda = lambda_threshold(fam).lambda;
    Ok(OpeningCondition { openings, sum, lambda, satisfied: sum <= lambda })
}
