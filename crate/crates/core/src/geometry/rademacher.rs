//! Exact averages and extremes of `‖Σ εⱼxⱼ‖` over all sign patterns.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{ConstantEstimate, Method, Witness};
use crate::orlicz::NormSpec;
use crate::scalar::{lit, Real};

/// Largest number of vectors whose sign patterns are enumerated.
pub const MAX_SIGN_VECTORS: usize = 24;

const CHUNK_BITS: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AveragePower {
    /// `𝔼‖Σ εⱼxⱼ‖`
    Mean,
    /// `(𝔼‖Σ εⱼxⱼ‖²)^{1/2}`
    Quadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignMode {
    Min,
    Max,
}

struct SignStats<T> {
    sum: T,
    sum_sq: T,
    min: (T, u64),
    max: (T, u64),
}

impl<T: Real> SignStats<T> {
    fn merge(self, other: Self) -> Self {
        let pick_min = if other.min.0 < self.min.0 { other.min } else { self.min };
        let pick_max = if other.max.0 > self.max.0 { other.max } else { self.max };
        SignStats { sum: self.sum + other.sum, sum_sq: self.sum_sq + other.sum_sq, min: pick_min, max: pick_max }
    }
}

fn check_vectors<T: Real>(vectors: &[DVector<T>]) -> Result<usize> {
    if vectors.len() > MAX_SIGN_VECTORS {
        return Err(Error::Budget { requested: vectors.len(), limit: MAX_SIGN_VECTORS });
    }
    let dim = vectors.first().map_or(0, |v| v.len());
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::Dimension { expected: dim, found: v.len() });
    }
    Ok(dim)
}

/// Walks the patterns with `ε₀ = +1` (the norm is even in the signs) in
/// Gray-code order, one fixed-size chunk per task; chunk results are merged
/// in index order so the outcome does not depend on scheduling.
fn sign_stats<T: Real>(vectors: &[DVector<T>], norm: &NormSpec<T>, dim: usize) -> SignStats<T> {
    let free = vectors.len().saturating_sub(1) as u32;
    let total: u64 = 1 << free;
    let chunk: u64 = 1 << CHUNK_BITS.min(free);
    let chunks = total / chunk;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let gray0 = start ^ (start >> 1);
            let mut acc = DVector::<T>::zeros(dim);
            if let Some(v0) = vectors.first() {
                acc += v0;
            }
            for (j, v) in vectors.iter().enumerate().skip(1) {
                if gray0 >> (j - 1) & 1 == 1 {
                    acc -= v;
                } else {
                    acc += v;
                }
            }
            let mut gray = gray0;
            let mut stats: Option<SignStats<T>> = None;
            for k in start..start + chunk {
                if k > start {
                    let bit = (k.trailing_zeros()) as usize;
                    gray ^= 1 << bit;
                    let v = &vectors[bit + 1];
                    if gray >> bit & 1 == 1 {
                        acc.axpy(-lit::<T>(2.0), v, T::one());
                    } else {
                        acc.axpy(lit::<T>(2.0), v, T::one());
                    }
                }
                let n = norm.norm(acc.as_slice());
                let s = SignStats { sum: n, sum_sq: n * n, min: (n, gray), max: (n, gray) };
                stats = Some(match stats {
                    None => s,
                    Some(prev) => prev.merge(s),
                });
            }
            stats.expect("chunks are nonempty")
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(SignStats::merge)
        .expect("at least one chunk")
}

fn signs_of(pattern: u64, n: usize) -> Vec<i8> {
    (0..n).map(|j| if j > 0 && pattern >> (j - 1) & 1 == 1 { -1 } else { 1 }).collect()
}

/// `𝔼‖Σ εⱼxⱼ‖` or its quadratic counterpart, exactly over all `2ⁿ` patterns.
pub fn rademacher_average<T: Real>(vectors: &[DVector<T>], norm: &NormSpec<T>, power: AveragePower) -> Result<T> {
    let dim = check_vectors(vectors)?;
    if vectors.is_empty() {
        return Ok(T::zero());
    }
    let stats = sign_stats(vectors, norm, dim);
    let count: T = lit((1u64 << (vectors.len() - 1)) as f64);
    Ok(match power {
        AveragePower::Mean => stats.sum / count,
        AveragePower::Quadratic => (stats.sum_sq / count).sqrt(),
    })
}

/// `min` or `max` of `‖Σ εⱼxⱼ‖` over all sign patterns, with the achieving pattern.
pub fn min_max_sign_norm<T: Real>(
    vectors: &[DVector<T>],
    norm: &NormSpec<T>,
    mode: SignMode,
) -> Result<ConstantEstimate<T>> {
    let dim = check_vectors(vectors)?;
    if vectors.is_empty() {
        return Ok(ConstantEstimate::new(T::zero(), Method::ExactEnumeration, Witness::Signs { signs: vec![] }, 1));
    }
    let stats = sign_stats(vectors, norm, dim);
    let (value, pattern) = match mode {
        SignMode::Min => stats.min,
        SignMode::Max => stats.max,
    };
    let trials = 1usize << (vectors.len() - 1);
    let signs = signs_of(pattern, vectors.len());
    // the enumeration updates sums incrementally; report the direct sum
    let value = signed_sum_norm(vectors, &signs, norm).unwrap_or(value);
    Ok(ConstantEstimate::new(value, Method::ExactEnumeration, Witness::Signs { signs }, trials))
}

/// `‖Σ εⱼxⱼ‖` for an explicit sign pattern.
pub fn signed_sum_norm<T: Real>(vectors: &[DVector<T>], signs: &[i8], norm: &NormSpec<T>) -> Result<T> {
    let dim = check_vectors(vectors)?;
    if signs.len() != vectors.len() {
        return Err(Error::Dimension { expected: vectors.len(), found: signs.len() });
    }
    let mut acc = DVector::<T>::zeros(dim);
    for (v, &s) in vectors.iter().zip(signs) {
        if s < 0 {
            acc -= v;
        } else {
            acc += v;
        }
    }
    Ok(norm.norm(acc.as_slice()))
}
