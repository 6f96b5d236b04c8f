//! Reduced minimum modulus `γ(T) = inf ‖Tx‖ / dist(x, ker T)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimate::{ConstantEstimate, Method, Witness};
use crate::numeric::{distance_to_span, maximize, svd, AscentOptions, UnitSphereSampler};
use crate::orlicz::NormSpec;
use crate::scalar::{lit, Real};

/// Singular values below this fraction of the largest span the kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-10;

/// Exact in ℓ₂ (smallest nonzero singular value); otherwise the smallest
/// sampled ratio, an upper bound on `γ`.
pub fn reduced_minimum_modulus<T: Real>(
    t: &DMatrix<T>,
    norm: &NormSpec<T>,
    samples: usize,
    seed: u64,
) -> Result<ConstantEstimate<T>> {
    if !t.is_square() {
        return Err(Error::invalid("reduced minimum modulus needs a square matrix"));
    }
    let n = t.nrows();
    let f = svd(t);
    let top = f.largest();
    if !(top > T::zero()) {
        return Err(Error::Undefined("γ is undefined for the zero operator".into()));
    }
    let cut = top * lit(KERNEL_THRESHOLD);
    let rank = f.singular_values.iter().filter(|s| **s > cut).count();
    if norm.is_euclidean() {
        let v = f.v_t.row(rank - 1).transpose();
        return Ok(ConstantEstimate::new(
            f.singular_values[rank - 1],
            Method::SpectralExact,
            Witness::Vector { vector: v.as_slice().to_vec() },
            1,
        ));
    }
    let kernel: DMatrix<T> = f.v_t.rows(rank, n - rank).transpose();
    let inverse_ratio = |x: &DVector<T>| {
        let tx = norm.norm((t * x).as_slice());
        let d = if kernel.ncols() == 0 { norm.norm(x.as_slice()) } else { distance_to_span(x, &kernel, norm).0 };
        if tx > T::zero() {
            d / tx
        } else {
            T::zero()
        }
    };
    let mut starts: Vec<DVector<T>> = UnitSphereSampler::new(norm.clone(), n, seed).take(samples).collect();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = T::one();
        starts.push(e);
    }
    let trials = starts.len();
    let opts = AscentOptions { restarts: 4, ..AscentOptions::default() };
    let (x, worst) = maximize(inverse_ratio, starts, &opts);
    Ok(ConstantEstimate::new(
        T::one() / worst,
        Method::SampledUpperBound,
        Witness::Vector { vector: x.as_slice().to_vec() },
        trials,
    ))
}
