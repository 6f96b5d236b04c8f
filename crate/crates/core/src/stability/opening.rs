//! Openings (gap distances) between subspaces.

use nalgebra::DVector;
use serde::Serialize;

use crate::decomposition::Subspace;
use crate::error::{Error, Result};
use crate::estimate::Method;
use crate::numeric::{distance_to_span, gaussian_vector, maximize, seeded_rng, svd, AscentOptions};
use crate::orlicz::NormSpec;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct OpeningReport<T> {
    pub theta: T,
    /// `sup_{x∈A, ‖x‖=1} dist(x, B)`
    pub direction_ab: T,
    /// `sup_{y∈B, ‖y‖=1} dist(y, A)`
    pub direction_ba: T,
    pub witness_a: Vec<T>,
    pub witness_b: Vec<T>,
    pub method: Method,
}

/// `sup_{x∈A, ‖x‖=1} dist(x, B)` and a unit vector of `A` achieving it.
fn directional<T: Real>(
    a: &Subspace<T>,
    b: &Subspace<T>,
    norm: &NormSpec<T>,
    samples: usize,
    seed: u64,
) -> (T, Vec<T>, Method) {
    let qa = a.basis();
    if norm.is_euclidean() {
        let resid = (nalgebra::DMatrix::identity(qa.nrows(), qa.nrows()) - b.orthogonal_projector()) * qa;
        let f = svd(&resid);
        let x = qa * f.v_t.row(0).transpose();
        return (f.largest(), x.as_slice().to_vec(), Method::SpectralExact);
    }
    let qb = b.basis();
    let ratio = |c: &DVector<T>| {
        let x = qa * c;
        let nx = norm.norm(x.as_slice());
        if nx > T::zero() {
            distance_to_span(&x, qb, norm).0 / nx
        } else {
            T::zero()
        }
    };
    let r = qa.ncols();
    let mut rng = seeded_rng(seed);
    let mut starts: Vec<DVector<T>> = (0..samples).map(|_| gaussian_vector(&mut rng, r)).collect();
    for i in 0..r {
        let mut e = DVector::zeros(r);
        e[i] = T::one();
        starts.push(e);
    }
    let opts = AscentOptions { restarts: 4, ..AscentOptions::default() };
    let (c, value) = maximize(ratio, starts, &opts);
    let x = qa * &c;
    let nx = norm.norm(x.as_slice());
    (value, (x / nx).as_slice().to_vec(), Method::SampledLowerBound)
}

/// `θ(A, B) = max(sup_{x∈A} dist(x, B), sup_{y∈B} dist(y, A))` over unit vectors.
///
/// Exact in ℓ₂ through the singular values of `(I − Q_B Q_Bᵀ) Q_A`; in other
/// norms each direction is maximized from `samples` random starts with inner
/// distances solved by compass search. Equal spans give exactly zero.
pub fn opening<T: Real>(
    a: &Subspace<T>,
    b: &Subspace<T>,
    norm: &NormSpec<T>,
    samples: usize,
    seed: u64,
) -> Result<OpeningReport<T>> {
    if a.space().dim != b.space().dim {
        return Err(Error::Dimension { expected: a.space().dim, found: b.space().dim });
    }
    if a.same_span(b) {
        let method = if norm.is_euclidean() { Method::SpectralExact } else { Method::ExactEnumeration };
        let w = a.basis().column(0).into_owned();
        let w = &w / norm.norm(w.as_slice());
        return Ok(OpeningReport {
            theta: T::zero(),
            direction_ab: T::zero(),
            direction_ba: T::zero(),
            witness_a: w.as_slice().to_vec(),
            witness_b: w.as_slice().to_vec(),
            method,
        });
    }
    let (ab, wa, method) = directional(a, b, norm, samples, seed);
    let (ba, wb, _) = directional(b, a, norm, samples, seed);
    Ok(OpeningReport { theta: ab.max(ba), direction_ab: ab, direction_ba: ba, witness_a: wa, witness_b: wb, method })
}
