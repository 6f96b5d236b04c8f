use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::numeric::BracketSolver;
use crate::orlicz::NormSpec;
use crate::scalar::{lit, Real};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator number `stream` derived from `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_vector<T: Real, R: rand::Rng>(rng: &mut R, n: usize) -> DVector<T> {
    DVector::from_iterator(
        n,
        (0..n).map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            lit::<T>(g)
        }),
    )
}

/// Deterministic stream of unit vectors of the ambient norm.
///
/// Gaussian directions normalized by the ambient norm. Luxemburg norms are
/// resolved to floating-point precision here so that the samples sit on the
/// sphere to within a few ulps.
pub struct UnitSphereSampler<T: Real> {
    norm: NormSpec<T>,
    dim: usize,
    rng: ChaCha8Rng,
    solver: BracketSolver<T>,
}

impl<T: Real> UnitSphereSampler<T> {
    pub fn new(norm: NormSpec<T>, dim: usize, seed: u64) -> Self {
        UnitSphereSampler { norm, dim, rng: seeded_rng(seed), solver: BracketSolver::exhaustive() }
    }
}

impl<T: Real> Iterator for UnitSphereSampler<T> {
    type Item = DVector<T>;

    fn next(&mut self) -> Option<DVector<T>> {
        if self.dim == 0 {
            return None;
        }
        loop {
            let x: DVector<T> = gaussian_vector(&mut self.rng, self.dim);
            let n = self.norm.norm_with(x.as_slice(), &self.solver);
            if n > T::zero() && n.is_finite() {
                return Some(x / n);
            }
        }
    }
}
