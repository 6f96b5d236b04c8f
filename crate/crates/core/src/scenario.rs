//! Generated instances: random transports of a family, rotated range
//! candidates, and line pairs at a prescribed angle.

use nalgebra::{DMatrix, DVector};

use crate::decomposition::{range_subspace, transport_family, ModelSpace, ProjectionFamily, Subspace};
use crate::error::{Error, Result};
use crate::numeric::{gaussian_vector, seeded_rng, stream_rng};
use crate::orlicz::NormSpec;
use crate::scalar::{lit, Real};

/// `I + ε·T/√N` with `T` a standard Gaussian matrix drawn from `seed`.
pub fn random_perturbation<T: Real>(n: usize, epsilon: T, seed: u64) -> DMatrix<T> {
    let g: DVector<T> = gaussian_vector(&mut seeded_rng(seed), n * n);
    let scale = epsilon / lit::<T>(n as f64).sqrt();
    DMatrix::identity(n, n) + DMatrix::from_column_slice(n, n, g.as_slice()) * scale
}

/// `Jₙ = S Pₙ S⁻¹` with `S = I + ε·T/√N`. Returns `S` and the moved family.
pub fn random_transport<T: Real>(
    fam: &ProjectionFamily<T>,
    epsilon: T,
    seed: u64,
) -> Result<(DMatrix<T>, ProjectionFamily<T>)> {
    if !(epsilon >= T::zero()) || !epsilon.is_finite() {
        return Err(Error::invalid("epsilon must be finite and nonnegative"));
    }
    let s = random_perturbation(fam.dim(), epsilon, seed);
    let moved = transport_family(&s, fam)?;
    Ok((s, moved))
}

/// For each block, its range with the first basis vector rotated by
/// `angles[n]` toward a random direction orthogonal to the range.
///
/// In ℓ₂ the opening between the range and the candidate is `sin(angles[n])`.
/// Blocks of full rank cannot be rotated and require angle 0.
pub fn rotated_candidates<T: Real>(fam: &ProjectionFamily<T>, angles: &[T], seed: u64) -> Result<Vec<Subspace<T>>> {
    if angles.len() != fam.len() {
        return Err(Error::Dimension { expected: fam.len(), found: angles.len() });
    }
    let n = fam.dim();
    fam.blocks()
        .iter()
        .zip(angles)
        .enumerate()
        .map(|(i, (block, &alpha))| {
            let range = range_subspace(block, fam.space())?;
            if alpha == T::zero() {
                return Ok(range);
            }
            let q = range.basis();
            if q.ncols() == 0 || q.ncols() == n {
                return Err(Error::invalid(format!("block {i} has no room to rotate its range")));
            }
            let mut rng = stream_rng(seed, i as u64);
            let mut u: DVector<T> = gaussian_vector(&mut rng, n);
            // twice for numerical orthogonality
            for _ in 0..2 {
                u -= q * (q.transpose() * &u);
            }
            u /= u.norm();
            let mut spanning = q.clone();
            let turned = q.column(0) * alpha.cos() + u * alpha.sin();
            spanning.set_column(0, &turned);
            Subspace::new(fam.space().clone(), &spanning)
        })
        .collect()
}

/// Lines `span(e₀)` and `span(cos α e₀ + sin α e₁)` in a two-dimensional
/// ambient with the given norm.
pub fn line_pair<T: Real>(alpha: T, norm: NormSpec<T>) -> Result<(Subspace<T>, Subspace<T>)> {
    let space = ModelSpace::new(2, norm)?;
    let a = DMatrix::from_column_slice(2, 1, &[T::one(), T::zero()]);
    let b = DMatrix::from_column_slice(2, 1, &[alpha.cos(), alpha.sin()]);
    Ok((Subspace::new(space.clone(), &a)?, Subspace::new(space, &b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{make_coordinate_family, validate_family, ValidationOptions};
    use crate::stability::opening;

    #[test]
    fn zero_epsilon_is_identity() {
        let fam = make_coordinate_family(ModelSpace::<f64>::euclidean(5).unwrap(), &[2, 3]).unwrap();
        let (s, moved) = random_transport(&fam, 0.0, 4).unwrap();
        assert_eq!(s, DMatrix::identity(5, 5));
        assert_eq!(moved, fam);
        assert!(random_transport(&fam, -1.0, 4).is_err());
    }

    #[test]
    fn transport_keeps_a_valid_family() {
        let fam = make_coordinate_family(ModelSpace::<f64>::euclidean(8).unwrap(), &[2, 2, 4]).unwrap();
        let (_, moved) = random_transport(&fam, 0.05, 11).unwrap();
        let rep = validate_family(&moved, ValidationOptions::with_tolerance(1e-10));
        assert!(rep.passed, "{}", rep.summary());
        assert_eq!(moved.ranks(), fam.ranks());
    }

    #[test]
    fn rotation_sets_the_euclidean_opening() {
        let fam = make_coordinate_family(ModelSpace::<f64>::euclidean(6).unwrap(), &[2, 2, 2]).unwrap();
        let angles = [0.0, 0.3, 1.1];
        let cands = rotated_candidates(&fam, &angles, 5).unwrap();
        for (n, alpha) in angles.iter().enumerate() {
            let range = range_subspace(fam.block(n), fam.space()).unwrap();
            let th = opening(&range, &cands[n], &NormSpec::euclidean(), 0, 0).unwrap().theta;
            assert!((th - alpha.sin()).abs() < 1e-12, "{n}: {th}");
        }
    }

    #[test]
    fn line_pair_opening() {
        let (a, b) = line_pair(0.4f64, NormSpec::euclidean()).unwrap();
        let th = opening(&a, &b, &NormSpec::euclidean(), 0, 0).unwrap().theta;
        assert!((th - 0.4f64.sin()).abs() < 1e-14);
    }
}
