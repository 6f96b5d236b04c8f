//! Riesz, Hilbertian and Besselian constants of a projection family.

use nalgebra::{DMatrix, DVector};

use crate::decomposition::ProjectionFamily;
use crate::error::{Error, Result};
use crate::estimate::{ConstantEstimate, Method, Witness};
use crate::numeric::{maximize, operator_norm_bound, symmetric_spectrum, AscentOptions};
use crate::orlicz::NormSpec;
use crate::scalar::{lit, Real};

use super::probe_points;

/// `G = Σ PₙᵀPₙ`, so that `xᵀGx = Σ‖Pₙx‖₂²`.
pub fn gram_operator<T: Real>(fam: &ProjectionFamily<T>) -> DMatrix<T> {
    let n = fam.dim();
    let mut g = DMatrix::zeros(n, n);
    for p in fam.blocks() {
        g += p.transpose() * p;
    }
    g
}

/// Block-norm profile `(‖Pₙx‖)ₙ` in the ambient norm.
pub fn block_profile<T: Real>(fam: &ProjectionFamily<T>, x: &DVector<T>) -> Vec<T> {
    fam.block_norms(x)
}

/// `‖x‖ / ‖(‖Pₙx‖)ₙ‖_Ψ`; zero when the profile vanishes.
pub fn block_ratio<T: Real>(fam: &ProjectionFamily<T>, psi: &NormSpec<T>, x: &DVector<T>) -> T {
    let agg = psi.norm(&block_profile(fam, x));
    if agg > T::zero() {
        fam.space().norm_of(x) / agg
    } else {
        T::zero()
    }
}

fn require_euclidean<T: Real>(fam: &ProjectionFamily<T>) -> Result<()> {
    if fam.space().norm.is_euclidean() {
        Ok(())
    } else {
        Err(Error::invalid("Riesz constant needs a Euclidean ambient norm"))
    }
}

/// An eigenvalue with its eigenvector.
type Eigenpair<T> = (T, DVector<T>);

fn gram_extremes<T: Real>(fam: &ProjectionFamily<T>) -> Result<(Eigenpair<T>, Eigenpair<T>)> {
    let spec = symmetric_spectrum(&gram_operator(fam));
    let (lo, hi) = (spec.min(), spec.max());
    if !(lo.0 > lit::<T>(1e-14) * hi.0.max(T::one())) {
        return Err(Error::Undefined("Gram operator is singular: the family has no lower quadratic bound".into()));
    }
    Ok((lo, hi))
}

/// `C = max(λ_max(G), 1/λ_min(G))`, the smallest `C` with
/// `‖x‖²/C ≤ Σ‖Pₙx‖² ≤ C‖x‖²`.
///
/// The witness `v` is the extremal eigenvector; `Σ‖Pₙv‖²/‖v‖²` equals the
/// value or its reciprocal.
pub fn riesz_constant<T: Real>(fam: &ProjectionFamily<T>) -> Result<ConstantEstimate<T>> {
    require_euclidean(fam)?;
    let ((lo, vlo), (hi, vhi)) = gram_extremes(fam)?;
    let inv = T::one() / lo;
    let (value, v) = if hi >= inv { (hi, vhi) } else { (inv, vlo) };
    Ok(ConstantEstimate::new(value, Method::SpectralExact, Witness::Vector { vector: v.as_slice().to_vec() }, 1))
}

/// `sup ‖t‖₁ / ‖t‖_Ψ` over `t ∈ ℝᴷ`.
fn l1_over_psi<T: Real>(psi: &NormSpec<T>, k: usize) -> Option<T> {
    let kk: T = lit(k as f64);
    match psi {
        NormSpec::Power { p } => Some(kk.powf(T::one() - T::one() / *p)),
        NormSpec::Max => Some(kk),
        NormSpec::Orlicz { phi } => phi.inverse(T::one()).ok().filter(|v| v.is_finite()).map(|v| kk * v),
    }
}

/// Smallest `C` with `‖x‖ ≤ C·‖(‖Pₙx‖)ₙ‖_Ψ`.
///
/// Exact through `C² = 1/λ_min(G)` for a Euclidean ambient with `Ψ = t²`.
/// Otherwise a sampled lower bound with local ascent, paired with the upper
/// bound `κ_Ψ/(1 − ‖I − ΣPₙ‖)` from `‖x‖ ≤ Σ‖Pₙx‖` when the completeness
/// defect is below one.
pub fn hilbertian_constant<T: Real>(
    fam: &ProjectionFamily<T>,
    psi: &NormSpec<T>,
    samples: usize,
    seed: u64,
) -> Result<ConstantEstimate<T>> {
    if fam.space().norm.is_euclidean() && psi.is_euclidean() {
        let ((lo, v), _) = gram_extremes(fam)?;
        return Ok(ConstantEstimate::new(
            T::one() / lo.sqrt(),
            Method::SpectralExact,
            Witness::Vector { vector: v.as_slice().to_vec() },
            1,
        ));
    }
    let starts = probe_points(fam, samples, seed);
    let trials = starts.len();
    let (x, value) = maximize(|x: &DVector<T>| block_ratio(fam, psi, x), starts, &AscentOptions::default());
    let mut est = ConstantEstimate::new(
        value,
        Method::SampledLowerBound,
        Witness::Vector { vector: x.as_slice().to_vec() },
        trials,
    );
    let n = fam.dim();
    let mut sum = DMatrix::zeros(n, n);
    for p in fam.blocks() {
        sum += p;
    }
    let defect = operator_norm_bound(&(DMatrix::identity(n, n) - sum), &fam.space().norm);
    if let Some(k) = l1_over_psi(psi, fam.len()) {
        if defect < T::one() {
            est = est.with_upper_bound(k / (T::one() - defect));
        }
    }
    Ok(est)
}

/// Largest `c` with `c·‖(‖Pₙx‖)ₙ‖_Ψ ≤ ‖x‖`.
///
/// Exact through `c² = 1/λ_max(G)` for a Euclidean ambient with `Ψ = t²`.
/// Otherwise the smallest sampled ratio, which bounds `c` from above, paired
/// with the lower bound `1/(max‖Pₙ‖·‖(1,…,1)‖_Ψ)`.
pub fn besselian_constant<T: Real>(
    fam: &ProjectionFamily<T>,
    psi: &NormSpec<T>,
    samples: usize,
    seed: u64,
) -> Result<ConstantEstimate<T>> {
    if fam.space().norm.is_euclidean() && psi.is_euclidean() {
        let (_, (hi, v)) = gram_extremes(fam)?;
        return Ok(ConstantEstimate::new(
            T::one() / hi.sqrt(),
            Method::SpectralExact,
            Witness::Vector { vector: v.as_slice().to_vec() },
            1,
        ));
    }
    let starts = probe_points(fam, samples, seed);
    let trials = starts.len();
    let inverse_ratio = |x: &DVector<T>| {
        let r = block_ratio(fam, psi, x);
        if r > T::zero() {
            T::one() / r
        } else {
            T::zero()
        }
    };
    let (x, worst) = maximize(inverse_ratio, starts, &AscentOptions::default());
    let value = if worst > T::zero() { T::one() / worst } else { T::zero() };
    let largest_block =
        fam.blocks().iter().map(|p| operator_norm_bound(p, &fam.space().norm)).fold(T::zero(), |a, b| a.max(b));
    let ones = psi.norm(&vec![T::one(); fam.len()]);
    let mut est = ConstantEstimate::new(
        value,
        Method::SampledUpperBound,
        Witness::Vector { vector: x.as_slice().to_vec() },
        trials,
    );
    if largest_block > T::zero() && ones.is_finite() && ones > T::zero() {
        est = est.with_lower_bound(T::one() / (largest_block * ones));
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{make_coordinate_family, oblique_projection, transport_family, ModelSpace};
    use crate::numeric::{gaussian_vector, invert_with_condition, seeded_rng, spectral_norm};

    fn l2(n: usize) -> ModelSpace<f64> {
        ModelSpace::euclidean(n).unwrap()
    }

    fn circle_extremes(fam: &ProjectionFamily<f64>) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for k in 0..100_000 {
            let t = std::f64::consts::PI * k as f64 / 100_000.0;
            let x = DVector::from_vec(vec![t.cos(), t.sin()]);
            let s: f64 = fam.block_norms(&x).iter().map(|v| v * v).sum();
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (lo, hi)
    }

    fn oblique_pair(angle: f64) -> ProjectionFamily<f64> {
        let b = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let c = DMatrix::from_column_slice(2, 1, &[angle.sin(), -angle.cos()]);
        let p = oblique_projection(&b, &c).unwrap();
        let q = DMatrix::identity(2, 2) - &p;
        ProjectionFamily::from_blocks(l2(2), vec![p, q]).unwrap()
    }

    #[test]
    fn orthogonal_family_is_parseval() {
        let fam = make_coordinate_family(l2(7), &[3, 1, 3]).unwrap();
        let psi = NormSpec::euclidean();
        assert!((riesz_constant(&fam).unwrap().value - 1.0).abs() < 1e-12);
        assert!((hilbertian_constant(&fam, &psi, 0, 0).unwrap().value - 1.0).abs() < 1e-12);
        assert!((besselian_constant(&fam, &psi, 0, 0).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transported_diagonal_matches_circle_grid() {
        // S = diag(1,2) leaves coordinate projections unchanged; use a shear instead
        let fam = make_coordinate_family(l2(2), &[1, 1]).unwrap();
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.0, 2.0]);
        let moved = transport_family(&s, &fam).unwrap();
        let (lo, hi) = circle_extremes(&moved);
        let c = riesz_constant(&moved).unwrap().value;
        let oracle = hi.max(1.0 / lo);
        assert!((c - oracle).abs() < 1e-4 * oracle, "{c} {oracle}");
        let h = hilbertian_constant(&moved, &NormSpec::euclidean(), 0, 0).unwrap().value;
        assert!((h * h - 1.0 / lo).abs() < 1e-4 / lo);
        let b = besselian_constant(&moved, &NormSpec::euclidean(), 0, 0).unwrap().value;
        assert!((b * b - 1.0 / hi).abs() < 1e-4 / hi);
    }

    #[test]
    fn oblique_besselian_square_is_reciprocal_top_eigenvalue() {
        for deg in [15.0f64, 40.0, 75.0] {
            let fam = oblique_pair(deg.to_radians());
            let (_, hi) = circle_extremes(&fam);
            let c = besselian_constant(&fam, &NormSpec::euclidean(), 0, 0).unwrap().value;
            assert!((c * c - 1.0 / hi).abs() < 1e-6, "{deg}: {} vs {}", c * c, 1.0 / hi);
        }
    }

    #[test]
    fn riesz_grows_toward_degeneracy() {
        let mut last = 1.0;
        for deg in [80.0f64, 60.0, 40.0, 20.0, 10.0, 5.0] {
            let c = riesz_constant(&oblique_pair(deg.to_radians())).unwrap().value;
            assert!(c > last, "{deg}: {c} <= {last}");
            last = c;
        }
    }

    #[test]
    fn riesz_bounded_by_condition_squared() {
        let mut rng = seeded_rng(12);
        let fam = make_coordinate_family(l2(6), &[2, 2, 2]).unwrap();
        for _ in 0..10 {
            let t: DVector<f64> = gaussian_vector(&mut rng, 36);
            let s = DMatrix::identity(6, 6) + DMatrix::from_column_slice(6, 6, t.as_slice()) * 0.2;
            let kappa = invert_with_condition(&s).unwrap().condition;
            let moved = transport_family(&s, &fam).unwrap();
            assert!(riesz_constant(&moved).unwrap().value <= kappa * kappa * (1.0 + 1e-10));
        }
    }

    #[test]
    fn witnesses_reevaluate() {
        let fam = oblique_pair(0.6);
        let r = riesz_constant(&fam).unwrap();
        let v = DVector::from_column_slice(r.witness.vector().unwrap());
        let q: f64 = fam.block_norms(&v).iter().map(|a| a * a).sum::<f64>() / v.norm_squared();
        assert!((q - r.value).abs() < 1e-8 * r.value || (1.0 / q - r.value).abs() < 1e-8 * r.value);
        let psi = NormSpec::euclidean();
        for est in [hilbertian_constant(&fam, &psi, 0, 0).unwrap(), besselian_constant(&fam, &psi, 0, 0).unwrap()] {
            let v = DVector::from_column_slice(est.witness.vector().unwrap());
            assert!((block_ratio(&fam, &psi, &v) - est.value).abs() < 1e-8 * est.value);
        }
    }

    #[test]
    fn non_euclidean_riesz_rejected() {
        let space = ModelSpace::new(2, NormSpec::power(1.0).unwrap()).unwrap();
        let fam = make_coordinate_family(space, &[1, 1]).unwrap();
        assert!(riesz_constant(&fam).is_err());
    }

    #[test]
    fn every_family_is_one_hilbertian() {
        let mut rng = seeded_rng(4);
        for norm in [NormSpec::euclidean(), NormSpec::power(3.0).unwrap(), NormSpec::Max] {
            let b: DVector<f64> = gaussian_vector(&mut rng, 8);
            let c: DVector<f64> = gaussian_vector(&mut rng, 8);
            let p = oblique_projection(
                &DMatrix::from_column_slice(4, 2, b.as_slice()),
                &DMatrix::from_column_slice(4, 2, c.as_slice()),
            )
            .unwrap();
            let q = DMatrix::identity(4, 4) - &p;
            let fam = ProjectionFamily::from_blocks(ModelSpace::new(4, norm).unwrap(), vec![p, q]).unwrap();
            let h = hilbertian_constant(&fam, &NormSpec::power(1.0).unwrap(), 64, 2).unwrap();
            assert!(h.value <= 1.0 + 1e-9, "{}", h.value);
            assert!(h.upper_bound.unwrap() <= 1.0 + 1e-9);
            // every decomposition is ∞-Besselian with c ≥ 1/max‖Pₙ‖
            let b = besselian_constant(&fam, &NormSpec::Max, 64, 2).unwrap();
            let bound = b.lower_bound.unwrap();
            assert!(b.value >= bound * (1.0 - 1e-9));
            let top = fam.blocks().iter().map(spectral_norm).fold(0.0, f64::max);
            if fam.space().norm.is_euclidean() {
                assert!((bound - 1.0 / top).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn l1_coordinates_with_max_aggregate() {
        // ‖x‖₁ / max‖Pₙx‖₁ peaks at K when all block masses are equal
        for k in [2usize, 3, 5] {
            let space = ModelSpace::new(2 * k, NormSpec::power(1.0).unwrap()).unwrap();
            let fam = make_coordinate_family(space, &vec![2; k]).unwrap();
            let h = hilbertian_constant(&fam, &NormSpec::Max, 32, 5).unwrap();
            assert!((h.value - k as f64).abs() < 1e-6, "{k}: {}", h.value);
            assert_eq!(h.upper_bound, Some(k as f64));
            let uniform = DVector::from_element(2 * k, 1.0);
            assert!((block_ratio(&fam, &NormSpec::Max, &uniform) - k as f64).abs() < 1e-12);
        }
    }
}
