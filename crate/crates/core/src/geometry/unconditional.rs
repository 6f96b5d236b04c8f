//! Unconditionality constants: the smallest `M` with
//! `‖Σ βᵢyᵢ‖ ≤ M‖Σ yᵢ‖` for `yᵢ` in the block ranges and `β` from a
//! coefficient set.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::ProjectionFamily;
use crate::error::{Error, Result};
use crate::estimate::{ConstantEstimate, Method, Witness};
use crate::numeric::{certified_upper_bound, maximize, operator_norm, AscentOptions, UnitSphereSampler};
use crate::orlicz::ExactClass;
use crate::scalar::{lit, Real};

pub const MAX_UNCONDITIONAL_BLOCKS: usize = 20;

/// Points per axis of the discretized coefficient interval `[-1, 1]`.
pub const GRID_POINTS: usize = 17;

/// Full grid enumeration is used up to this many patterns.
const FULL_GRID_LIMIT: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientSet {
    /// `βᵢ ∈ {0, 1}`. Complementary masks are both enumerated, so this also
    /// covers the split-sum form `‖Σ_{i∈I} yᵢ‖ ≤ M‖Σ yᵢ‖`.
    ZeroOne,
    /// `βᵢ ∈ {−1, 1}`.
    Signs,
    /// `βᵢ` on a uniform 17-point grid of `[−1, 1]`.
    UnitDiscGrid,
}

impl CoefficientSet {
    pub fn as_str(self) -> &'static str {
        match self {
            CoefficientSet::ZeroOne => "zero-one",
            CoefficientSet::Signs => "signs",
            CoefficientSet::UnitDiscGrid => "unit-disc-grid",
        }
    }
}

impl std::str::FromStr for CoefficientSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero-one" => Ok(CoefficientSet::ZeroOne),
            "signs" => Ok(CoefficientSet::Signs),
            "unit-disc-grid" | "grid" => Ok(CoefficientSet::UnitDiscGrid),
            other => Err(Error::invalid(format!("unknown coefficient set {other:?}"))),
        }
    }
}

/// Coefficient patterns to evaluate for a set over `k` blocks.
///
/// Patterns equal up to a global sign give the same value and only one is
/// kept. When the full grid is too large, its `±1` vertices together with the
/// `{0,1}` masks are used: `β ↦ ‖Σ βᵢPᵢx‖` is convex, so its maximum over the
/// grid is attained at a vertex.
pub fn coefficient_patterns<T: Real>(set: CoefficientSet, k: usize) -> Result<Vec<Vec<T>>> {
    if k == 0 {
        return Err(Error::invalid("family has no blocks"));
    }
    if k > MAX_UNCONDITIONAL_BLOCKS {
        return Err(Error::Budget { requested: k, limit: MAX_UNCONDITIONAL_BLOCKS });
    }
    let zero_one = || -> Vec<Vec<T>> {
        (1u64..1 << k).map(|m| (0..k).map(|i| if m >> i & 1 == 1 { T::one() } else { T::zero() }).collect()).collect()
    };
    let signs = || -> Vec<Vec<T>> {
        (0u64..1 << (k - 1))
            .map(|m| (0..k).map(|i| if i > 0 && m >> (i - 1) & 1 == 1 { -T::one() } else { T::one() }).collect())
            .collect()
    };
    Ok(match set {
        CoefficientSet::ZeroOne => zero_one(),
        CoefficientSet::Signs => signs(),
        CoefficientSet::UnitDiscGrid => {
            let g = GRID_POINTS as u64;
            match g.checked_pow(k as u32) {
                Some(total) if total <= FULL_GRID_LIMIT => {
                    let step: T = lit(2.0 / (GRID_POINTS - 1) as f64);
                    (0..total)
                        .map(|mut idx| {
                            (0..k)
                                .map(|_| {
                                    let d = idx % g;
                                    idx /= g;
                                    -T::one() + step * lit(d as f64)
                                })
                                .collect()
                        })
                        .collect()
                }
                _ => {
                    let mut all = signs();
                    all.extend(zero_one());
                    all
                }
            }
        }
    })
}

fn combination<T: Real>(fam: &ProjectionFamily<T>, beta: &[T]) -> DMatrix<T> {
    let n = fam.dim();
    let mut m = DMatrix::zeros(n, n);
    for (b, p) in beta.iter().zip(fam.blocks()) {
        if *b != T::zero() {
            m += p * *b;
        }
    }
    m
}

/// `‖Σ βᵢPᵢx‖ / ‖Σ Pᵢx‖` in the ambient norm.
pub fn pattern_ratio<T: Real>(fam: &ProjectionFamily<T>, beta: &[T], x: &DVector<T>) -> T {
    let norm = &fam.space().norm;
    let top = norm.norm((combination(fam, beta) * x).as_slice());
    let all = vec![T::one(); fam.len()];
    let bottom = norm.norm((combination(fam, &all) * x).as_slice());
    if bottom > T::zero() {
        top / bottom
    } else {
        T::zero()
    }
}

/// Smallest `M` over the coefficient set.
///
/// Coefficient patterns are always enumerated. In ℓ₂, ℓ₁ and max-norm
/// ambients each pattern's supremum over vectors is an exact operator norm;
/// otherwise it is a lower bound from `samples` sphere points refined by local
/// ascent, and a certified upper bound is attached.
pub fn unconditional_constant<T: Real>(
    fam: &ProjectionFamily<T>,
    set: CoefficientSet,
    samples: usize,
    seed: u64,
) -> Result<ConstantEstimate<T>> {
    let patterns = coefficient_patterns::<T>(set, fam.len())?;
    let norm = fam.space().norm.clone();
    let dim = fam.dim();
    match norm.exact_class() {
        Some(class) => {
            let scored: Vec<(T, Vec<T>)> = patterns
                .par_iter()
                .map(|beta| {
                    let est = operator_norm(&combination(fam, beta), &norm, 0, seed);
                    (est.value, est.witness.vector().map(<[T]>::to_vec).unwrap_or_default())
                })
                .collect();
            let (best, (value, vector)) = scored
                .into_iter()
                .enumerate()
                .reduce(|a, b| if b.1 .0 > a.1 .0 { b } else { a })
                .expect("at least one pattern");
            let method = if class == ExactClass::L2 { Method::SpectralExact } else { Method::ExactEnumeration };
            Ok(ConstantEstimate::new(
                value,
                method,
                Witness::Pattern { coefficients: patterns[best].clone(), vector },
                patterns.len(),
            ))
        }
        None => {
            let starts: Vec<DVector<T>> = UnitSphereSampler::new(norm.clone(), dim, seed)
                .take(samples)
                .chain((0..dim).map(|i| {
                    let mut e = DVector::zeros(dim);
                    e[i] = T::one();
                    e
                }))
                .collect();
            let opts = AscentOptions { restarts: 1, ..AscentOptions::default() };
            let scored: Vec<(T, DVector<T>, T)> = patterns
                .par_iter()
                .map(|beta| {
                    let f = |x: &DVector<T>| pattern_ratio(fam, beta, x);
                    let (x, v) = maximize(f, starts.clone(), &opts);
                    (v, x, certified_upper_bound(&combination(fam, beta), &norm))
                })
                .collect();
            let upper = scored.iter().fold(T::zero(), |m, s| m.max(s.2));
            let (best, (value, x, _)) = scored
                .into_iter()
                .enumerate()
                .reduce(|a, b| if b.1 .0 > a.1 .0 { b } else { a })
                .expect("at least one pattern");
            Ok(ConstantEstimate::new(
                value,
                Method::SampledLowerBound,
                Witness::Pattern { coefficients: patterns[best].clone(), vector: x.as_slice().to_vec() },
                patterns.len() * starts.len(),
            )
            .with_upper_bound(upper))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{make_coordinate_family, oblique_projection, ModelSpace};
    use crate::numeric::{gaussian_vector, seeded_rng};
    use crate::orlicz::NormSpec;

    fn oblique(angle: f64) -> ProjectionFamily<f64> {
        // P projects onto span{e₀} along span{(cos a, sin a)}
        let b = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let c = DMatrix::from_column_slice(2, 1, &[angle.sin(), -angle.cos()]);
        let p = oblique_projection(&b, &c).unwrap();
        let q = DMatrix::identity(2, 2) - &p;
        ProjectionFamily::from_blocks(ModelSpace::euclidean(2).unwrap(), vec![p, q]).unwrap()
    }

    fn re_evaluate(fam: &ProjectionFamily<f64>, est: &ConstantEstimate<f64>) -> f64 {
        let Witness::Pattern { coefficients, vector } = &est.witness else { panic!("pattern witness") };
        pattern_ratio(fam, coefficients, &DVector::from_column_slice(vector))
    }

    #[test]
    fn pattern_counts() {
        assert_eq!(coefficient_patterns::<f64>(CoefficientSet::ZeroOne, 3).unwrap().len(), 7);
        assert_eq!(coefficient_patterns::<f64>(CoefficientSet::Signs, 3).unwrap().len(), 4);
        assert_eq!(coefficient_patterns::<f64>(CoefficientSet::UnitDiscGrid, 2).unwrap().len(), 289);
        assert_eq!(coefficient_patterns::<f64>(CoefficientSet::UnitDiscGrid, 6).unwrap().len(), 32 + 63);
        assert!(coefficient_patterns::<f64>(CoefficientSet::Signs, 21).is_err());
        let grid = coefficient_patterns::<f64>(CoefficientSet::UnitDiscGrid, 1).unwrap();
        assert_eq!(grid.first().unwrap()[0], -1.0);
        assert_eq!(grid.last().unwrap()[0], 1.0);
        assert!(grid.iter().any(|b| b[0] == 0.0));
    }

    #[test]
    fn orthogonal_l2_family_is_one() {
        let fam = make_coordinate_family(ModelSpace::<f64>::euclidean(6).unwrap(), &[2, 1, 3]).unwrap();
        for set in [CoefficientSet::ZeroOne, CoefficientSet::Signs, CoefficientSet::UnitDiscGrid] {
            let est = unconditional_constant(&fam, set, 0, 1).unwrap();
            assert!((est.value - 1.0).abs() < 1e-12, "{set:?} {}", est.value);
            assert_eq!(est.method, Method::SpectralExact);
        }
    }

    #[test]
    fn coordinate_l1_zero_one_is_one() {
        let space = ModelSpace::new(5, NormSpec::power(1.0).unwrap()).unwrap();
        let fam = make_coordinate_family(space, &[2, 3]).unwrap();
        let est = unconditional_constant(&fam, CoefficientSet::ZeroOne, 0, 1).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.method, Method::ExactEnumeration);
    }

    #[test]
    fn oblique_pair_matches_sphere_grid() {
        for deg in [20.0f64, 45.0, 70.0] {
            let fam = oblique(deg.to_radians());
            for set in [CoefficientSet::ZeroOne, CoefficientSet::Signs] {
                let est = unconditional_constant(&fam, set, 0, 1).unwrap();
                let patterns = coefficient_patterns::<f64>(set, 2).unwrap();
                let mut oracle = 0.0f64;
                for k in 0..200_000 {
                    let t = std::f64::consts::PI * k as f64 / 200_000.0;
                    let x = DVector::from_vec(vec![t.cos(), t.sin()]);
                    for beta in &patterns {
                        oracle = oracle.max(pattern_ratio(&fam, beta, &x));
                    }
                }
                assert!(est.value > 1.0);
                assert!((est.value - oracle).abs() < 1e-8 * est.value, "{deg} {set:?} {} {oracle}", est.value);
                assert!((re_evaluate(&fam, &est) - est.value).abs() < 1e-8 * est.value);
            }
        }
    }

    #[test]
    fn zero_one_is_below_grid_in_every_ambient() {
        let mut rng = seeded_rng(3);
        let norms =
            [NormSpec::euclidean(), NormSpec::power(1.0).unwrap(), NormSpec::Max, NormSpec::power(3.0).unwrap()];
        for norm in norms {
            let n = 4;
            let b: DVector<f64> = gaussian_vector(&mut rng, 2 * n);
            let c: DVector<f64> = gaussian_vector(&mut rng, 2 * n);
            let p = oblique_projection(
                &DMatrix::from_column_slice(n, 2, b.as_slice()),
                &DMatrix::from_column_slice(n, 2, c.as_slice()),
            )
            .unwrap();
            let q = DMatrix::identity(n, n) - &p;
            let fam = ProjectionFamily::from_blocks(ModelSpace::new(n, norm.clone()).unwrap(), vec![p, q]).unwrap();
            let zo = unconditional_constant(&fam, CoefficientSet::ZeroOne, 64, 9).unwrap();
            let grid = unconditional_constant(&fam, CoefficientSet::UnitDiscGrid, 64, 9).unwrap();
            assert!(zo.value <= grid.value, "{norm:?}: {} > {}", zo.value, grid.value);
            assert!((re_evaluate(&fam, &grid) - grid.value).abs() <= 1e-8 * grid.value);
            if let Some(u) = grid.upper_bound {
                assert!(grid.value <= u * (1.0 + 1e-12));
            }
        }
    }
}
