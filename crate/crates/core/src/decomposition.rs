//! Finite-dimensional Schauder decompositions: projection families, their
//! validation, expansions, similarity transport and range subspaces.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{invert_with_condition, numerical_rank, spectral_norm, svd};
use crate::orlicz::NormSpec;
use crate::scalar::{lit, Real};

/// Rank cutoff relative to the largest singular value.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// The model space `(ℝᴺ, norm)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct ModelSpace<T> {
    pub dim: usize,
    pub norm: NormSpec<T>,
}

impl<T: Real> ModelSpace<T> {
    pub fn new(dim: usize, norm: NormSpec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("model space dimension must be at least 1"));
        }
        Ok(ModelSpace { dim, norm })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(dim, NormSpec::euclidean())
    }

    pub fn norm_of(&self, x: &DVector<T>) -> T {
        self.norm.norm(x.as_slice())
    }

    /// Default projection tolerance `τ = 1e-10 · N`.
    pub fn default_tolerance(&self) -> T {
        lit::<T>(1e-10) * lit(self.dim as f64)
    }
}

/// An ordered list of `N × N` projections modelling an a.s.c.p.
///
/// Construction only checks shapes; [`validate_family`] checks the algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionFamily<T: Real> {
    space: ModelSpace<T>,
    blocks: Vec<DMatrix<T>>,
}

impl<T: Real> ProjectionFamily<T> {
    pub fn from_blocks(space: ModelSpace<T>, blocks: Vec<DMatrix<T>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("a projection family needs at least one block"));
        }
        for b in &blocks {
            if b.nrows() != space.dim || b.ncols() != space.dim {
                return Err(Error::Dimension { expected: space.dim, found: b.nrows().max(b.ncols()) });
            }
            if b.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("projection entries must be finite"));
            }
        }
        Ok(ProjectionFamily { space, blocks })
    }

    /// Shapes plus full validation at the default tolerance.
    pub fn try_new(space: ModelSpace<T>, blocks: Vec<DMatrix<T>>) -> Result<Self> {
        let fam = Self::from_blocks(space, blocks)?;
        let report = validate_family(&fam, ValidationOptions::default_for(&fam));
        if !report.passed {
            return Err(Error::invalid(format!("not a projection family: {}", report.summary())));
        }
        Ok(fam)
    }

    pub fn space(&self) -> &ModelSpace<T> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[DMatrix<T>] {
        &self.blocks
    }

    pub fn block(&self, n: usize) -> &DMatrix<T> {
        &self.blocks[n]
    }

    /// Same blocks in a different ambient norm.
    pub fn with_norm(&self, norm: NormSpec<T>) -> Self {
        ProjectionFamily { space: ModelSpace { dim: self.space.dim, norm }, blocks: self.blocks.clone() }
    }

    /// `Σ_{j ≤ n} P_j` for every `n`.
    pub fn partial_sums(&self) -> Vec<DMatrix<T>> {
        let n = self.dim();
        let mut acc = DMatrix::zeros(n, n);
        self.blocks
            .iter()
            .map(|b| {
                acc += b;
                acc.clone()
            })
            .collect()
    }

    /// Block norms `‖P_n x‖` in the ambient norm.
    pub fn block_norms(&self, x: &DVector<T>) -> Vec<T> {
        self.blocks.iter().map(|b| self.space.norm_of(&(b * x))).collect()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| numerical_rank(b, lit(RANK_THRESHOLD))).collect()
    }
}

/// Diagonal 0/1 projections onto consecutive coordinate blocks.
pub fn make_coordinate_family<T: Real>(space: ModelSpace<T>, block_sizes: &[usize]) -> Result<ProjectionFamily<T>> {
    if block_sizes.contains(&0) {
        return Err(Error::invalid("block sizes must be positive"));
    }
    let total: usize = block_sizes.iter().sum();
    if total != space.dim {
        return Err(Error::Dimension { expected: space.dim, found: total });
    }
    let mut start = 0;
    let blocks = block_sizes
        .iter()
        .map(|&s| {
            let mut m = DMatrix::zeros(space.dim, space.dim);
            for i in start..start + s {
                m[(i, i)] = T::one();
            }
            start += s;
            m
        })
        .collect();
    ProjectionFamily::from_blocks(space, blocks)
}

#[derive(Clone, Copy, Debug)]
pub struct ValidationOptions<T> {
    pub tolerance: T,
    /// When false, `Σ P_n = I` is not required (generalized biorthogonal systems).
    pub require_completeness: bool,
}

impl<T: Real> ValidationOptions<T> {
    pub fn default_for(fam: &ProjectionFamily<T>) -> Self {
        ValidationOptions { tolerance: fam.space.default_tolerance(), require_completeness: true }
    }

    pub fn with_tolerance(tolerance: T) -> Self {
        ValidationOptions { tolerance, require_completeness: true }
    }
}

/// Spectral-norm defects of the projection-family relations.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct FamilyReport<T> {
    pub max_idempotency_defect: T,
    pub max_cross_product: T,
    /// `None` when completeness was not required.
    pub completeness_defect: Option<T>,
    pub ranks: Vec<usize>,
    pub zero_blocks: Vec<usize>,
    pub tolerance: T,
    pub passed: bool,
}

impl<T: Real> FamilyReport<T> {
    pub fn summary(&self) -> String {
        format!(
            "idempotency {:e}, cross {:e}, completeness {}, zero blocks {:?}, tol {:e}",
            crate::scalar::to_f64(self.max_idempotency_defect),
            crate::scalar::to_f64(self.max_cross_product),
            self.completeness_defect.map(|c| format!("{:e}", crate::scalar::to_f64(c))).unwrap_or_else(|| "n/a".into()),
            self.zero_blocks,
            crate::scalar::to_f64(self.tolerance),
        )
    }
}

pub fn validate_family<T: Real>(fam: &ProjectionFamily<T>, opts: ValidationOptions<T>) -> FamilyReport<T> {
    let n = fam.dim();
    let mut idem = T::zero();
    let mut cross = T::zero();
    let mut ranks = Vec::with_capacity(fam.len());
    let mut zero_blocks = Vec::new();
    for (i, p) in fam.blocks.iter().enumerate() {
        idem = idem.max(spectral_norm(&(p * p - p)));
        let r = numerical_rank(p, lit(RANK_THRESHOLD));
        if r == 0 {
            zero_blocks.push(i);
        }
        ranks.push(r);
        for (j, q) in fam.blocks.iter().enumerate() {
            if i != j {
                cross = cross.max(spectral_norm(&(p * q)));
            }
        }
    }
    let completeness_defect = if opts.require_completeness {
        let mut sum = DMatrix::zeros(n, n);
        for p in &fam.blocks {
            sum += p;
        }
        Some(spectral_norm(&(sum - DMatrix::identity(n, n))))
    } else {
        None
    };
    let passed = idem <= opts.tolerance
        && cross <= opts.tolerance
        && completeness_defect.is_none_or(|c| c <= opts.tolerance)
        && zero_blocks.is_empty();
    FamilyReport {
        max_idempotency_defect: idem,
        max_cross_product: cross,
        completeness_defect,
        ranks,
        zero_blocks,
        tolerance: opts.tolerance,
        passed,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expansion<T: Real> {
    pub components: Vec<DVector<T>>,
    /// `‖Σ xₙ − x‖` in the ambient norm.
    pub defect: T,
}

/// Components `xₙ = Pₙ x` and the reconstruction defect.
pub fn expand<T: Real>(x: &DVector<T>, fam: &ProjectionFamily<T>) -> Result<Expansion<T>> {
    if x.len() != fam.dim() {
        return Err(Error::Dimension { expected: fam.dim(), found: x.len() });
    }
    let components: Vec<DVector<T>> = fam.blocks.iter().map(|p| p * x).collect();
    let mut sum = DVector::zeros(x.len());
    for c in &components {
        sum += c;
    }
    let defect = fam.space.norm_of(&(sum - x));
    Ok(Expansion { components, defect })
}

/// The conjugated family `{S Pₙ S⁻¹}`.
pub fn transport_family<T: Real>(s: &DMatrix<T>, fam: &ProjectionFamily<T>) -> Result<ProjectionFamily<T>> {
    if s.nrows() != fam.dim() || s.ncols() != fam.dim() {
        return Err(Error::Dimension { expected: fam.dim(), found: s.nrows().max(s.ncols()) });
    }
    let inv = invert_with_condition(s)?;
    let blocks = fam.blocks.iter().map(|p| s * p * &inv.inverse).collect();
    ProjectionFamily::from_blocks(fam.space.clone(), blocks)
}

/// A subspace of the model space, stored through a Euclidean-orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T: Real> {
    basis: DMatrix<T>,
    space: ModelSpace<T>,
}

impl<T: Real> Subspace<T> {
    /// Span of the columns of `spanning`, which must have full column rank.
    pub fn new(space: ModelSpace<T>, spanning: &DMatrix<T>) -> Result<Self> {
        if spanning.nrows() != space.dim {
            return Err(Error::Dimension { expected: space.dim, found: spanning.nrows() });
        }
        let r = spanning.ncols();
        if r == 0 {
            return Err(Error::invalid("subspace must have positive dimension"));
        }
        let f = svd(spanning);
        if f.rank(lit(RANK_THRESHOLD)) < r {
            return Err(Error::invalid("spanning vectors are linearly dependent"));
        }
        Ok(Subspace { basis: f.u.columns(0, r).into_owned(), space })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn space(&self) -> &ModelSpace<T> {
        &self.space
    }

    /// Orthogonal projector onto the subspace.
    pub fn orthogonal_projector(&self) -> DMatrix<T> {
        &self.basis * self.basis.transpose()
    }

    /// `S · self`.
    pub fn image_under(&self, s: &DMatrix<T>) -> Result<Self> {
        Subspace::new(self.space.clone(), &(s * &self.basis))
    }

    /// `sup_{x ∈ self, ‖x‖₂ = 1} dist₂(x, other)`, exactly.
    pub fn euclidean_gap_to(&self, other: &Subspace<T>) -> T {
        let n = self.space.dim;
        let resid = (DMatrix::identity(n, n) - other.orthogonal_projector()) * &self.basis;
        spectral_norm(&resid)
    }

    /// True when the two subspaces coincide (rank test on the stacked bases).
    pub fn same_span(&self, other: &Subspace<T>) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let stacked = DMatrix::from_columns(
            &self.basis.column_iter().chain(other.basis.column_iter()).map(|c| c.into_owned()).collect::<Vec<_>>(),
        );
        numerical_rank(&stacked, lit(RANK_THRESHOLD)) == self.dim()
    }
}

/// Range of a projection, with the rank cross-checked against the trace.
pub fn range_subspace<T: Real>(p: &DMatrix<T>, ambient: &ModelSpace<T>) -> Result<Subspace<T>> {
    if p.nrows() != ambient.dim || p.ncols() != ambient.dim {
        return Err(Error::Dimension { expected: ambient.dim, found: p.nrows().max(p.ncols()) });
    }
    let f = svd(p);
    let rank = f.rank(lit(RANK_THRESHOLD));
    let trace = p.trace();
    if (trace - lit(rank as f64)).abs() > lit(0.1) {
        return Err(Error::invalid(format!(
            "trace {} disagrees with factorization rank {rank}: not a projection",
            crate::scalar::to_f64(trace)
        )));
    }
    if rank == 0 {
        return Err(Error::invalid("zero projection has no range subspace"));
    }
    Ok(Subspace { basis: f.u.columns(0, rank).into_owned(), space: ambient.clone() })
}

/// `max_n ‖Jₙ − S Pₙ S⁻¹‖₂`: how far `{Jₙ}` is from the transport of `{Pₙ}` by `S`.
pub fn conjugation_residual<T: Real>(
    s: &DMatrix<T>,
    s_inv: &DMatrix<T>,
    p: &ProjectionFamily<T>,
    j: &ProjectionFamily<T>,
) -> Result<T> {
    if p.len() != j.len() {
        return Err(Error::Dimension { expected: p.len(), found: j.len() });
    }
    Ok(p.blocks
        .iter()
        .zip(&j.blocks)
        .map(|(pn, jn)| spectral_norm(&(jn - s * pn * s_inv)))
        .fold(T::zero(), |a, b| a.max(b)))
}

/// `max_n` Euclidean gap between `S·range(Pₙ)` and `range(Jₙ)` (both directions).
///
/// Zero exactly when the decompositions are isomorphic through `S`.
pub fn isomorphism_defect<T: Real>(s: &DMatrix<T>, p: &ProjectionFamily<T>, j: &ProjectionFamily<T>) -> Result<T> {
    if p.len() != j.len() {
        return Err(Error::Dimension { expected: p.len(), found: j.len() });
    }
    let mut worst = T::zero();
    for (pn, jn) in p.blocks.iter().zip(&j.blocks) {
        let m = range_subspace(pn, p.space())?.image_under(s)?;
        let n = range_subspace(jn, j.space())?;
        worst = worst.max(m.euclidean_gap_to(&n)).max(n.euclidean_gap_to(&m));
    }
    Ok(worst)
}

/// Oblique projection `B (Cᵀ B)⁻¹ Cᵀ` onto `span B` along `(span C)^⊥`.
pub fn oblique_projection<T: Real>(b: &DMatrix<T>, c: &DMatrix<T>) -> Result<DMatrix<T>> {
    let inner = invert_with_condition(&(c.transpose() * b))?;
    Ok(b * inner.inverse * c.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{gaussian_vector, seeded_rng};

    fn l2(n: usize) -> ModelSpace<f64> {
        ModelSpace::euclidean(n).unwrap()
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = seeded_rng(seed);
        let v: DVector<f64> = gaussian_vector(&mut rng, rows * cols);
        DMatrix::from_column_slice(rows, cols, v.as_slice())
    }

    fn oblique_pair(n: usize, r: usize, seed: u64) -> ProjectionFamily<f64> {
        let p = oblique_projection(&random_matrix(n, r, seed), &random_matrix(n, r, seed + 1)).unwrap();
        let q = DMatrix::identity(n, n) - &p;
        ProjectionFamily::from_blocks(l2(n), vec![p, q]).unwrap()
    }

    #[test]
    fn coordinate_family_examples() {
        let fam = make_coordinate_family(l2(4), &[2, 2]).unwrap();
        assert_eq!(fam.block(0), &DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0])));
        assert_eq!(fam.block(1), &DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 0.0, 1.0, 1.0])));
        let basis = make_coordinate_family(l2(3), &[1, 1, 1]).unwrap();
        assert_eq!(basis.ranks(), vec![1, 1, 1]);
        let single = make_coordinate_family(l2(2), &[2]).unwrap();
        assert_eq!(single.block(0), &DMatrix::identity(2, 2));
        assert!(make_coordinate_family(l2(4), &[2, 1]).is_err());
        assert!(make_coordinate_family(l2(4), &[4, 0]).is_err());
    }

    #[test]
    fn coordinate_family_validates_exactly() {
        let fam = make_coordinate_family(l2(5), &[2, 3]).unwrap();
        let r = validate_family(&fam, ValidationOptions::default_for(&fam));
        assert!(r.passed);
        assert_eq!(r.max_idempotency_defect, 0.0);
        assert_eq!(r.max_cross_product, 0.0);
        assert_eq!(r.completeness_defect, Some(0.0));
        assert_eq!(r.ranks, vec![2, 3]);
    }

    #[test]
    fn oblique_pair_validates() {
        for seed in 0..5 {
            let fam = oblique_pair(6, 2, seed * 10);
            let r = validate_family(&fam, ValidationOptions::with_tolerance(1e-12));
            assert!(r.passed, "{}", r.summary());
            assert_eq!(r.ranks, vec![2, 4]);
        }
    }

    #[test]
    fn injected_defect_fails() {
        let fam = make_coordinate_family(l2(4), &[2, 2]).unwrap();
        let mut blocks = fam.blocks().to_vec();
        blocks[1][(0, 3)] += 1e-3;
        let bad = ProjectionFamily::from_blocks(l2(4), blocks.clone()).unwrap();
        let r = validate_family(&bad, ValidationOptions::default_for(&bad));
        assert!(!r.passed);
        assert!(ProjectionFamily::try_new(l2(4), blocks).is_err());
    }

    #[test]
    fn relaxed_validation_skips_completeness() {
        let fam = make_coordinate_family(l2(4), &[2, 1, 1]).unwrap();
        let partial = ProjectionFamily::from_blocks(l2(4), fam.blocks()[..2].to_vec()).unwrap();
        let strict = validate_family(&partial, ValidationOptions::default_for(&partial));
        assert!(!strict.passed);
        let relaxed = validate_family(&partial, ValidationOptions { tolerance: 1e-10, require_completeness: false });
        assert!(relaxed.passed);
        assert_eq!(relaxed.completeness_defect, None);
    }

    #[test]
    fn expansion_examples() {
        let fam = make_coordinate_family(l2(4), &[2, 2]).unwrap();
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let e = expand(&x, &fam).unwrap();
        assert_eq!(e.components[0].as_slice(), &[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(e.components[1].as_slice(), &[0.0, 0.0, 3.0, 4.0]);
        assert_eq!(e.defect, 0.0);
        let z = expand(&DVector::zeros(4), &fam).unwrap();
        assert!(z.components.iter().all(|c| c.iter().all(|v| *v == 0.0)));
        assert!(expand(&DVector::zeros(3), &fam).is_err());

        let fam = oblique_pair(5, 2, 3);
        let x: DVector<f64> = gaussian_vector(&mut seeded_rng(4), 5);
        assert!(expand(&x, &fam).unwrap().defect <= 1e-10);
    }

    #[test]
    fn transport_examples() {
        let fam = oblique_pair(4, 2, 7);
        let same = transport_family(&DMatrix::identity(4, 4), &fam).unwrap();
        assert_eq!(same, fam);
        let scaled = transport_family(&(DMatrix::identity(4, 4) * 2.0), &fam).unwrap();
        for (a, b) in scaled.blocks().iter().zip(fam.blocks()) {
            assert!((a - b).norm() < 1e-14);
        }
        let s = DMatrix::identity(4, 4) + random_matrix(4, 4, 8) * 0.01;
        let moved = transport_family(&s, &fam).unwrap();
        let r = validate_family(&moved, ValidationOptions::with_tolerance(1e-10));
        assert!(r.passed, "{}", r.summary());
        assert_eq!(r.ranks, fam.ranks());
        let singular = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0, 0.0]));
        assert!(matches!(transport_family(&singular, &fam), Err(Error::Singular { .. })));
    }

    #[test]
    fn range_subspace_examples() {
        let p = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]));
        let sub = range_subspace(&p, &l2(4)).unwrap();
        assert_eq!(sub.dim(), 2);
        let e01 = Subspace::new(l2(4), &DMatrix::from_column_slice(4, 2, &[1., 0., 0., 0., 0., 1., 0., 0.])).unwrap();
        assert!(sub.same_span(&e01));

        let v = DVector::from_vec(vec![1.0, 2.0, -1.0]);
        let w = DVector::from_vec(vec![0.5, 0.0, 1.0]);
        let p = &v * w.transpose() / w.dot(&v);
        let sub = range_subspace(&p, &l2(3)).unwrap();
        let line = Subspace::new(l2(3), &DMatrix::from_column_slice(3, 1, v.as_slice())).unwrap();
        assert!(sub.same_span(&line));

        let fam = oblique_pair(6, 3, 21);
        let sub = range_subspace(fam.block(0), &l2(6)).unwrap();
        assert_eq!(sub.dim(), fam.ranks()[0]);

        let not_proj = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5, 0.0]));
        assert!(range_subspace(&not_proj, &l2(3)).is_err());
    }

    #[test]
    fn subspace_rejects_dependent_columns() {
        let m = DMatrix::from_column_slice(3, 2, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        assert!(Subspace::new(l2(3), &m).is_err());
    }

    #[test]
    fn similar_families_have_isomorphic_ranges_and_back() {
        // J = S P S⁻¹ ⇒ range(Jₙ) = S range(Pₙ)
        let fam = oblique_pair(5, 2, 30);
        let s = DMatrix::identity(5, 5) + random_matrix(5, 5, 31) * 0.2;
        let moved = transport_family(&s, &fam).unwrap();
        assert!(isomorphism_defect(&s, &fam, &moved).unwrap() < 1e-10);
        let inv = invert_with_condition(&s).unwrap().inverse;
        assert!(conjugation_residual(&s, &inv, &fam, &moved).unwrap() < 1e-10);
        // an unrelated S does not carry the ranges over
        let other = DMatrix::identity(5, 5) + random_matrix(5, 5, 32) * 0.2;
        assert!(isomorphism_defect(&other, &fam, &moved).unwrap() > 1e-4);
    }
}
