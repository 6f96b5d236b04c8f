use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimate::{ConstantEstimate, Method, Witness};
use crate::orlicz::{ExactClass, NormSpec};
use crate::scalar::{lit, Real};

use super::sampling::UnitSphereSampler;
use super::search::{maximize, AscentOptions};

/// Condition estimate at or above which a matrix is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Singular value decomposition with values sorted nonincreasing.
#[derive(Clone, Debug)]
pub struct SpectralFactorization<T: Real> {
    pub singular_values: DVector<T>,
    pub u: DMatrix<T>,
    pub v_t: DMatrix<T>,
}

impl<T: Real> SpectralFactorization<T> {
    pub fn largest(&self) -> T {
        self.singular_values.iter().copied().next().unwrap_or(T::zero())
    }

    /// Number of singular values above `rel * σ_max`.
    pub fn rank(&self, rel: T) -> usize {
        let cut = self.largest() * rel;
        self.singular_values.iter().filter(|s| **s > cut).count()
    }

    pub fn reconstruct(&self) -> DMatrix<T> {
        let k = self.singular_values.len();
        let mut us = self.u.columns(0, k).into_owned();
        for (j, s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v_t.rows(0, k)
    }
}

/// Thin SVD: `u` is `m×k`, `v_t` is `k×n`, `k = min(m, n)`. For square or
/// tall input `v_t` is a full orthogonal matrix, so its trailing rows span
/// the kernel.
///
/// One-sided Jacobi rather than nalgebra's bidiagonal QR, which loses
/// accuracy on rank-deficient input (oblique projections in particular).
pub fn svd<T: Real>(m: &DMatrix<T>) -> SpectralFactorization<T> {
    if m.nrows() >= m.ncols() {
        let (u, s, v) = jacobi_svd(m, true);
        SpectralFactorization { singular_values: s, u, v_t: v.transpose() }
    } else {
        let (v, s, u) = jacobi_svd(&m.transpose(), true);
        SpectralFactorization { singular_values: s, u, v_t: v.transpose() }
    }
}

/// Singular values, nonincreasing.
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> DVector<T> {
    if m.nrows() >= m.ncols() {
        jacobi_svd(m, false).1
    } else {
        jacobi_svd(&m.transpose(), false).1
    }
}

/// Hestenes one-sided Jacobi on a matrix with `nrows >= ncols`. Returns
/// `(U, σ, V)` sorted by nonincreasing `σ`; `V` is left empty unless asked for.
fn jacobi_svd<T: Real>(a: &DMatrix<T>, want_vectors: bool) -> (DMatrix<T>, DVector<T>, DMatrix<T>) {
    let (rows, n) = a.shape();
    let mut w = a.clone();
    let mut v = if want_vectors { DMatrix::identity(n, n) } else { DMatrix::zeros(0, 0) };
    let eps = T::default_epsilon();
    for _ in 0..80 {
        let mut rotated = false;
        let mut sq: Vec<T> = w.column_iter().map(|c| c.norm_squared()).collect();
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (sq[p], sq[q]);
                let gamma = dot(column(&w, p), column(&w, q));
                if gamma == T::zero() || !(gamma.abs() > eps * (alpha * beta).sqrt()) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                if want_vectors {
                    rotate(&mut v, p, q, c, s);
                }
                sq[p] = alpha - t * gamma;
                sq[q] = beta + t * gamma;
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = w.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let sigma = DVector::from_iterator(n, order.iter().map(|&i| norms[i]));
    if !want_vectors {
        return (DMatrix::zeros(0, 0), sigma, v);
    }
    let v = DMatrix::from_columns(&order.iter().map(|&i| v.column(i).into_owned()).collect::<Vec<_>>());
    // columns with negligible σ are replaced by an orthonormal completion
    let cut = sigma.iter().copied().next().unwrap_or(T::zero()) * eps * lit((rows.max(n) * 4) as f64);
    let mut u: Vec<DVector<T>> = Vec::with_capacity(n);
    let mut next_axis = 0;
    for (k, &i) in order.iter().enumerate() {
        if sigma[k] > cut && sigma[k] > T::zero() {
            u.push(w.column(i) / sigma[k]);
            continue;
        }
        loop {
            let mut e = DVector::zeros(rows);
            e[next_axis % rows] = T::one();
            next_axis += 1;
            for _ in 0..2 {
                for b in &u {
                    let d = b.dot(&e);
                    e.axpy(-d, b, T::one());
                }
            }
            let ne = e.norm();
            if ne > lit(0.5) {
                u.push(e / ne);
                break;
            }
        }
    }
    (DMatrix::from_columns(&u), sigma, v)
}

fn column<T: Real>(m: &DMatrix<T>, j: usize) -> &[T] {
    let r = m.nrows();
    &m.as_slice()[j * r..(j + 1) * r]
}

fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (a, b)| acc + *a * *b)
}

/// Plane rotation of columns `p < q`.
fn rotate<T: Real>(m: &mut DMatrix<T>, p: usize, q: usize, c: T, s: T) {
    let r = m.nrows();
    let (left, right) = m.as_mut_slice().split_at_mut(q * r);
    for (x, y) in left[p * r..(p + 1) * r].iter_mut().zip(&mut right[..r]) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Largest singular value, as `√λ_max` of the smaller Gram matrix.
pub fn spectral_norm<T: Real>(m: &DMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    let g = if m.nrows() >= m.ncols() { m.transpose() * m } else { m * m.transpose() };
    let sym = (&g + g.transpose()) * lit::<T>(0.5);
    sym.symmetric_eigenvalues().iter().fold(T::zero(), |a, b| a.max(*b)).sqrt()
}

pub fn column_sum_norm<T: Real>(m: &DMatrix<T>) -> T {
    m.column_iter().map(|c| c.iter().fold(T::zero(), |s, v| s + v.abs())).fold(T::zero(), |a, b| a.max(b))
}

pub fn row_sum_norm<T: Real>(m: &DMatrix<T>) -> T {
    m.row_iter().map(|r| r.iter().fold(T::zero(), |s, v| s + v.abs())).fold(T::zero(), |a, b| a.max(b))
}

/// Rank from singular values above `rel * σ_max`.
pub fn numerical_rank<T: Real>(m: &DMatrix<T>, rel: T) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = singular_values(m);
    let top = sv.iter().fold(T::zero(), |a, b| a.max(*b));
    if top == T::zero() {
        return 0;
    }
    sv.iter().filter(|s| **s > top * rel).count()
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SymmetricSpectrum<T: Real> {
    pub eigenvalues: DVector<T>,
    pub eigenvectors: DMatrix<T>,
}

impl<T: Real> SymmetricSpectrum<T> {
    pub fn min(&self) -> (T, DVector<T>) {
        (self.eigenvalues[0], self.eigenvectors.column(0).into_owned())
    }

    pub fn max(&self) -> (T, DVector<T>) {
        let k = self.eigenvalues.len() - 1;
        (self.eigenvalues[k], self.eigenvectors.column(k).into_owned())
    }
}

pub fn symmetric_spectrum<T: Real>(m: &DMatrix<T>) -> SymmetricSpectrum<T> {
    // symmetrize against rounding in Gram-type products
    let sym = (m + m.transpose()) * lit::<T>(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    SymmetricSpectrum {
        eigenvalues: DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i])),
        eigenvectors: DMatrix::from_columns(
            &order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
        ),
    }
}

#[derive(Clone, Debug)]
pub struct Inversion<T: Real> {
    pub inverse: DMatrix<T>,
    /// `‖T‖₂ · ‖T⁻¹‖₂ = σ_max / σ_min`.
    pub condition: T,
    /// `‖T T⁻¹ − I‖₂`.
    pub residual: T,
}

/// LU-based inverse with a spectral condition estimate.
///
/// Matrices with condition at or above [`SINGULAR_CONDITION`] are reported as
/// [`Error::Singular`].
pub fn invert_with_condition<T: Real>(m: &DMatrix<T>) -> Result<Inversion<T>> {
    if !m.is_square() {
        return Err(Error::invalid("inversion requires a square matrix"));
    }
    let n = m.nrows();
    if n == 0 {
        return Err(Error::invalid("inversion of an empty matrix"));
    }
    let sv = singular_values(m);
    let hi = sv.iter().fold(T::zero(), |a, b| a.max(*b));
    let lo = sv.iter().fold(T::max_value().unwrap(), |a, b| a.min(*b));
    let condition = if lo > T::zero() { hi / lo } else { T::max_value().unwrap() };
    let limit: T = lit(SINGULAR_CONDITION);
    let singular = || Error::Singular { condition: crate::scalar::to_f64(condition) };
    if !(condition < limit) {
        return Err(singular());
    }
    let inverse = m.clone().lu().try_inverse().ok_or_else(singular)?;
    let residual = spectral_norm(&(m * &inverse - DMatrix::identity(n, n)));
    Ok(Inversion { inverse, condition, residual })
}

/// Operator norm induced by `norm` on both sides.
///
/// ℓ₂, ℓ₁ and max norms are exact. Other norms get a sampled lower bound
/// (with local ascent) as the value and a certified upper bound alongside.
pub fn operator_norm<T: Real>(m: &DMatrix<T>, norm: &NormSpec<T>, samples: usize, seed: u64) -> ConstantEstimate<T> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return ConstantEstimate::new(T::zero(), Method::ExactEnumeration, Witness::None, 0);
    }
    match norm.exact_class() {
        Some(ExactClass::L2) => {
            let f = svd(m);
            let v = f.v_t.row(0).transpose();
            ConstantEstimate::new(
                f.largest(),
                Method::SpectralExact,
                Witness::Vector { vector: v.as_slice().to_vec() },
                1,
            )
        }
        Some(ExactClass::L1) => {
            let (j, val) = m
                .column_iter()
                .map(|c| c.iter().fold(T::zero(), |s, v| s + v.abs()))
                .enumerate()
                .fold((0, T::zero()), |best, (j, v)| if v > best.1 { (j, v) } else { best });
            let mut w = vec![T::zero(); cols];
            w[j] = T::one();
            ConstantEstimate::new(val, Method::ExactEnumeration, Witness::Vector { vector: w }, cols)
        }
        Some(ExactClass::Max) => {
            let (i, val) = m
                .row_iter()
                .map(|r| r.iter().fold(T::zero(), |s, v| s + v.abs()))
                .enumerate()
                .fold((0, T::zero()), |best, (i, v)| if v > best.1 { (i, v) } else { best });
            let w: Vec<T> = m.row(i).iter().map(|v| if *v < T::zero() { -T::one() } else { T::one() }).collect();
            ConstantEstimate::new(val, Method::ExactEnumeration, Witness::Vector { vector: w }, rows)
        }
        None => {
            let upper = certified_upper_bound(m, norm);
            let mut starts: Vec<DVector<T>> = UnitSphereSampler::new(norm.clone(), cols, seed).take(samples).collect();
            for j in 0..cols {
                let mut e = DVector::zeros(cols);
                e[j] = T::one();
                starts.push(e);
            }
            let trials = starts.len();
            let ratio = |x: &DVector<T>| {
                let d = norm.norm(x.as_slice());
                if d > T::zero() {
                    norm.norm((m * x).as_slice()) / d
                } else {
                    T::zero()
                }
            };
            let (x, value) = maximize(ratio, starts, &AscentOptions::default());
            ConstantEstimate::new(
                value,
                Method::SampledLowerBound,
                Witness::Vector { vector: x.as_slice().to_vec() },
                trials,
            )
            .with_upper_bound(upper)
        }
    }
}

/// A provable upper bound on the induced norm: the exact value where one
/// exists, [`certified_upper_bound`] otherwise.
pub fn operator_norm_bound<T: Real>(m: &DMatrix<T>, norm: &NormSpec<T>) -> T {
    match norm.exact_class() {
        Some(_) => operator_norm(m, norm, 0, 0).value,
        None => certified_upper_bound(m, norm),
    }
}

/// Upper bound on the induced norm for norms without a closed form.
///
/// ℓ_p: the smaller of Riesz–Thorin interpolation between ℓ₁ and ℓ_∞ and the
/// ℓ₂ norm times the equivalence factors. Orlicz: the ℓ_∞ norm times
/// `Φ⁻¹(1) / Φ⁻¹(1/rows)`.
pub fn certified_upper_bound<T: Real>(m: &DMatrix<T>, norm: &NormSpec<T>) -> T {
    let (rows, cols) = m.shape();
    let inf = row_sum_norm(m);
    match norm {
        NormSpec::Power { p } => {
            let one = column_sum_norm(m);
            let inv_p = T::one() / *p;
            let interp = one.powf(inv_p) * inf.powf(T::one() - inv_p);
            let half: T = lit(0.5);
            let factor = if *p >= lit(2.0) {
                lit::<T>(cols as f64).powf(half - inv_p)
            } else {
                lit::<T>(rows as f64).powf(inv_p - half)
            };
            interp.min(factor * spectral_norm(m))
        }
        NormSpec::Orlicz { phi } => {
            let top = phi.inverse(T::one());
            let bottom = phi.inverse(T::one() / lit(rows as f64));
            match (top, bottom) {
                (Ok(a), Ok(b)) if b > T::zero() => inf * a / b,
                _ => T::max_value().unwrap(),
            }
        }
        NormSpec::Max => inf,
    }
}
