//! Constructive similarity: `S = Σ PₙJₙ`, the remainder `R`, and the
//! hypothesis checks that guarantee `S` is invertible.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::decomposition::ProjectionFamily;
use crate::error::{Error, Result};
use crate::estimate::Method;
use crate::geometry::hilbertian_constant;
use crate::numeric::{invert_with_condition, numerical_rank, operator_norm, spectral_norm};
use crate::orlicz::NormSpec;
use crate::scalar::{lit, Real};

use super::modulus::reduced_minimum_modulus;
use super::sigma::{perturbation_sigma, perturbation_sigma_from};

/// Residual scale for the "similar" verdict: `residual ≤ 1e-8·(1 + κ(S))`.
pub const SIMILARITY_TOL: f64 = 1e-8;

/// Distance to the threshold inside which the verdict is flagged marginal.
pub const MARGINAL_BAND: f64 = 1e-6;

/// The relation certified between the families.
pub const DIRECTION: &str = "S J_n = P_n S, i.e. J_n = S^-1 P_n S";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Similar,
    NotSimilar,
    NotInvertible,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Similar => "similar",
            Verdict::NotSimilar => "not-similar",
            Verdict::NotInvertible => "not-invertible",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct StabilityReport<T> {
    pub sigma: Option<T>,
    pub sigma_method: Option<Method>,
    pub c_hilbertian: Option<T>,
    pub c_method: Option<Method>,
    /// `C⁻¹`, or 1 for the Euclidean quadratic case.
    pub threshold: Option<T>,
    pub hypothesis_met: Option<bool>,
    /// True when ς is within the marginal band of the threshold.
    pub marginal: bool,
    pub rank_p0: usize,
    pub rank_j0: usize,
    /// `γ(I − P₀)` in the ambient norm.
    pub gamma: Option<T>,
    /// `S` as row-major rows.
    pub s: Vec<Vec<T>>,
    pub r_norm: T,
    pub r_norm_method: Method,
    pub s_condition: T,
    /// `maxₙ ‖Jₙ − S⁻¹PₙS‖₂`, present whenever `S` is invertible.
    pub similarity_residual: Option<T>,
    pub verdict: Verdict,
    pub direction: &'static str,
}

fn rows<T: Real>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn check_pair<T: Real>(p: &ProjectionFamily<T>, j: &ProjectionFamily<T>) -> Result<()> {
    if p.dim() != j.dim() {
        return Err(Error::Dimension { expected: p.dim(), found: j.dim() });
    }
    if p.len() != j.len() {
        return Err(Error::Dimension { expected: p.len(), found: j.len() });
    }
    Ok(())
}

/// `S = Σ PₙJₙ`, `R = I − P₀ − Σ_{n≥1} PₙJₙ`, and the similarity residual.
///
/// `‖R‖` is taken in the ambient operator norm: exact in ℓ₂, ℓ₁ and max
/// norms, a certified upper bound otherwise. A numerically singular `S`
/// yields the verdict `not-invertible`, not an error.
pub fn build_similarity<T: Real>(p: &ProjectionFamily<T>, j: &ProjectionFamily<T>) -> Result<StabilityReport<T>> {
    check_pair(p, j)?;
    let n = p.dim();
    let mut s = DMatrix::zeros(n, n);
    for (pn, jn) in p.blocks().iter().zip(j.blocks()) {
        s += pn * jn;
    }
    let r = DMatrix::identity(n, n) - p.block(0) - (&s - p.block(0) * j.block(0));
    let ambient = &p.space().norm;
    let r_est = operator_norm(&r, ambient, 0, 0);
    let (r_norm, r_norm_method) = match r_est.upper_bound {
        Some(u) => (u, Method::CertifiedUpperBound),
        None => (r_est.value, r_est.method),
    };
    let rank = |m: &DMatrix<T>| numerical_rank(m, lit(1e-10));
    let mut report = StabilityReport {
        sigma: None,
        sigma_method: None,
        c_hilbertian: None,
        c_method: None,
        threshold: None,
        hypothesis_met: None,
        marginal: false,
        rank_p0: rank(p.block(0)),
        rank_j0: rank(j.block(0)),
        gamma: None,
        s: rows(&s),
        r_norm,
        r_norm_method,
        s_condition: T::max_value().unwrap(),
        similarity_residual: None,
        verdict: Verdict::NotInvertible,
        direction: DIRECTION,
    };
    match invert_with_condition(&s) {
        Ok(inv) => {
            let residual = p
                .blocks()
                .iter()
                .zip(j.blocks())
                .map(|(pn, jn)| spectral_norm(&(jn - &inv.inverse * pn * &s)))
                .fold(T::zero(), |a, b| a.max(b));
            report.s_condition = inv.condition;
            report.similarity_residual = Some(residual);
            report.verdict = if residual <= lit::<T>(SIMILARITY_TOL) * (T::one() + inv.condition) {
                Verdict::Similar
            } else {
                Verdict::NotSimilar
            };
        }
        Err(Error::Singular { condition }) => {
            report.s_condition = lit(condition);
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

fn apply_hypothesis<T: Real>(report: &mut StabilityReport<T>, sigma: T, threshold: T, extra: bool) {
    report.threshold = Some(threshold);
    report.hypothesis_met = Some(sigma < threshold && extra);
    report.marginal = (sigma - threshold).abs() <= lit(MARGINAL_BAND);
}

fn complement_modulus<T: Real>(p: &ProjectionFamily<T>, samples: usize, seed: u64) -> Option<T> {
    let n = p.dim();
    let t = DMatrix::identity(n, n) - p.block(0);
    reduced_minimum_modulus(&t, &p.space().norm, samples, seed).ok().map(|e| e.value)
}

/// Euclidean quadratic hypothesis: `Σ_{n≥1}‖Pₙ(Jₙ − Pₙ)x‖² ≤ c²‖x‖²` with
/// `c < 1`, selfadjoint `Pₙ`, and `rank P₀ = rank J₀`.
pub fn kato_check<T: Real>(p: &ProjectionFamily<T>, j: &ProjectionFamily<T>) -> Result<StabilityReport<T>> {
    check_pair(p, j)?;
    if !p.space().norm.is_euclidean() {
        return Err(Error::invalid("the quadratic check needs a Euclidean ambient"));
    }
    let tol: T = lit(1e-10);
    if let Some(i) = p.blocks().iter().position(|b| spectral_norm(&(b - b.transpose())) > tol) {
        return Err(Error::invalid(format!("block {i} of P is not selfadjoint")));
    }
    let c = perturbation_sigma(p, j, &NormSpec::euclidean(), 0, 0)?;
    let mut report = build_similarity(p, j)?;
    let ranks_match = report.rank_p0 == report.rank_j0;
    report.sigma = Some(c.value);
    report.sigma_method = Some(c.method);
    report.gamma = complement_modulus(p, 0, 0);
    apply_hypothesis(&mut report, c.value, T::one(), ranks_match);
    Ok(report)
}

/// Hilbertian hypothesis `ς < C⁻¹` with `C` the `ℓ_Ψ`-Hilbertian constant of
/// `P` and `ς` the perturbation constant aggregated by `Ψ`.
///
/// When `c` is given it replaces the computed Hilbertian constant.
pub fn hilbertian_stability_check<T: Real>(
    p: &ProjectionFamily<T>,
    j: &ProjectionFamily<T>,
    psi: &NormSpec<T>,
    c: Option<T>,
    samples: usize,
    seed: u64,
) -> Result<StabilityReport<T>> {
    check_pair(p, j)?;
    let (c_value, c_method) = match c {
        Some(v) if v > T::zero() => (v, None),
        Some(_) => return Err(Error::invalid("Hilbertian constant must be positive")),
        None => {
            let e = hilbertian_constant(p, psi, samples, seed)?;
            (e.value, Some(e.method))
        }
    };
    let sigma = perturbation_sigma(p, j, psi, samples, seed)?;
    let mut report = build_similarity(p, j)?;
    report.sigma = Some(sigma.value);
    report.sigma_method = Some(sigma.method);
    report.c_hilbertian = Some(c_value);
    report.c_method = c_method;
    report.gamma = complement_modulus(p, samples, seed);
    apply_hypothesis(&mut report, sigma.value, T::one() / c_value, true);
    Ok(report)
}

/// Max-norm ambient with `maxₙ ‖Pₙ(Jₙ − Pₙ)x‖ ≤ ς‖x‖` over all `n ≥ 0` and
/// `ς < C⁻¹`.
pub fn c0_stability_check<T: Real>(
    p: &ProjectionFamily<T>,
    j: &ProjectionFamily<T>,
    c: T,
) -> Result<StabilityReport<T>> {
    check_pair(p, j)?;
    if p.space().norm != NormSpec::Max {
        return Err(Error::invalid("the c₀ check needs a max-norm ambient"));
    }
    if !(c > T::zero()) {
        return Err(Error::invalid("constant C must be positive"));
    }
    let sigma = perturbation_sigma_from(p, j, &NormSpec::Max, 0, 0, 0)?;
    let mut report = build_similarity(p, j)?;
    report.sigma = Some(sigma.value);
    report.sigma_method = Some(sigma.method);
    report.c_hilbertian = Some(c);
    report.gamma = complement_modulus(p, 0, 0);
    apply_hypothesis(&mut report, sigma.value, T::one() / c, true);
    Ok(report)
}
