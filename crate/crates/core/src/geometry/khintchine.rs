//! Haagerup's best constants in the Khintchine inequality and the ℓ_p block
//! sandwich they induce for unconditional decompositions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{gamma_fn, Bracket, BracketSolver};
use crate::orlicz::NormSpec;
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KhintchineConstants<T> {
    pub p: T,
    pub a_p: T,
    pub b_p: T,
    pub p0: T,
}

/// `(Γ((p+1)/2)/√π)^{1/p}`, the Gaussian moment term shared by both branches.
fn gaussian_moment<T: Real>(p: T) -> Result<T> {
    let g = gamma_fn((p + T::one()) / lit(2.0))?;
    Ok((g / T::pi().sqrt()).powf(T::one() / p))
}

/// The root of `Γ((p+1)/2) = √π/2` in `[1, 2)`.
///
/// `p = 2` also solves the equation; on `[1, 1.9]` the left side is strictly
/// decreasing and crosses the target once, so the bisection runs there.
pub fn haagerup_p0<T: Real>() -> T {
    let target = T::pi().sqrt() / lit(2.0);
    let f = |p: T| gamma_fn((p + T::one()) / lit(2.0)).unwrap_or_else(|_| T::zero());
    BracketSolver::exhaustive()
        .solve_nonincreasing(f, target, Bracket::Fixed(T::one(), lit(1.9)))
        .expect("Γ((p+1)/2) crosses √π/2 on [1, 1.9]")
}

pub fn khintchine_constants<T: Real>(p: T) -> Result<KhintchineConstants<T>> {
    if !(p > T::zero()) || !p.is_finite() {
        return Err(Error::invalid("Khintchine exponent must be positive and finite"));
    }
    let p0 = haagerup_p0::<T>();
    let two: T = lit(2.0);
    let a_p = if p <= p0 {
        two.powf(lit::<T>(0.5) - T::one() / p)
    } else if p < two {
        two.sqrt() * gaussian_moment(p)?
    } else {
        T::one()
    };
    let b_p = if p <= two { T::one() } else { two.sqrt() * gaussian_moment(p)? };
    Ok(KhintchineConstants { p, a_p, b_p, p0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SandwichBranch {
    /// `1 ≤ p ≤ p₀`
    Low,
    /// `p₀ ≤ p ≤ 2`
    Middle,
    /// `p ≥ 2`
    High,
}

/// Two-sided estimate `left·‖(‖Pₙx‖)‖_L ≤ ‖x‖_p ≤ right·‖(‖Pₙx‖)‖_R` for an
/// unconditional decomposition of ℓ_p with constant `m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct LpSandwich<T> {
    pub p: T,
    pub m: T,
    pub branch: SandwichBranch,
    pub left: T,
    pub left_aggregate: NormSpec<T>,
    pub right: T,
    pub right_aggregate: NormSpec<T>,
}

pub fn lp_sandwich<T: Real>(p: T, m: T) -> Result<LpSandwich<T>> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::invalid("ℓ_p sandwich needs finite p ≥ 1"));
    }
    if !(m >= T::one()) || !m.is_finite() {
        return Err(Error::invalid("unconditional constant must be finite and at least 1"));
    }
    let p0 = haagerup_p0::<T>();
    let two: T = lit(2.0);
    let lp = NormSpec::Power { p };
    let l2 = NormSpec::euclidean();
    let s = if p <= p0 {
        LpSandwich {
            p,
            m,
            branch: SandwichBranch::Low,
            left: two.powf(lit::<T>(-0.5) - T::one() / p) / m,
            left_aggregate: l2,
            right: two * m,
            right_aggregate: lp,
        }
    } else if p <= two {
        LpSandwich {
            p,
            m,
            branch: SandwichBranch::Middle,
            left: gaussian_moment(p)? / (two.sqrt() * m),
            left_aggregate: l2,
            right: two * m,
            right_aggregate: lp,
        }
    } else {
        LpSandwich {
            p,
            m,
            branch: SandwichBranch::High,
            left: T::one() / (two * m),
            left_aggregate: lp,
            right: lit::<T>(8.0).sqrt() * gaussian_moment(p)? * m,
            right_aggregate: l2,
        }
    };
    Ok(s)
}
