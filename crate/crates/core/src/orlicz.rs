//! Orlicz functions, Luxemburg norms and the Δ₂ diagnostic at zero.
//!
//! A gauge `Φ` is continuous, nondecreasing and convex on `[0, ∞)` with
//! `Φ(0) = 0` and `Φ(t) → ∞`. The Luxemburg norm of a finite sequence is
//!
//! ```text
//! ‖x‖ = inf { ρ > 0 : Σ Φ(|aₙ| / ρ) ≤ 1 }
//! ```
//!
//! which is computed by bisection on the nonincreasing feasibility function
//! `g(ρ) = Σ Φ(|aₙ| / ρ)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{Bracket, BracketSolver};
use crate::scalar::{lit, Real};

/// The three gauge families that can be represented exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", bound(serialize = "T: Real"))]
pub enum GaugeKind<T> {
    /// `Φ(t) = tᵖ`, `p ≥ 1`.
    Power { p: T },
    /// `Φ(t) = e^{αt} − 1`, `α > 0`.
    #[serde(rename = "exp")]
    ScaledExp { alpha: T },
    /// Linear interpolation between knots `(t, Φ(t))`, starting at `(0, 0)`,
    /// extended linearly past the last knot.
    #[serde(rename = "pwl")]
    PiecewiseLinear { knots: Vec<(T, T)> },
}

/// A validated Orlicz function.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent, bound(serialize = "T: Real"))]
pub struct OrliczFunction<T> {
    kind: GaugeKind<T>,
}

impl<T: Real> OrliczFunction<T> {
    pub fn power(p: T) -> Result<Self> {
        if !p.is_finite() || p < T::one() {
            return Err(Error::invalid("power gauge requires a finite exponent p >= 1"));
        }
        Ok(OrliczFunction { kind: GaugeKind::Power { p } })
    }

    pub fn scaled_exp(alpha: T) -> Result<Self> {
        if !alpha.is_finite() || alpha <= T::zero() {
            return Err(Error::invalid("scaled-exp gauge requires alpha > 0"));
        }
        Ok(OrliczFunction { kind: GaugeKind::ScaledExp { alpha } })
    }

    /// Builds a piecewise-linear gauge. Knots must start at `(0, 0)`, be
    /// strictly increasing in `t`, nondecreasing in `Φ`, have nondecreasing
    /// slopes, and end on a segment of positive slope.
    pub fn piecewise_linear(knots: Vec<(T, T)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::invalid("piecewise-linear gauge needs at least two knots"));
        }
        if knots[0] != (T::zero(), T::zero()) {
            return Err(Error::invalid("piecewise-linear gauge must start at (0, 0)"));
        }
        let mut prev_slope = T::zero();
        for w in knots.windows(2) {
            let ((t0, f0), (t1, f1)) = (w[0], w[1]);
            if !(t1.is_finite() && f1.is_finite()) {
                return Err(Error::invalid("knots must be finite"));
            }
            if t1 <= t0 {
                return Err(Error::invalid("knot abscissae must be strictly increasing"));
            }
            if f1 < f0 {
                return Err(Error::invalid("gauge values must be nondecreasing"));
            }
            let slope = (f1 - f0) / (t1 - t0);
            // relative slack absorbs rounding in sampled convex data
            let slack = prev_slope.abs() * lit(1e-9);
            if slope + slack < prev_slope {
                return Err(Error::invalid("gauge must be convex (slopes nondecreasing)"));
            }
            prev_slope = slope;
        }
        if prev_slope <= T::zero() {
            return Err(Error::invalid("last segment must have positive slope so that Φ(t) → ∞"));
        }
        Ok(OrliczFunction { kind: GaugeKind::PiecewiseLinear { knots } })
    }

    pub fn kind(&self) -> &GaugeKind<T> {
        &self.kind
    }

    /// Evaluates `Φ(t)`; negative arguments are rejected.
    pub fn eval(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(Error::invalid("Orlicz functions are defined on t >= 0"));
        }
        Ok(self.value(t))
    }

    /// `Φ(t)` without the domain check.
    pub(crate) fn value(&self, t: T) -> T {
        match &self.kind {
            GaugeKind::Power { p } => {
                if *p == T::one() {
                    t
                } else if *p == lit(2.0) {
                    t * t
                } else {
                    t.powf(*p)
                }
            }
            GaugeKind::ScaledExp { alpha } => (*alpha * t).exp_m1(),
            GaugeKind::PiecewiseLinear { knots } => {
                let idx = knots.partition_point(|k| k.0 <= t);
                // idx >= 1 because knots[0].0 == 0 <= t
                let seg = (idx - 1).min(knots.len() - 2);
                let (t0, f0) = knots[seg];
                let (t1, f1) = knots[seg + 1];
                f0 + (f1 - f0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// `sup { t ≥ 0 : Φ(t) ≤ y }` for `y > 0`, in closed form.
    pub fn inverse(&self, y: T) -> Result<T> {
        if !(y > T::zero()) {
            return Err(Error::invalid("inverse gauge requires y > 0"));
        }
        Ok(match &self.kind {
            GaugeKind::Power { p } => y.powf(T::one() / *p),
            GaugeKind::ScaledExp { alpha } => y.ln_1p() / *alpha,
            GaugeKind::PiecewiseLinear { knots } => {
                // last knot with Φ ≤ y, then interpolate on the following segment
                let idx = knots.partition_point(|k| k.1 <= y);
                let seg = (idx.max(1) - 1).min(knots.len() - 2);
                let (t0, f0) = knots[seg];
                let (t1, f1) = knots[seg + 1];
                t0 + (y - f0) * (t1 - t0) / (f1 - f0)
            }
        })
    }

    /// True when `Φ` vanishes on a nontrivial interval `[0, t₀]`, in which
    /// case ℓ_Φ is isomorphic to ℓ_∞ and the feasibility function is flat.
    pub fn is_degenerate(&self) -> bool {
        match &self.kind {
            GaugeKind::PiecewiseLinear { knots } => knots[1].1 == T::zero(),
            _ => false,
        }
    }

    /// Checks the gauge invariants on a sampled grid: `Φ(0) = 0`,
    /// monotonicity, midpoint convexity on consecutive triples, and
    /// `Φ(t_max) > threshold`.
    pub fn check_invariants(&self, grid: &[T], threshold: T) -> GaugeDiagnostics {
        let mut sorted: Vec<T> = grid.iter().copied().filter(|t| *t >= T::zero()).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let values: Vec<T> = sorted.iter().map(|&t| self.value(t)).collect();
        let monotone = values.windows(2).all(|w| w[1] >= w[0]);
        let mut convex = true;
        for w in sorted.windows(2) {
            let mid = (w[0] + w[1]) / lit(2.0);
            let lhs = self.value(mid);
            let rhs = (self.value(w[0]) + self.value(w[1])) / lit(2.0);
            if lhs > rhs + rhs.abs() * lit(1e-12) {
                convex = false;
            }
        }
        let t_max = sorted.last().copied().unwrap_or(T::zero());
        GaugeDiagnostics {
            zero_at_origin: self.value(T::zero()) == T::zero(),
            monotone,
            midpoint_convex: convex,
            exceeds_threshold: self.value(t_max) > threshold,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GaugeDiagnostics {
    pub zero_at_origin: bool,
    pub monotone: bool,
    pub midpoint_convex: bool,
    pub exceeds_threshold: bool,
}

impl GaugeDiagnostics {
    pub fn all_hold(&self) -> bool {
        self.zero_at_origin && self.monotone && self.midpoint_convex && self.exceeds_threshold
    }
}

/// Evaluates `Φ(t)` with the domain check.
pub fn eval_phi<T: Real>(phi: &OrliczFunction<T>, t: T) -> Result<T> {
    phi.eval(t)
}

/// Feasibility function `g(ρ) = Σ Φ(|aₙ| / ρ)`.
pub fn feasibility<T: Real>(phi: &OrliczFunction<T>, x: &[T], rho: T) -> T {
    x.iter().fold(T::zero(), |acc, a| acc + phi.value(a.abs() / rho))
}

/// Luxemburg norm with the default solver (bracket width ≤ 1e-12·(1 + ρ)).
pub fn luxemburg_norm<T: Real>(phi: &OrliczFunction<T>, x: &[T]) -> Result<T> {
    luxemburg_norm_with(phi, x, &BracketSolver::default())
}

/// Luxemburg norm with an explicit solver.
///
/// The sequence is rescaled by `max |aₙ|` before bisection; the bracket is
/// grown geometrically from there. Returns 0 for the zero sequence.
pub fn luxemburg_norm_with<T: Real>(phi: &OrliczFunction<T>, x: &[T], solver: &BracketSolver<T>) -> Result<T> {
    let mut scale = T::zero();
    for a in x {
        if !a.is_finite() {
            return Err(Error::invalid("sequence entries must be finite"));
        }
        scale = scale.max(a.abs());
    }
    if scale == T::zero() {
        return Ok(T::zero());
    }
    let unit_solver = BracketSolver { abs_tol: solver.abs_tol / scale, ..*solver };
    let rho = unit_solver.solve_nonincreasing(
        |r| x.iter().fold(T::zero(), |acc, a| acc + phi.value(a.abs() / scale / r)),
        T::one(),
        Bracket::Hint(T::one()),
    )?;
    Ok(rho * scale)
}

/// The ambient norm of a model space.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", bound(serialize = "T: Real"))]
pub enum NormSpec<T> {
    /// `ℓ_p`, `p ≥ 1`, evaluated in closed form.
    Power { p: T },
    /// Luxemburg norm of an Orlicz gauge, evaluated by bisection.
    Orlicz { phi: OrliczFunction<T> },
    /// `max |aₙ|` (the c₀ model).
    Max,
}

/// Norms whose induced operator norm has a closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactClass {
    L1,
    L2,
    Max,
}

impl<T: Real> NormSpec<T> {
    pub fn power(p: T) -> Result<Self> {
        if !p.is_finite() || p < T::one() {
            return Err(Error::invalid("power norm requires a finite exponent p >= 1"));
        }
        Ok(NormSpec::Power { p })
    }

    pub fn euclidean() -> Self {
        NormSpec::Power { p: lit(2.0) }
    }

    pub fn orlicz(phi: OrliczFunction<T>) -> Self {
        NormSpec::Orlicz { phi }
    }

    /// Closed-form operator-norm class, if any. Orlicz gauges are always
    /// treated as general norms even when they coincide with an ℓ_p.
    pub fn exact_class(&self) -> Option<ExactClass> {
        match self {
            NormSpec::Power { p } if *p == T::one() => Some(ExactClass::L1),
            NormSpec::Power { p } if *p == lit(2.0) => Some(ExactClass::L2),
            NormSpec::Max => Some(ExactClass::Max),
            _ => None,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        self.exact_class() == Some(ExactClass::L2)
    }

    pub fn norm(&self, x: &[T]) -> T {
        self.norm_with(x, &BracketSolver::default())
    }

    /// Norm with an explicit solver for the Luxemburg case.
    pub fn norm_with(&self, x: &[T], solver: &BracketSolver<T>) -> T {
        match self {
            NormSpec::Max => x.iter().fold(T::zero(), |m, a| m.max(a.abs())),
            NormSpec::Power { p } => power_norm(x, *p),
            NormSpec::Orlicz { phi } => luxemburg_norm_with(phi, x, solver).unwrap_or_else(|_| lit(f64::NAN)),
        }
    }
}

fn power_norm<T: Real>(x: &[T], p: T) -> T {
    if p == T::one() {
        return x.iter().fold(T::zero(), |s, a| s + a.abs());
    }
    let scale = x.iter().fold(T::zero(), |m, a| m.max(a.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    if p == lit(2.0) {
        let s = x.iter().fold(T::zero(), |s, a| {
            let r = *a / scale;
            s + r * r
        });
        return scale * s.sqrt();
    }
    let s = x.iter().fold(T::zero(), |s, a| s + (a.abs() / scale).powf(p));
    scale * s.powf(T::one() / p)
}

/// `‖Σ tₙ eₙ‖` of a nonnegative profile in the aggregating norm.
pub fn block_psi_norm<T: Real>(block_norms: &[T], spec: &NormSpec<T>) -> Result<T> {
    if block_norms.iter().any(|t| !(*t >= T::zero())) {
        return Err(Error::invalid("block norms must be nonnegative"));
    }
    match spec {
        NormSpec::Orlicz { phi } => luxemburg_norm(phi, block_norms),
        other => Ok(other.norm(block_norms)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Delta2Verdict {
    Bounded,
    Diverging,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct Delta2Report<T> {
    pub grid: Vec<T>,
    /// `Φ(2t)/Φ(t)` per grid point; `None` where `Φ(t) = 0`.
    pub ratios: Vec<Option<T>>,
    pub verdict: Delta2Verdict,
    /// Grid indices where `Φ(t) = 0` with `t > 0`.
    pub degenerate_points: Vec<usize>,
}

impl<T: Real> Delta2Report<T> {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate_points.is_empty()
    }
}

/// Samples `Φ(2t)/Φ(t)` on a grid decreasing toward zero.
///
/// The verdict is heuristic. `Bounded` means the last quartile of the finite
/// ratios sits within 5% of its median; `Diverging` means the finite ratios
/// are nondecreasing along the grid and grow by at least a factor 2;
/// otherwise `Inconclusive`.
pub fn delta2_margin<T: Real>(phi: &OrliczFunction<T>, grid: &[T]) -> Result<Delta2Report<T>> {
    if grid.is_empty() {
        return Err(Error::invalid("Δ₂ grid must be nonempty"));
    }
    if grid.iter().any(|t| !(*t > T::zero()) || !t.is_finite()) {
        return Err(Error::invalid("Δ₂ grid must consist of positive finite reals"));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("Δ₂ grid must be strictly decreasing"));
    }
    let two: T = lit(2.0);
    let mut ratios = Vec::with_capacity(grid.len());
    let mut degenerate_points = Vec::new();
    for (i, &t) in grid.iter().enumerate() {
        let base = phi.value(t);
        if base == T::zero() {
            degenerate_points.push(i);
            ratios.push(None);
        } else {
            ratios.push(Some(phi.value(two * t) / base));
        }
    }
    let finite: Vec<T> = ratios.iter().flatten().copied().collect();
    let verdict = classify_ratios(&finite);
    Ok(Delta2Report { grid: grid.to_vec(), ratios, verdict, degenerate_points })
}

fn classify_ratios<T: Real>(r: &[T]) -> Delta2Verdict {
    if r.len() < 2 {
        return Delta2Verdict::Inconclusive;
    }
    let q = r.len().div_ceil(4);
    let mut tail: Vec<T> = r[r.len() - q..].to_vec();
    tail.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let median = if q % 2 == 1 { tail[q / 2] } else { (tail[q / 2 - 1] + tail[q / 2]) / lit(2.0) };
    let band: T = lit(0.05);
    if median.is_finite() && tail.iter().all(|v| (*v - median).abs() <= band * median) {
        return Delta2Verdict::Bounded;
    }
    let nondecreasing = r.windows(2).all(|w| w[1] >= w[0]);
    if nondecreasing && r[r.len() - 1] >= lit::<T>(2.0) * r[0] {
        return Delta2Verdict::Diverging;
    }
    Delta2Verdict::Inconclusive
}
