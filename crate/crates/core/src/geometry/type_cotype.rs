//! Sample-based checks of block-norm sandwiches and of Orlicz–Rademacher
//! type, cotype, infratype and M-cotype inequalities.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::ProjectionFamily;
use crate::error::{Error, Result};
use crate::numeric::{gaussian_vector, seeded_rng};
use crate::orlicz::NormSpec;
use crate::scalar::{lit, Real};

use super::probe_points;
use super::rademacher::{min_max_sign_norm, rademacher_average, AveragePower, SignMode};

/// Relative slack below which an inequality counts as violated.
pub const VIOLATION_TOL: f64 = 1e-10;

/// Largest vector set accepted by [`or_type_probe`].
pub const MAX_PROBE_SET: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct TypeCotypeReport<T> {
    pub checked: usize,
    pub violations: usize,
    pub violations_left: usize,
    pub violations_right: usize,
    /// `min (‖x‖ − C‖t‖_Ψ)/‖x‖`
    pub min_margin_left: T,
    /// `min (T‖t‖_Φ − ‖x‖)/‖x‖`
    pub min_margin_right: T,
    pub left_witness: Vec<T>,
    pub right_witness: Vec<T>,
}

/// Checks `c·‖(‖Pₙx‖)‖_Ψ ≤ ‖x‖ ≤ t·‖(‖Pₙx‖)‖_Φ` on `samples` unit vectors
/// plus coordinate and block-aligned vectors.
///
/// `phi` and `psi` are the aggregate norms on block-norm profiles; power
/// gauges may be given in closed form.
pub fn type_cotype_check<T: Real>(
    fam: &ProjectionFamily<T>,
    phi: &NormSpec<T>,
    psi: &NormSpec<T>,
    t: T,
    c: T,
    samples: usize,
    seed: u64,
) -> Result<TypeCotypeReport<T>> {
    if !(t > T::zero() && c > T::zero()) {
        return Err(Error::invalid("sandwich constants must be positive"));
    }
    let points = probe_points(fam, samples, seed);
    let tol: T = lit(-VIOLATION_TOL);
    let margins: Vec<(T, T)> = points
        .par_iter()
        .map(|x| {
            let nx = fam.space().norm_of(x);
            let profile = fam.block_norms(x);
            let left = (nx - c * psi.norm(&profile)) / nx;
            let right = (t * phi.norm(&profile) - nx) / nx;
            (left, right)
        })
        .collect();
    let mut report = TypeCotypeReport {
        checked: points.len(),
        violations: 0,
        violations_left: 0,
        violations_right: 0,
        min_margin_left: T::max_value().unwrap(),
        min_margin_right: T::max_value().unwrap(),
        left_witness: vec![],
        right_witness: vec![],
    };
    for (x, (l, r)) in points.iter().zip(margins) {
        let bad_l = !(l >= tol);
        let bad_r = !(r >= tol);
        report.violations_left += bad_l as usize;
        report.violations_right += bad_r as usize;
        report.violations += (bad_l || bad_r) as usize;
        if lowers(l, report.min_margin_left) {
            report.min_margin_left = l;
            report.left_witness = x.as_slice().to_vec();
        }
        if lowers(r, report.min_margin_right) {
            report.min_margin_right = r;
            report.right_witness = x.as_slice().to_vec();
        }
    }
    Ok(report)
}

/// True when `cand` should replace the running minimum `current`; a NaN
/// margin replaces anything and then stays.
fn lowers<T: Real>(cand: T, current: T) -> bool {
    current.partial_cmp(&current).is_some() && !(cand >= current)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    /// `(𝔼‖Σεⱼxⱼ‖²)^{1/2} ≤ T·‖(‖xⱼ‖)‖_Φ`
    Type,
    /// `(𝔼‖Σεⱼxⱼ‖²)^{1/2} ≥ C·‖(‖xⱼ‖)‖_Ψ`
    Cotype,
    /// `min_ε ‖Σεⱼxⱼ‖ ≤ I·‖(‖xⱼ‖)‖_Φ`
    Infratype,
    /// `max_ε ‖Σεⱼxⱼ‖ ≥ M·‖(‖xⱼ‖)‖_Ψ`
    MCotype,
}

impl ProbeKind {
    /// Upper-type inequalities bound the left side from above.
    pub fn is_upper(self) -> bool {
        matches!(self, ProbeKind::Type | ProbeKind::Infratype)
    }
}

impl std::str::FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "type" => Ok(ProbeKind::Type),
            "cotype" => Ok(ProbeKind::Cotype),
            "infratype" => Ok(ProbeKind::Infratype),
            "m-cotype" | "mcotype" => Ok(ProbeKind::MCotype),
            other => Err(Error::invalid(format!("unknown probe kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct ProbeReport<T> {
    pub kind: ProbeKind,
    pub sets: usize,
    /// Largest ratio for type/infratype, smallest for cotype/M-cotype: a
    /// bound on the best constant from the probed sets.
    pub worst_ratio: T,
    pub worst_set: Option<usize>,
    pub candidate: T,
    pub violations: usize,
}

/// Evaluates one of the four Orlicz–Rademacher inequalities on each set.
///
/// Sets whose aggregate vanishes are skipped.
pub fn or_type_probe<T: Real>(
    sets: &[Vec<DVector<T>>],
    aggregate: &NormSpec<T>,
    norm: &NormSpec<T>,
    candidate: T,
    kind: ProbeKind,
) -> Result<ProbeReport<T>> {
    if let Some(s) = sets.iter().find(|s| s.len() > MAX_PROBE_SET) {
        return Err(Error::Budget { requested: s.len(), limit: MAX_PROBE_SET });
    }
    let ratios: Vec<Option<T>> = sets
        .iter()
        .map(|set| {
            let norms: Vec<T> = set.iter().map(|x| norm.norm(x.as_slice())).collect();
            let agg = aggregate.norm(&norms);
            if !(agg > T::zero()) {
                return Ok(None);
            }
            let lhs = match kind {
                ProbeKind::Type | ProbeKind::Cotype => rademacher_average(set, norm, AveragePower::Quadratic)?,
                ProbeKind::Infratype => min_max_sign_norm(set, norm, SignMode::Min)?.value,
                ProbeKind::MCotype => min_max_sign_norm(set, norm, SignMode::Max)?.value,
            };
            Ok(Some(lhs / agg))
        })
        .collect::<Result<_>>()?;
    let upper = kind.is_upper();
    let slack: T = lit(VIOLATION_TOL);
    let mut worst: Option<(usize, T)> = None;
    let mut violations = 0;
    for (i, r) in ratios.iter().enumerate() {
        let Some(r) = *r else { continue };
        let violated = if upper { r > candidate * (T::one() + slack) } else { r < candidate * (T::one() - slack) };
        violations += violated as usize;
        let better = match worst {
            None => true,
            Some((_, w)) => (upper && r > w) || (!upper && r < w),
        };
        if better {
            worst = Some((i, r));
        }
    }
    Ok(ProbeReport {
        kind,
        sets: sets.len(),
        worst_ratio: worst.map_or(T::zero(), |w| w.1),
        worst_set: worst.map(|w| w.0),
        candidate,
        violations,
    })
}

/// `count` sets of `size` Gaussian vectors in `ℝᵈⁱᵐ`.
pub fn random_vector_sets<T: Real>(dim: usize, count: usize, size: usize, seed: u64) -> Vec<Vec<DVector<T>>> {
    let mut rng = seeded_rng(seed);
    (0..count).map(|_| (0..size).map(|_| gaussian_vector(&mut rng, dim)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{make_coordinate_family, ModelSpace};
    use crate::geometry::khintchine::lp_sandwich;

    fn unit(n: usize, i: usize) -> DVector<f64> {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        e
    }

    #[test]
    fn parseval_has_zero_margins() {
        let fam = make_coordinate_family(ModelSpace::<f64>::euclidean(6).unwrap(), &[2, 2, 2]).unwrap();
        let l2 = NormSpec::euclidean();
        let r = type_cotype_check(&fam, &l2, &l2, 1.0, 1.0, 500, 3).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.min_margin_left.abs() < 1e-14 && r.min_margin_right.abs() < 1e-14);
    }

    #[test]
    fn l1_right_side_is_equality() {
        let space = ModelSpace::<f64>::new(5, NormSpec::power(1.0).unwrap()).unwrap();
        let fam = make_coordinate_family(space, &[1, 2, 2]).unwrap();
        let l1 = NormSpec::power(1.0).unwrap();
        let r = type_cotype_check(&fam, &l1, &NormSpec::Max, 1.0, 1.0, 200, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.min_margin_right.abs() < 1e-14);
    }

    #[test]
    fn lp_three_sandwich_holds_on_samples() {
        let p = 3.0;
        let s = lp_sandwich(p, 1.0).unwrap();
        let space = ModelSpace::new(8, NormSpec::power(p).unwrap()).unwrap();
        let fam = make_coordinate_family(space, &[2, 3, 3]).unwrap();
        let r = type_cotype_check(&fam, &s.right_aggregate, &s.left_aggregate, s.right, s.left, 10_000, 7).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.min_margin_left > 0.0 && r.min_margin_right > 0.0);
    }

    #[test]
    fn tight_constants_are_flagged() {
        let fam = make_coordinate_family(ModelSpace::euclidean(4).unwrap(), &[2, 2]).unwrap();
        let l2 = NormSpec::euclidean();
        let r = type_cotype_check(&fam, &l2, &l2, 0.9, 1.0, 50, 3).unwrap();
        assert_eq!(r.violations_left, 0);
        assert_eq!(r.violations_right, r.checked);
        assert!(type_cotype_check(&fam, &l2, &l2, 0.0, 1.0, 5, 3).is_err());
    }

    #[test]
    fn probe_examples() {
        let l2 = NormSpec::euclidean();
        let singles: Vec<Vec<DVector<f64>>> = random_vector_sets(4, 10, 1, 2);
        for kind in [ProbeKind::Type, ProbeKind::Cotype, ProbeKind::Infratype, ProbeKind::MCotype] {
            let r = or_type_probe(&singles, &l2, &l2, 1.0, kind).unwrap();
            assert!((r.worst_ratio - 1.0).abs() < 1e-14);
            assert_eq!(r.violations, 0);
        }
        let ortho: Vec<Vec<DVector<f64>>> = (1..=5).map(|n| (0..n).map(|i| unit(6, i)).collect()).collect();
        let r = or_type_probe(&ortho, &l2, &l2, 1.0, ProbeKind::Type).unwrap();
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);
        let l1 = NormSpec::power(1.0).unwrap();
        let canon: Vec<Vec<DVector<f64>>> = (1..=6).map(|n| (0..n).map(|i| unit(6, i)).collect()).collect();
        for kind in [ProbeKind::Type, ProbeKind::Cotype, ProbeKind::Infratype, ProbeKind::MCotype] {
            let r = or_type_probe(&canon, &l1, &l1, 1.0, kind).unwrap();
            assert!((r.worst_ratio - 1.0).abs() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn l2_has_type_two_and_not_better() {
        // parallelogram law: 𝔼‖Σεx‖² = Σ‖x‖² in ℓ₂, so type-2 ratio is exactly 1
        let l2 = NormSpec::euclidean();
        let sets = random_vector_sets::<f64>(5, 20, 6, 4);
        let r = or_type_probe(&sets, &l2, &l2, 1.0, ProbeKind::Type).unwrap();
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);
        // with a type-1 aggregate the ratio stays below 1; claiming cotype 1 with C = 1 fails
        let r = or_type_probe(&sets, &NormSpec::power(1.0).unwrap(), &l2, 1.0, ProbeKind::Cotype).unwrap();
        assert!(r.worst_ratio < 1.0);
        assert_eq!(r.violations, 20);
    }

    #[test]
    fn oversized_sets_rejected() {
        let sets = random_vector_sets::<f64>(2, 1, 21, 0);
        assert!(or_type_probe(&sets, &NormSpec::euclidean(), &NormSpec::euclidean(), 1.0, ProbeKind::Type).is_err());
    }
}
