use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::orlicz::NormSpec;
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug)]
pub struct AscentOptions {
    /// How many of the best starting points are refined by local ascent.
    pub restarts: usize,
    /// A sweep that improves the objective by less than this (relative) ends the search.
    pub rel_gain: f64,
    /// Smallest step, relative to the largest coordinate.
    pub min_step: f64,
    pub max_sweeps: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions { restarts: 8, rel_gain: 1e-8, min_step: 1e-10, max_sweeps: 400 }
    }
}

/// Maximizes `f` from a set of candidate points.
///
/// Every start is evaluated; the best `opts.restarts` are then refined by
/// coordinate-wise perturbation ascent. Restarts run in parallel and the
/// reduction keeps the lowest-index maximizer, so results do not depend on
/// the thread count.
pub fn maximize<T, F>(f: F, starts: Vec<DVector<T>>, opts: &AscentOptions) -> (DVector<T>, T)
where
    T: Real,
    F: Fn(&DVector<T>) -> T + Sync,
{
    assert!(!starts.is_empty(), "maximize needs at least one starting point");
    let scored: Vec<(usize, T)> = starts.par_iter().map(&f).enumerate().collect();
    let mut order: Vec<(usize, T)> = scored.into_iter().filter(|(_, v)| v.is_finite()).collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    if order.is_empty() {
        return (starts[0].clone(), f(&starts[0]));
    }
    order.truncate(opts.restarts.max(1));
    let refined: Vec<(DVector<T>, T)> =
        order.par_iter().map(|&(i, v)| ascend(&f, starts[i].clone(), v, opts)).collect();
    refined.into_iter().reduce(|best, cand| if cand.1 > best.1 { cand } else { best }).expect("nonempty")
}

fn ascend<T, F>(f: &F, mut x: DVector<T>, mut value: T, opts: &AscentOptions) -> (DVector<T>, T)
where
    T: Real,
    F: Fn(&DVector<T>) -> T,
{
    let scale = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let scale = if scale > T::zero() { scale } else { T::one() };
    let mut step = scale * lit(0.25);
    let min_step = scale * lit(opts.min_step);
    let rel_gain: T = lit(opts.rel_gain);
    for _ in 0..opts.max_sweeps {
        let before = value;
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [step, -step] {
                let old = x[i];
                x[i] = old + dir;
                let v = f(&x);
                if v > value {
                    value = v;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            step /= lit(2.0);
            if step < min_step {
                break;
            }
        } else if value - before <= rel_gain * before.abs() && step <= min_step * lit(1e4) {
            break;
        }
    }
    (x, value)
}

/// `min_c ‖x − B c‖` in the given norm, for `B` with orthonormal columns.
///
/// Exact in ℓ₂. Otherwise a compass search over coefficients (coordinate and,
/// for small bases, pairwise diagonal directions) started from the Euclidean
/// projection, refined until the step drops below 1e-10 of the scale.
/// Returns the distance and the minimizing coefficients.
pub fn distance_to_span<T: Real>(x: &DVector<T>, basis: &DMatrix<T>, norm: &NormSpec<T>) -> (T, DVector<T>) {
    let r = basis.ncols();
    let mut c = basis.transpose() * x;
    if r == 0 {
        return (norm.norm(x.as_slice()), c);
    }
    let residual = |c: &DVector<T>| norm.norm((x - basis * c).as_slice());
    if norm.is_euclidean() {
        return (residual(&c), c);
    }
    let mut best = residual(&c);
    let scale = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return (best, c);
    }
    let mut directions: Vec<DVector<T>> = Vec::new();
    for i in 0..r {
        let mut d = DVector::zeros(r);
        d[i] = T::one();
        directions.push(d);
    }
    if r <= 8 {
        for i in 0..r {
            for j in (i + 1)..r {
                for s in [T::one(), -T::one()] {
                    let mut d = DVector::zeros(r);
                    d[i] = T::one();
                    d[j] = s;
                    directions.push(d);
                }
            }
        }
    }
    let mut step = scale * lit(0.5);
    let min_step = scale * lit(1e-10);
    let mut guard = 0usize;
    while step >= min_step && guard < 100_000 {
        guard += 1;
        let mut improved = false;
        for d in &directions {
            for sign in [T::one(), -T::one()] {
                let cand = &c + d * (step * sign);
                let v = residual(&cand);
                if v < best {
                    best = v;
                    c = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= lit(2.0);
        }
    }
    (best, c)
}
