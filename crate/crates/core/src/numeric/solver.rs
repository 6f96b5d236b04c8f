use crate::error::{Error, Result};
use crate::scalar::{lit, tol_floor, Real};

/// Initial bracket for [`BracketSolver::solve_nonincreasing`].
#[derive(Clone, Copy, Debug)]
pub enum Bracket<T> {
    /// A positive starting point; the bracket is grown geometrically around it.
    Hint(T),
    /// A fixed interval `[lo, hi]` that must already contain the crossing.
    Fixed(T, T),
}

/// Bisection on a monotone function.
///
/// Stops once the bracket width is at most `abs_tol + rel_tol * |x|`, or when
/// the midpoint no longer separates the endpoints in floating point.
#[derive(Clone, Copy, Debug)]
pub struct BracketSolver<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_iterations: usize,
    pub max_expansions: usize,
}

impl<T: Real> Default for BracketSolver<T> {
    fn default() -> Self {
        Self::new(1e-12, 1e-12)
    }
}

impl<T: Real> BracketSolver<T> {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        BracketSolver {
            abs_tol: tol_floor(abs_tol),
            rel_tol: tol_floor(rel_tol),
            max_iterations: 4096,
            max_expansions: 200,
        }
    }

    /// Solver that bisects down to floating-point resolution.
    pub fn exhaustive() -> Self {
        BracketSolver { abs_tol: T::zero(), rel_tol: T::zero(), max_iterations: 4096, max_expansions: 200 }
    }

    /// Finds the smallest `x` (to tolerance) with `f(x) <= target`, for `f`
    /// nonincreasing on the bracket.
    ///
    /// The returned point always satisfies `f(x) <= target`; the crossing lies
    /// in `[x - width, x]`.
    pub fn solve_nonincreasing<F>(&self, mut f: F, target: T, bracket: Bracket<T>) -> Result<T>
    where
        F: FnMut(T) -> T,
    {
        let two: T = lit(2.0);
        let (mut lo, mut hi) = match bracket {
            Bracket::Fixed(lo, hi) => {
                if !(lo < hi) {
                    return Err(Error::invalid("bracket must satisfy lo < hi"));
                }
                if !(f(hi) <= target) {
                    return Err(Error::Nonconvergence(
                        "fixed bracket does not contain a crossing (f(hi) > target)".into(),
                    ));
                }
                if f(lo) <= target {
                    return Ok(lo);
                }
                (lo, hi)
            }
            Bracket::Hint(h) => {
                if !(h > T::zero()) || !h.is_finite() {
                    return Err(Error::invalid("bracket hint must be positive and finite"));
                }
                if f(h) <= target {
                    // shrink downward until infeasible
                    let mut hi = h;
                    let mut lo = h / two;
                    let mut n = 0;
                    while f(lo) <= target {
                        n += 1;
                        if n > self.max_expansions || lo <= T::min_value().unwrap_or(T::zero()) {
                            return Err(Error::Nonconvergence(format!(
                                "no sign change after {} bracket contractions",
                                self.max_expansions
                            )));
                        }
                        hi = lo;
                        lo /= two;
                    }
                    (lo, hi)
                } else {
                    let mut lo = h;
                    let mut hi = h * two;
                    let mut n = 0;
                    while !(f(hi) <= target) {
                        n += 1;
                        if n > self.max_expansions || !hi.is_finite() {
                            return Err(Error::Nonconvergence(format!(
                                "no sign change after {} bracket expansions",
                                self.max_expansions
                            )));
                        }
                        lo = hi;
                        hi *= two;
                    }
                    (lo, hi)
                }
            }
        };

        for _ in 0..self.max_iterations {
            if hi - lo <= self.abs_tol + self.rel_tol * hi.abs() {
                return Ok(hi);
            }
            let mid = lo + (hi - lo) / two;
            if !(mid > lo && mid < hi) {
                return Ok(hi);
            }
            if f(mid) <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Nonconvergence(format!("bisection did not reach tolerance in {} iterations", self.max_iterations)))
    }
}
