//! One-parameter sweeps producing flat, CSV-ready rows.
//!
//! A failure at one grid point is recorded in that row's `error` column and
//! the sweep continues.

use std::str::FromStr;

use serde::Serialize;

use crate::decomposition::ProjectionFamily;
use crate::error::{Error, Result};
use crate::geometry::khintchine_constants;
use crate::orlicz::NormSpec;
use crate::scalar::{lit, to_f64, Real};
use crate::scenario::{line_pair, random_transport};
use crate::stability::{hilbertian_stability_check, opening};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    Epsilon,
    /// Angle in degrees.
    Angle,
    P,
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epsilon" => Ok(SweepParameter::Epsilon),
            "angle" => Ok(SweepParameter::Angle),
            "p" => Ok(SweepParameter::P),
            other => Err(Error::invalid(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

/// Parses `a,b,c`, `lin:a:b:n` or `log:a:b:n`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad grid value {t:?}")));
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [kind @ ("lin" | "log"), a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| Error::invalid(format!("bad point count {n:?}")))?;
            if n == 0 {
                return Err(Error::invalid("grid needs at least one point"));
            }
            if *kind == "log" && !(a > 0.0 && b > 0.0) {
                return Err(Error::invalid("log grid endpoints must be positive"));
            }
            (0..n)
                .map(|i| {
                    let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    if *kind == "lin" {
                        a + (b - a) * t
                    } else {
                        (a.ln() + (b.ln() - a.ln()) * t).exp()
                    }
                })
                .collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::invalid(format!("cannot read grid {s:?}"))),
    };
    check_grid(&grid)?;
    Ok(grid)
}

/// A grid must be nonempty, finite and strictly monotone.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("grid values must be finite"));
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(Error::invalid("grid must be strictly monotone"));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    pub sigma: Option<f64>,
    pub sigma_method: Option<String>,
    pub c_hilbertian: Option<f64>,
    pub threshold: Option<f64>,
    pub hypothesis_met: Option<bool>,
    pub marginal: Option<bool>,
    pub rank_p0: Option<usize>,
    pub rank_j0: Option<usize>,
    pub gamma: Option<f64>,
    pub r_norm: Option<f64>,
    pub s_condition: Option<f64>,
    pub similarity_residual: Option<f64>,
    pub verdict: Option<String>,
    pub error: Option<String>,
}

/// Transports `p` by `I + εT/√N` (fixed `seed`) for each ε and runs the
/// Hilbertian stability check against it.
pub fn epsilon_sweep<T: Real>(
    p: &ProjectionFamily<T>,
    psi: &NormSpec<T>,
    c: Option<T>,
    grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<EpsilonRow>> {
    check_grid(grid)?;
    Ok(grid
        .iter()
        .map(|&eps| {
            let run = || {
                let (_, j) = random_transport(p, lit(eps), seed)?;
                hilbertian_stability_check(p, &j, psi, c, samples, seed)
            };
            match run() {
                Ok(r) => EpsilonRow {
                    epsilon: eps,
                    sigma: r.sigma.map(to_f64),
                    sigma_method: r.sigma_method.map(|m| m.as_str().to_string()),
                    c_hilbertian: r.c_hilbertian.map(to_f64),
                    threshold: r.threshold.map(to_f64),
                    hypothesis_met: r.hypothesis_met,
                    marginal: Some(r.marginal),
                    rank_p0: Some(r.rank_p0),
                    rank_j0: Some(r.rank_j0),
                    gamma: r.gamma.map(to_f64),
                    r_norm: Some(to_f64(r.r_norm)),
                    s_condition: Some(to_f64(r.s_condition)),
                    similarity_residual: r.similarity_residual.map(to_f64),
                    verdict: Some(r.verdict.as_str().to_string()),
                    error: None,
                },
                Err(e) => EpsilonRow { epsilon: eps, error: Some(e.to_string()), ..Default::default() },
            }
        })
        .collect())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AngleRow {
    pub angle_deg: f64,
    pub theta: Option<f64>,
    pub direction_ab: Option<f64>,
    pub direction_ba: Option<f64>,
    pub method: Option<String>,
    pub error: Option<String>,
}

/// Opening between two lines in the plane at each angle (degrees).
pub fn angle_sweep<T: Real>(norm: &NormSpec<T>, grid: &[f64], samples: usize, seed: u64) -> Result<Vec<AngleRow>> {
    check_grid(grid)?;
    Ok(grid
        .iter()
        .map(|&deg| {
            let run = || {
                let (a, b) = line_pair(lit::<T>(deg.to_radians()), norm.clone())?;
                opening(&a, &b, norm, samples, seed)
            };
            match run() {
                Ok(r) => AngleRow {
                    angle_deg: deg,
                    theta: Some(to_f64(r.theta)),
                    direction_ab: Some(to_f64(r.direction_ab)),
                    direction_ba: Some(to_f64(r.direction_ba)),
                    method: Some(r.method.as_str().to_string()),
                    error: None,
                },
                Err(e) => AngleRow { angle_deg: deg, error: Some(e.to_string()), ..Default::default() },
            }
        })
        .collect())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct KhintchineRow {
    pub p: f64,
    pub a_p: Option<f64>,
    pub b_p: Option<f64>,
    pub p0: Option<f64>,
    pub error: Option<String>,
}

pub fn khintchine_sweep<T: Real>(grid: &[f64]) -> Result<Vec<KhintchineRow>> {
    check_grid(grid)?;
    Ok(grid
        .iter()
        .map(|&p| match khintchine_constants::<T>(lit(p)) {
            Ok(k) => KhintchineRow {
                p,
                a_p: Some(to_f64(k.a_p)),
                b_p: Some(to_f64(k.b_p)),
                p0: Some(to_f64(k.p0)),
                error: None,
            },
            Err(e) => KhintchineRow { p, error: Some(e.to_string()), ..Default::default() },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{make_coordinate_family, ModelSpace};

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1,2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("lin:0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_grid("log:1e-3:1e-1:3").unwrap();
        assert!((g[1] - 1e-2).abs() < 1e-15);
        assert!(parse_grid("3,2,2").is_err());
        assert!(parse_grid("").is_err());
        assert!(parse_grid("lin:0:1:0").is_err());
        assert!(parse_grid("3,2,1").is_ok());
    }

    #[test]
    fn epsilon_sweep_sigma_increases() {
        let p = make_coordinate_family(ModelSpace::<f64>::euclidean(8).unwrap(), &[2, 2, 2, 2]).unwrap();
        let grid = parse_grid("log:1e-3:1e-1:5").unwrap();
        let rows = epsilon_sweep(&p, &NormSpec::euclidean(), None, &grid, 0, 7).unwrap();
        let sig: Vec<f64> = rows.iter().map(|r| r.sigma.unwrap()).collect();
        assert!(sig.windows(2).all(|w| w[1] > w[0]), "{sig:?}");
        assert!(rows.iter().all(|r| r.error.is_none()));
    }

    #[test]
    fn angle_sweep_matches_sine() {
        let grid: Vec<f64> = (1..90).map(f64::from).collect();
        for r in angle_sweep::<f64>(&NormSpec::euclidean(), &grid, 0, 0).unwrap() {
            assert!((r.theta.unwrap() - r.angle_deg.to_radians().sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn failing_points_stay_in_the_table() {
        let rows = khintchine_sweep::<f64>(&[-1.0, 1.0, 2.0]).unwrap();
        assert!(rows[0].error.is_some());
        assert_eq!(rows[2].a_p, Some(1.0));
        assert_eq!(rows.len(), 3);
    }
}
