//! JSON documents: Orlicz gauges, norms, projection families, subspaces and
//! stability scenarios, plus the compact `kind:param` shorthand.
//!
//! Matrices are dense and row-major, either nested (`[[a, b], [c, d]]`) or
//! flat (`[a, b, c, d]`).

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decomposition::{make_coordinate_family, ModelSpace, ProjectionFamily, Subspace};
use crate::error::{Error, Result};
use crate::orlicz::{GaugeKind, NormSpec, OrliczFunction};
use crate::scalar::{lit, to_f64, Real};
use crate::scenario::random_transport;

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum OrliczDoc {
    Power {
        p: f64,
    },
    #[serde(alias = "scaled-exp")]
    Exp {
        alpha: f64,
    },
    #[serde(alias = "piecewise-linear")]
    Pwl {
        knots: Vec<(f64, f64)>,
    },
}

impl OrliczDoc {
    fn build<T: Real>(self) -> Result<OrliczFunction<T>> {
        match self {
            OrliczDoc::Power { p } => OrliczFunction::power(lit(p)),
            OrliczDoc::Exp { alpha } => OrliczFunction::scaled_exp(lit(alpha)),
            OrliczDoc::Pwl { knots } => {
                OrliczFunction::piecewise_linear(knots.into_iter().map(|(t, v)| (lit(t), lit(v))).collect())
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum NormDoc {
    Power { p: f64 },
    Orlicz { phi: OrliczDoc },
    Max,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum NormField {
    Short(String),
    Full(NormDoc),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum MatrixDoc {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    #[serde(rename = "N")]
    n: usize,
    norm: Option<NormField>,
    blocks: Option<Vec<MatrixDoc>>,
    coordinate_blocks: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransportDoc {
    epsilon: f64,
    seed: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum TargetDoc {
    Transport {
        transport_of_p: TransportDoc,
    },
    TransportUpper {
        #[serde(rename = "transport_of_P")]
        transport_of_p: TransportDoc,
    },
    Family(FamilyDoc),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    #[serde(rename = "P")]
    p: FamilyDoc,
    #[serde(rename = "J")]
    j: TargetDoc,
    psi: Option<NormField>,
    #[serde(rename = "C")]
    c: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspacesDoc {
    #[serde(rename = "N")]
    n: usize,
    norm: Option<NormField>,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidatesDoc {
    family: FamilyDoc,
    candidates: Vec<Vec<Vec<f64>>>,
    p: Option<f64>,
}

/// Parses `power:2`, `l2`, `l1`, `max`, `exp:1`, `pwl:0,0;1,0;2,1`.
pub fn parse_orlicz<T: Real>(s: &str) -> Result<OrliczFunction<T>> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let num = |a: &str| -> Result<T> {
        a.trim().parse::<f64>().map(lit).map_err(|_| Error::invalid(format!("bad number {a:?} in {s:?}")))
    };
    match kind.trim() {
        "power" => OrliczFunction::power(num(arg)?),
        "exp" | "scaled-exp" => OrliczFunction::scaled_exp(num(arg)?),
        "pwl" => {
            let knots = arg
                .split(';')
                .map(|pair| {
                    let (t, v) =
                        pair.split_once(',').ok_or_else(|| Error::invalid(format!("knot {pair:?} is not t,phi")))?;
                    Ok((num(t)?, num(v)?))
                })
                .collect::<Result<Vec<_>>>()?;
            OrliczFunction::piecewise_linear(knots)
        }
        other => Err(Error::invalid(format!("unknown Orlicz function {other:?}"))),
    }
}

/// Norm shorthand: `l1`, `l2`, `max`, `power:p` (closed-form ℓ_p), or an
/// Orlicz gauge prefixed with `orlicz:` (`orlicz:power:2`, `orlicz:exp:1`).
pub fn parse_norm<T: Real>(s: &str) -> Result<NormSpec<T>> {
    let s = s.trim();
    match s {
        "l1" => return NormSpec::power(T::one()),
        "l2" => return Ok(NormSpec::euclidean()),
        "max" | "linf" | "c0" => return Ok(NormSpec::Max),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("orlicz:") {
        return Ok(NormSpec::orlicz(parse_orlicz(rest)?));
    }
    if let Some(rest) = s.strip_prefix("power:") {
        let p: f64 = rest.trim().parse().map_err(|_| Error::invalid(format!("bad exponent in {s:?}")))?;
        return NormSpec::power(lit(p));
    }
    if s.starts_with("exp:") || s.starts_with("pwl:") {
        return Ok(NormSpec::orlicz(parse_orlicz(s)?));
    }
    Err(Error::invalid(format!("unknown norm {s:?}")))
}

fn build_norm<T: Real>(doc: NormDoc) -> Result<NormSpec<T>> {
    match doc {
        NormDoc::Power { p } => NormSpec::power(lit(p)),
        NormDoc::Orlicz { phi } => Ok(NormSpec::orlicz(phi.build()?)),
        NormDoc::Max => Ok(NormSpec::Max),
    }
}

fn norm_field<T: Real>(f: Option<NormField>) -> Result<NormSpec<T>> {
    match f {
        None => Ok(NormSpec::euclidean()),
        Some(NormField::Short(s)) => parse_norm(&s),
        Some(NormField::Full(d)) => build_norm(d),
    }
}

/// An Orlicz gauge from a JSON document.
pub fn orlicz_from_json<T: Real>(v: Value) -> Result<OrliczFunction<T>> {
    serde_json::from_value::<OrliczDoc>(v)?.build()
}

/// A norm from a JSON document or shorthand string.
pub fn norm_from_json<T: Real>(v: Value) -> Result<NormSpec<T>> {
    norm_field(Some(serde_json::from_value::<NormField>(v)?))
}

fn matrix<T: Real>(doc: &MatrixDoc, n: usize) -> Result<DMatrix<T>> {
    let flat: Vec<f64> = match doc {
        MatrixDoc::Nested(rows) => {
            if rows.len() != n {
                return Err(Error::Dimension { expected: n, found: rows.len() });
            }
            if let Some(r) = rows.iter().find(|r| r.len() != n) {
                return Err(Error::Dimension { expected: n, found: r.len() });
            }
            rows.concat()
        }
        MatrixDoc::Flat(v) => {
            if v.len() != n * n {
                return Err(Error::Dimension { expected: n * n, found: v.len() });
            }
            v.clone()
        }
    };
    Ok(DMatrix::from_row_iterator(n, n, flat.into_iter().map(lit)))
}

fn build_family<T: Real>(doc: FamilyDoc) -> Result<ProjectionFamily<T>> {
    let space = ModelSpace::new(doc.n, norm_field(doc.norm)?)?;
    match (doc.blocks, doc.coordinate_blocks) {
        (Some(blocks), None) => {
            let mats = blocks.iter().map(|b| matrix(b, doc.n)).collect::<Result<Vec<_>>>()?;
            ProjectionFamily::from_blocks(space, mats)
        }
        (None, Some(sizes)) => make_coordinate_family(space, &sizes),
        _ => Err(Error::invalid("family document needs exactly one of \"blocks\" or \"coordinate_blocks\"")),
    }
}

/// A projection family from a JSON document; shapes are checked, the
/// algebraic relations are left to [`crate::decomposition::validate_family`].
pub fn family_from_json<T: Real>(v: Value) -> Result<ProjectionFamily<T>> {
    build_family(serde_json::from_value::<FamilyDoc>(v)?)
}

/// Serializable form of a family, with blocks as nested row-major lists.
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct FamilyOut<T> {
    #[serde(rename = "N")]
    pub n: usize,
    pub norm: NormSpec<T>,
    pub blocks: Vec<Vec<Vec<T>>>,
}

pub fn family_to_json<T: Real>(fam: &ProjectionFamily<T>) -> Result<Value> {
    let out = FamilyOut {
        n: fam.dim(),
        norm: fam.space().norm.clone(),
        blocks: fam.blocks().iter().map(|b| b.row_iter().map(|r| r.iter().copied().collect()).collect()).collect(),
    };
    Ok(serde_json::to_value(out)?)
}

/// A loaded stability scenario.
#[derive(Clone, Debug)]
pub struct Scenario<T: Real> {
    pub p: ProjectionFamily<T>,
    pub j: ProjectionFamily<T>,
    pub psi: NormSpec<T>,
    pub c: Option<T>,
}

pub fn scenario_from_json<T: Real>(v: Value) -> Result<Scenario<T>> {
    let doc: ScenarioDoc = serde_json::from_value(v)?;
    let p = build_family::<T>(doc.p)?;
    let j = match doc.j {
        TargetDoc::Transport { transport_of_p: t } | TargetDoc::TransportUpper { transport_of_p: t } => {
            random_transport(&p, lit(t.epsilon), t.seed)?.1
        }
        TargetDoc::Family(f) => {
            let j = build_family::<T>(f)?;
            if j.space() != p.space() {
                return Err(Error::invalid("P and J must share the ambient space"));
            }
            j
        }
    };
    let c = match doc.c {
        Some(c) if !(c > 0.0) => return Err(Error::invalid("C must be positive")),
        other => other.map(lit),
    };
    Ok(Scenario { p, j, psi: norm_field(doc.psi)?, c })
}

fn spanned<T: Real>(space: &ModelSpace<T>, vectors: &[Vec<f64>]) -> Result<Subspace<T>> {
    if vectors.is_empty() {
        return Err(Error::invalid("a subspace needs at least one spanning vector"));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != space.dim) {
        return Err(Error::Dimension { expected: space.dim, found: v.len() });
    }
    let m = DMatrix::from_iterator(space.dim, vectors.len(), vectors.iter().flatten().map(|v| lit(*v)));
    Subspace::new(space.clone(), &m)
}

/// Two subspaces of a common ambient, each given by spanning vectors.
pub fn subspaces_from_json<T: Real>(v: Value) -> Result<(Subspace<T>, Subspace<T>)> {
    let doc: SubspacesDoc = serde_json::from_value(v)?;
    let space = ModelSpace::new(doc.n, norm_field(doc.norm)?)?;
    Ok((spanned(&space, &doc.a)?, spanned(&space, &doc.b)?))
}

/// A family with one candidate subspace per block and an aggregate exponent.
pub fn candidates_from_json<T: Real>(v: Value) -> Result<(ProjectionFamily<T>, Vec<Subspace<T>>, T)> {
    let doc: CandidatesDoc = serde_json::from_value(v)?;
    let fam = build_family::<T>(doc.family)?;
    let subs = doc.candidates.iter().map(|c| spanned(fam.space(), c)).collect::<Result<Vec<_>>>()?;
    Ok((fam, subs, lit(doc.p.unwrap_or(1.0))))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Comma-separated numbers, e.g. `3,4`.
pub fn parse_vector<T: Real>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map(lit).map_err(|_| Error::invalid(format!("bad number {t:?}"))))
        .collect()
}

/// Short label for a norm, used in CSV rows.
pub fn norm_label<T: Real>(norm: &NormSpec<T>) -> String {
    match norm {
        NormSpec::Power { p } => format!("power:{}", to_f64(*p)),
        NormSpec::Max => "max".to_string(),
        NormSpec::Orlicz { phi } => match phi.kind() {
            GaugeKind::Power { p } => format!("orlicz:power:{}", to_f64(*p)),
            GaugeKind::ScaledExp { alpha } => format!("orlicz:exp:{}", to_f64(*alpha)),
            GaugeKind::PiecewiseLinear { knots } => format!("orlicz:pwl[{}]", knots.len()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn orlicz_documents() {
        let p: OrliczFunction<f64> = orlicz_from_json(json!({"kind": "power", "p": 2})).unwrap();
        assert_eq!(p, OrliczFunction::power(2.0).unwrap());
        let e: OrliczFunction<f64> = orlicz_from_json(json!({"kind": "exp", "alpha": 1.5})).unwrap();
        assert_eq!(e, OrliczFunction::scaled_exp(1.5).unwrap());
        let w: OrliczFunction<f64> =
            orlicz_from_json(json!({"kind": "pwl", "knots": [[0, 0], [1, 0], [2, 1]]})).unwrap();
        assert!(w.is_degenerate());
        assert!(orlicz_from_json::<f64>(json!({"kind": "power", "p": 0.5})).is_err());
        assert!(orlicz_from_json::<f64>(json!({"kind": "cosh"})).is_err());
        // serialized gauges read back unchanged
        let again: OrliczFunction<f64> = orlicz_from_json(serde_json::to_value(&w).unwrap()).unwrap();
        assert_eq!(again, w);
    }

    #[test]
    fn norm_shorthands() {
        assert_eq!(parse_norm::<f64>("l2").unwrap(), NormSpec::euclidean());
        assert_eq!(parse_norm::<f64>("power:3").unwrap(), NormSpec::power(3.0).unwrap());
        assert_eq!(parse_norm::<f64>("max").unwrap(), NormSpec::Max);
        assert_eq!(parse_norm::<f64>("exp:1").unwrap(), NormSpec::orlicz(OrliczFunction::scaled_exp(1.0).unwrap()));
        assert_eq!(parse_norm::<f64>("orlicz:power:2").unwrap(), NormSpec::orlicz(OrliczFunction::power(2.0).unwrap()));
        assert!(parse_norm::<f64>("power:x").is_err());
        assert!(parse_norm::<f64>("l7").is_err());
        let n: NormSpec<f64> = norm_from_json(json!({"kind": "orlicz", "phi": {"kind": "exp", "alpha": 2}})).unwrap();
        assert_eq!(n, NormSpec::orlicz(OrliczFunction::scaled_exp(2.0).unwrap()));
        let round: NormSpec<f64> = norm_from_json(serde_json::to_value(&n).unwrap()).unwrap();
        assert_eq!(round, n);
    }

    #[test]
    fn family_documents() {
        let a: ProjectionFamily<f64> =
            family_from_json(json!({"N": 2, "blocks": [[[1, 0], [0, 0]], [0, 0, 0, 1]]})).unwrap();
        let b: ProjectionFamily<f64> =
            family_from_json(json!({"N": 2, "norm": "l2", "coordinate_blocks": [1, 1]})).unwrap();
        assert_eq!(a, b);
        let round: ProjectionFamily<f64> = family_from_json(family_to_json(&a).unwrap()).unwrap();
        assert_eq!(round, a);
        assert!(family_from_json::<f64>(json!({"N": 2, "blocks": [[1, 0, 0]]})).is_err());
        assert!(family_from_json::<f64>(json!({"N": 2})).is_err());
        assert!(family_from_json::<f64>(json!({"N": 3, "coordinate_blocks": [1, 1]})).is_err());
        // row-major: the off-diagonal entry lands in row 0
        let r: ProjectionFamily<f64> =
            family_from_json(json!({"N": 2, "blocks": [[1, 0.5, 0, 0], [0, -0.5, 0, 1]]})).unwrap();
        assert_eq!(r.block(0)[(0, 1)], 0.5);
    }

    #[test]
    fn scenario_documents() {
        let s: Scenario<f64> = scenario_from_json(json!({
            "P": {"N": 4, "coordinate_blocks": [2, 2]},
            "J": {"transport_of_P": {"epsilon": 0.01, "seed": 3}},
            "psi": "l2"
        }))
        .unwrap();
        assert_eq!(s.j.len(), 2);
        assert_ne!(s.j, s.p);
        let again: Scenario<f64> = scenario_from_json(json!({
            "P": {"N": 4, "coordinate_blocks": [2, 2]},
            "J": {"transport_of_P": {"epsilon": 0.01, "seed": 3}}
        }))
        .unwrap();
        assert_eq!(again.j, s.j);
        assert!(scenario_from_json::<f64>(json!({
            "P": {"N": 4, "coordinate_blocks": [2, 2]},
            "J": {"N": 4, "norm": "max", "coordinate_blocks": [2, 2]}
        }))
        .is_err());
    }

    #[test]
    fn subspace_and_vector_documents() {
        let (a, b): (Subspace<f64>, Subspace<f64>) =
            subspaces_from_json(json!({"N": 3, "A": [[1, 0, 0]], "B": [[0, 1, 0], [0, 0, 1]]})).unwrap();
        assert_eq!((a.dim(), b.dim()), (1, 2));
        assert!(subspaces_from_json::<f64>(json!({"N": 3, "A": [[1, 0]], "B": [[0, 1, 0]]})).is_err());
        assert_eq!(parse_vector::<f64>("3, 4").unwrap(), vec![3.0, 4.0]);
        assert!(parse_vector::<f64>("3,x").is_err());
    }
}
