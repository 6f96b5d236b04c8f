//! CSV and JSON emission.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::estimate::ConstantEstimate;
use crate::scalar::{to_f64, Real};

/// One CSV row per named constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantRow {
    pub name: String,
    pub value: f64,
    pub method: String,
    pub witness: String,
    pub trials: usize,
    pub upper_bound: Option<f64>,
    pub lower_bound: Option<f64>,
}

impl ConstantRow {
    pub fn new<T: Real>(name: impl Into<String>, est: &ConstantEstimate<T>) -> Self {
        ConstantRow {
            name: name.into(),
            value: to_f64(est.value),
            method: est.method.as_str().to_string(),
            witness: est.witness.describe(),
            trials: est.trials,
            upper_bound: est.upper_bound.map(to_f64),
            lower_bound: est.lower_bound.map(to_f64),
        }
    }
}

/// Writes flat rows as CSV with a header row.
pub fn write_csv<R: Serialize, W: Write>(rows: &[R], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Pretty-printed JSON with a trailing newline.
pub fn json_string<V: Serialize + ?Sized>(value: &V) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::{Method, Witness};

    #[test]
    fn constant_rows_in_csv() {
        let est = ConstantEstimate::new(1.5f64, Method::SampledLowerBound, Witness::Signs { signs: vec![1, -1] }, 7)
            .with_upper_bound(2.0);
        let rows = vec![ConstantRow::new("riesz, sampled", &est)];
        let text = csv_string(&rows).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "name,value,method,witness,trials,upper_bound,lower_bound");
        assert_eq!(lines.next().unwrap(), "\"riesz, sampled\",1.5,sampled-lower-bound,signs:+-,7,2.0,");
    }

    #[test]
    fn json_mirrors_the_estimate() {
        let est = ConstantEstimate::new(1.0f64, Method::SpectralExact, Witness::Vector { vector: vec![1.0, 0.0] }, 1);
        let v: serde_json::Value = serde_json::from_str(&json_string(&est).unwrap()).unwrap();
        assert_eq!(v["method"], "spectral-exact");
        assert_eq!(v["witness"]["kind"], "vector");
        assert!(v.get("upper_bound").is_none());
    }
}
