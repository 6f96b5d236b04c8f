//! Rendering of reports as text, CSV or JSON.
//!
//! Values arrive already computed; nothing here does arithmetic beyond
//! rounding numbers for the text view.

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

pub enum Report {
    /// One structured report. `headline`, when set, replaces the text view.
    Single { value: Value, headline: Option<String> },
    /// A table of flat rows.
    Rows(Vec<Value>),
}

impl Report {
    pub fn single(value: Value) -> Self {
        Report::Single { value, headline: None }
    }
}

pub fn render(report: &Report, format: Format) -> Result<String, csv::Error> {
    match (report, format) {
        (Report::Single { value, .. }, Format::Json) => Ok(pretty(value)),
        (Report::Rows(rows), Format::Json) => Ok(pretty(&Value::Array(rows.clone()))),
        (Report::Single { value, .. }, Format::Csv) => csv_table(std::slice::from_ref(value)),
        (Report::Rows(rows), Format::Csv) => csv_table(rows),
        (Report::Single { headline: Some(h), .. }, Format::Text) => Ok(format!("{h}\n")),
        (Report::Single { value, .. }, Format::Text) => Ok(text_fields(value)),
        (Report::Rows(rows), Format::Text) => Ok(text_table(rows)),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Flattens nested objects into dotted keys. Arrays of scalars are joined
/// with `;`, anything deeper is kept as compact JSON.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

fn cell(v: &Value, text: bool) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if text => n.as_f64().map(round12).unwrap_or_else(|| n.to_string()),
        Value::Array(xs) if xs.iter().all(|x| !x.is_array() && !x.is_object()) => {
            xs.iter().map(|x| cell(x, text)).collect::<Vec<_>>().join(";")
        }
        Value::Array(xs) if text && xs.iter().all(Value::is_array) => {
            let cols = xs.first().and_then(Value::as_array).map_or(0, Vec::len);
            format!("[{}x{cols} matrix]", xs.len())
        }
        other => other.to_string(),
    }
}

/// Twelve significant digits, shortest form.
pub fn round12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r != 0.0 && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

fn flat_rows(rows: &[Value]) -> (Vec<String>, Vec<Vec<(String, Value)>>) {
    let mut header: Vec<String> = Vec::new();
    let flat: Vec<Vec<(String, Value)>> = rows
        .iter()
        .map(|r| {
            let mut f = Vec::new();
            flatten("", r, &mut f);
            for (k, _) in &f {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
            f
        })
        .collect();
    (header, flat)
}

fn lookup<'a>(row: &'a [(String, Value)], key: &str) -> Option<&'a Value> {
    row.iter().find(|(k, _)| k == key).map(|(_, v)| v)
}

fn csv_table(rows: &[Value]) -> Result<String, csv::Error> {
    let (header, flat) = flat_rows(rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in &flat {
        w.write_record(header.iter().map(|k| lookup(row, k).map_or(String::new(), |v| cell(v, false))))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn text_fields(v: &Value) -> String {
    let mut f = Vec::new();
    flatten("", v, &mut f);
    let width = f.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    f.iter().map(|(k, v)| format!("{k:<width$}  {}\n", cell(v, true))).collect()
}

fn text_table(rows: &[Value]) -> String {
    let (header, flat) = flat_rows(rows);
    let cells: Vec<Vec<String>> = flat
        .iter()
        .map(|row| header.iter().map(|k| lookup(row, k).map_or(String::new(), |v| cell(v, true))).collect())
        .collect();
    let widths: Vec<usize> = header
        .iter()
        .enumerate()
        .map(|(i, h)| cells.iter().map(|r| r[i].chars().count()).chain([h.chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |items: &[String]| {
        let parts: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(&header);
    for r in &cells {
        out.push_str(&line(r));
    }
    out
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}
