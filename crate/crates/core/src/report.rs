//! Machine-readable output at 12 significant digits.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Rounds to 12 significant digits (non-finite values pass through).
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Fixed scientific notation with 12 significant digits, independent of locale.
pub fn fmt12(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round12(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// JSON with every float rounded to 12 significant digits.
pub fn to_json_value<T: Serialize>(value: &T) -> Result<Value> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    round_value(&mut v);
    Ok(v)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(&to_json_value(value)?).map_err(|e| Error::Config(format!("serialization failed: {e}")))
}

/// A CSV cell: floats via [`fmt12`], everything else via `Display`.
pub enum Cell {
    Float(f64),
    Int(i128),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

/// CSV text with a header row; fields never contain separators in our reports.
pub fn csv(header: &[&str], rows: Vec<Vec<Cell>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row
            .into_iter()
            .map(|c| match c {
                Cell::Float(x) => fmt12(x),
                Cell::Int(i) => i.to_string(),
                Cell::Text(s) => s,
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
