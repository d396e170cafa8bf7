//! JSON matrix files.
//!
//! ```text
//! {
//!   "rows": 2,
//!   "cols": 1,
//!   "entries": [
//!     [[1.0000000000000000e0, 0.0000000000000000e0]],
//!     [[0.0000000000000000e0, 1.0000000000000000e0]]
//!   ]
//! }
//! ```
//!
//! `entries` holds one array per row, each a list of `[re, im]` pairs. The
//! reader also accepts a flat row-major list of pairs. Numbers are written
//! with 17 significant digits so a write/read cycle is lossless.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use super::matrix::{Matrix, C64};
use crate::error::{Error, Result};

fn fmt_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_json_string(m: &Matrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"rows\": {},", m.rows());
    let _ = writeln!(out, "  \"cols\": {},", m.cols());
    let _ = writeln!(out, "  \"entries\": [");
    for i in 0..m.rows() {
        let row: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("[{}, {}]", fmt_number(z.re), fmt_number(z.im)))
            .collect();
        let sep = if i + 1 < m.rows() { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", row.join(", "));
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

fn parse_pair(v: &Value) -> Result<C64> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse(format!("expected [re, im] pair, found {v}")))?;
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| Error::Parse(format!("real part is not a number: {}", pair[0])))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| Error::Parse(format!("imaginary part is not a number: {}", pair[1])))?;
    Ok(C64::new(re, im))
}

fn is_pair(v: &Value) -> bool {
    v.as_array()
        .is_some_and(|a| a.len() == 2 && a.iter().all(Value::is_number))
}

fn positive_field(doc: &Value, name: &str) -> Result<usize> {
    let n = doc
        .get(name)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse(format!("missing or non-integer field \"{name}\"")))?;
    if n == 0 {
        return Err(Error::Parse(format!("field \"{name}\" must be positive")));
    }
    Ok(n as usize)
}

pub fn from_json_str(text: &str) -> Result<Matrix> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let rows = positive_field(&doc, "rows")?;
    let cols = positive_field(&doc, "cols")?;
    let entries = doc
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing array field \"entries\"".into()))?;

    let flat: Vec<&Value> = if entries.first().is_some_and(is_pair) {
        entries.iter().collect()
    } else {
        if entries.len() != rows {
            return Err(Error::Parse(format!(
                "\"entries\" has {} rows, header says {rows}",
                entries.len()
            )));
        }
        let mut flat = Vec::with_capacity(rows * cols);
        for (i, row) in entries.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse(format!("row {i} is not an array")))?;
            if row.len() != cols {
                return Err(Error::Parse(format!(
                    "row {i} has {} entries, header says {cols}",
                    row.len()
                )));
            }
            flat.extend(row.iter());
        }
        flat
    };
    if flat.len() != rows * cols {
        return Err(Error::Parse(format!(
            "{} entries for a {rows}x{cols} matrix",
            flat.len()
        )));
    }
    let data = flat
        .into_iter()
        .map(parse_pair)
        .collect::<Result<Vec<_>>>()?;
    Matrix::new(rows, cols, data)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_json_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json_string(m))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
