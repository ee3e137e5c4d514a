//! Matrix input files.
//!
//! Two formats are accepted: a small JSON schema
//! `{"rows": R, "cols": C, "data": [[entry, ...], ...]}` where each entry is
//! either a bare real number or an `[re, im]` pair, and plain CSV of reals
//! (one row per line). A file whose first non-space byte is `{` is treated
//! as JSON, anything else as CSV. Parse failures carry enough location
//! detail to find the offending cell.

use discrepancy_kit::ComplexMatrix;
use num_complex::Complex64;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fs;

use crate::CliError;

pub struct LoadedMatrix {
    pub matrix: ComplexMatrix,
    pub sha256: String,
}

impl LoadedMatrix {
    pub fn digest_entry(&self, path: &str) -> (String, String) {
        (path.to_string(), self.sha256.clone())
    }
}

pub fn load_matrix(path: &str) -> Result<LoadedMatrix, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    let sha256 = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{path}: not valid UTF-8")))?;
    let matrix = if text.trim_start().starts_with('{') {
        parse_matrix_json(&text)
    } else {
        parse_matrix_csv(&text)
    }
    .map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    Ok(LoadedMatrix { matrix, sha256 })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let mut out = String::with_capacity(64);
    for b in hasher.finalize() {
        use std::fmt::Write;
        write!(out, "{b:02x}").unwrap();
    }
    out
}

fn parse_matrix_json(text: &str) -> Result<ComplexMatrix, String> {
    // serde_json already reports "at line L column C" for syntax errors
    let v: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = v
        .as_object()
        .ok_or("top level must be an object with rows, cols, data")?;
    for key in obj.keys() {
        if key != "rows" && key != "cols" && key != "data" {
            return Err(format!("unknown field {key:?} (expected rows, cols, data)"));
        }
    }
    let rows = dim_field(obj, "rows")?;
    let cols = dim_field(obj, "cols")?;
    let data = obj
        .get("data")
        .ok_or("missing field \"data\"")?
        .as_array()
        .ok_or("\"data\" must be an array of rows")?;
    if data.len() != rows {
        return Err(format!(
            "\"data\" holds {} rows but \"rows\" says {rows}",
            data.len()
        ));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in data.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| format!("data[{i}] is not an array"))?;
        if row.len() != cols {
            return Err(format!(
                "data[{i}] holds {} entries but \"cols\" says {cols}",
                row.len()
            ));
        }
        for (j, cell) in row.iter().enumerate() {
            entries.push(parse_cell(cell).map_err(|e| format!("data[{i}][{j}]: {e}"))?);
        }
    }
    ComplexMatrix::new(rows, cols, entries).map_err(|e| e.to_string())
}

fn dim_field(obj: &serde_json::Map<String, Value>, name: &str) -> Result<usize, String> {
    let v = obj.get(name).ok_or(format!("missing field {name:?}"))?;
    let k = v
        .as_u64()
        .ok_or(format!("{name:?} must be a positive integer"))?;
    if k == 0 {
        return Err(format!("{name:?} must be positive"));
    }
    usize::try_from(k).map_err(|_| format!("{name:?} is too large"))
}

fn parse_cell(cell: &Value) -> Result<Complex64, String> {
    if let Some(x) = cell.as_f64() {
        return Ok(Complex64::new(x, 0.0));
    }
    if let Some(pair) = cell.as_array() {
        if pair.len() != 2 {
            return Err(format!(
                "entry arrays must be [re, im] pairs, got length {}",
                pair.len()
            ));
        }
        let re = pair[0].as_f64().ok_or("real part is not a number")?;
        let im = pair[1].as_f64().ok_or("imaginary part is not a number")?;
        return Ok(Complex64::new(re, im));
    }
    Err("expected a number or an [re, im] pair".into())
}

fn parse_matrix_csv(text: &str) -> Result<ComplexMatrix, String> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, token) in trimmed.split(',').enumerate() {
            let token = token.trim();
            let x: f64 = token.parse().map_err(|_| {
                format!(
                    "line {}, column {}: not a real number: {token:?}",
                    idx + 1,
                    col + 1
                )
            })?;
            row.push(Complex64::new(x, 0.0));
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(format!(
                    "line {}: expected {} comma-separated values, got {}",
                    idx + 1,
                    first.len(),
                    row.len()
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no data rows found".into());
    }
    let (r, c) = (rows.len(), rows[0].len());
    ComplexMatrix::new(r, c, rows.into_iter().flatten().collect()).map_err(|e| e.to_string())
}
