//! Square complex matrices on disk.
//!
//! CSV: `d` rows of `2d` cells, `re_0,im_0,re_1,im_1,…` for the entries of
//! that row. No header. JSON: `{"dim": d, "entries": [[re, im], …]}` with the
//! `d²` entries in row-major order. Values are written in shortest
//! round-trip form, so export followed by import is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{CMat, C64};

#[derive(Debug, Error)]
pub enum MatrixIoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: unknown matrix format (expected .csv or .json)")]
    UnknownFormat { path: String },
    #[error("{path}: row {row}, column {column}: {message}")]
    Cell {
        path: String,
        row: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Shape { path: String, message: String },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonMatrix {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

/// Reads a matrix, choosing the format by extension.
pub fn import_matrix(path: &Path) -> Result<CMat, MatrixIoError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| MatrixIoError::Io { path: name.clone(), source })?;
    match extension(path).as_deref() {
        Some("csv") => parse_csv(&text, &name),
        Some("json") => parse_json(&text, &name),
        _ => Err(MatrixIoError::UnknownFormat { path: name }),
    }
}

/// Writes a matrix, choosing the format by extension.
pub fn export_matrix(m: &CMat, path: &Path) -> Result<(), MatrixIoError> {
    let name = path.display().to_string();
    let text = match extension(path).as_deref() {
        Some("csv") => to_csv(m),
        Some("json") => to_json(m),
        _ => return Err(MatrixIoError::UnknownFormat { path: name }),
    };
    std::fs::write(path, text).map_err(|source| MatrixIoError::Io { path: name, source })
}

fn extension(path: &Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase())
}

pub fn to_csv(m: &CMat) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(',');
            }
            let z = m[(r, c)];
            write!(out, "{},{}", z.re, z.im).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn to_json(m: &CMat) -> String {
    let entries = (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
        .map(|(r, c)| [m[(r, c)].re, m[(r, c)].im])
        .collect();
    let j = JsonMatrix { dim: m.nrows(), entries };
    serde_json::to_string_pretty(&j).expect("finite floats serialize")
}

/// Rows and columns in diagnostics are 1-based.
pub fn parse_csv(text: &str, name: &str) -> Result<CMat, MatrixIoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| MatrixIoError::Shape { path: name.into(), message: e.to_string() })?;
        let mut row = Vec::with_capacity(rec.len());
        for (j, cell) in rec.iter().enumerate() {
            let cell_err = |message: String| MatrixIoError::Cell { path: name.into(), row: i + 1, column: j + 1, message };
            let x: f64 = cell.parse().map_err(|_| cell_err(format!("cannot parse {cell:?} as a number")))?;
            if !x.is_finite() {
                return Err(cell_err(format!("non-finite value {cell:?}")));
            }
            row.push(x);
        }
        rows.push(row);
    }
    let d = rows.len();
    if d == 0 {
        return Err(MatrixIoError::Shape { path: name.into(), message: "no rows".into() });
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != 2 * d {
            return Err(MatrixIoError::Shape {
                path: name.into(),
                message: format!("row {} has {} cells, expected {} for a {d}×{d} matrix", i + 1, row.len(), 2 * d),
            });
        }
    }
    Ok(CMat::from_fn(d, d, |r, c| C64::new(rows[r][2 * c], rows[r][2 * c + 1])))
}

pub fn parse_json(text: &str, name: &str) -> Result<CMat, MatrixIoError> {
    let j: JsonMatrix = serde_json::from_str(text).map_err(|source| MatrixIoError::Json { path: name.into(), source })?;
    let d = j.dim;
    if d == 0 || j.entries.len() != d * d {
        return Err(MatrixIoError::Shape {
            path: name.into(),
            message: format!("dim {d} needs {} entries, found {}", d * d, j.entries.len()),
        });
    }
    for (idx, [re, im]) in j.entries.iter().enumerate() {
        if !(re.is_finite() && im.is_finite()) {
            return Err(MatrixIoError::Cell {
                path: name.into(),
                row: idx / d + 1,
                column: idx % d + 1,
                message: "non-finite value".into(),
            });
        }
    }
    Ok(CMat::from_fn(d, d, |r, c| {
        let [re, im] = j.entries[r * d + c];
        C64::new(re, im)
    }))
}
