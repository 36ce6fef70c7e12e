//! CSV and JSON matrix formats.
//!
//! CSV: one row per line, comma-separated decimals. An optional
//! `#labels:a,b,c` line names the states; any other line starting with `#` is
//! a comment. JSON: `{"n": 4, "labels": [...], "rows": [[...], ...]}`.
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! write-then-parse reproduces every entry bit for bit.

use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::matrix::{MatrixError, SquareMatrix, Tolerance, TransitionMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guess from a file extension; `None` for unknown or missing extensions.
    pub fn from_path(path: &str) -> Option<Format> {
        let ext = std::path::Path::new(path).extension()?.to_str()?;
        match ext.to_ascii_lowercase().as_str() {
            "csv" | "txt" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

const LABELS_PREFIX: &str = "#labels:";

pub fn parse_matrix<R: Read>(
    mut source: R,
    format: Format,
    tol: Tolerance,
) -> Result<TransitionMatrix, MatrixError> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| MatrixError::Syntax {
            line: 0,
            col: 0,
            message: e.to_string(),
        })?;
    parse_str(&text, format, tol)
}

pub fn parse_str(
    text: &str,
    format: Format,
    tol: Tolerance,
) -> Result<TransitionMatrix, MatrixError> {
    match format {
        Format::Csv => parse_csv(text, tol),
        Format::Json => parse_json(text, tol),
    }
}

fn parse_csv(text: &str, tol: Tolerance) -> Result<TransitionMatrix, MatrixError> {
    let mut labels = None;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(LABELS_PREFIX) {
            if labels.is_some() || !rows.is_empty() {
                return Err(MatrixError::Syntax {
                    line: lineno + 1,
                    col: 1,
                    message: "labels header must come before the first row and appear once".into(),
                });
            }
            labels = Some(rest.split(',').map(|l| l.trim().to_string()).collect());
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for (col, field) in line.split(',').enumerate() {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| MatrixError::Syntax {
                line: lineno + 1,
                col: col + 1,
                message: format!("not a decimal number: {field:?}"),
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    // Report ragged rows as non-square before the generic validation does.
    let n = rows.len();
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(MatrixError::NotSquare {
            row: i,
            expected: n,
            found: row.len(),
        });
    }
    TransitionMatrix::with_tolerance(rows, labels, tol)
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonMatrix {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
}

fn parse_json(text: &str, tol: Tolerance) -> Result<TransitionMatrix, MatrixError> {
    let doc: JsonMatrix = serde_json::from_str(text).map_err(|e| MatrixError::Syntax {
        line: e.line(),
        col: e.column(),
        message: e.to_string(),
    })?;
    if doc.n != doc.rows.len() {
        return Err(MatrixError::SizeMismatch {
            declared: doc.n,
            found: doc.rows.len(),
        });
    }
    TransitionMatrix::with_tolerance(doc.rows, doc.labels, tol)
}

/// Serialize rows (and optional labels) in the given format.
pub fn write_rows<M: SquareMatrix + ?Sized>(
    m: &M,
    labels: Option<&[String]>,
    format: Format,
) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            if let Some(labels) = labels {
                let _ = writeln!(out, "{LABELS_PREFIX}{}", labels.join(","));
            }
            for row in m.to_rows() {
                let fields: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "{}", fields.join(","));
            }
            out
        }
        Format::Json => {
            let doc = JsonMatrix {
                n: m.n(),
                labels: labels.map(<[String]>::to_vec),
                rows: m.to_rows(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("matrix serializes");
            s.push('\n');
            s
        }
    }
}

pub fn write_matrix(p: &TransitionMatrix, format: Format) -> String {
    write_rows(p, p.labels(), format)
}
