//! Dense square matrices, the tolerance policy, and the elementary predicates
//! everything else builds on.
//!
//! Two matrix types exist. [`TransitionMatrix`] is a validated row-stochastic
//! matrix. [`WorkMatrix`] is any square nonnegative matrix; the symmetrizer
//! works on one of these because its rows stop summing to one as soon as
//! off-diagonal entries are rescaled without touching the diagonal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute/relative tolerance used for every floating-point comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-12,
            rel_tol: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self, MatrixError> {
        if !(abs_tol.is_finite() && abs_tol >= 0.0 && rel_tol.is_finite() && rel_tol >= 0.0) {
            return Err(MatrixError::InvalidTolerance { abs_tol, rel_tol });
        }
        Ok(Tolerance { abs_tol, rel_tol })
    }

    /// `|a - b| <= abs_tol + rel_tol * max(|a|, |b|)`
    #[inline]
    pub fn approx_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.bound(a, b)
    }

    /// The allowed slack when comparing `a` and `b`.
    #[inline]
    pub fn bound(&self, a: f64, b: f64) -> f64 {
        self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }

    /// Structural zero test.
    #[inline]
    pub fn is_zero(&self, x: f64) -> bool {
        x.abs() <= self.abs_tol
    }

    /// Allowed deviation of a row sum from 1 for an `n`-state matrix.
    pub fn row_sum_slack(&self, n: usize) -> f64 {
        n as f64 * (self.abs_tol + self.rel_tol)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix has no rows")]
    Empty,
    #[error("matrix is not square: row {} has {found} entries, expected {expected}", .row + 1)]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("declared size n={declared} does not match {found} rows")]
    SizeMismatch { declared: usize, found: usize },
    #[error("negative entry {value} at row {}, column {}", .row + 1, .col + 1)]
    Negative { row: usize, col: usize, value: f64 },
    #[error("non-finite entry at row {}, column {}", .row + 1, .col + 1)]
    NonFinite { row: usize, col: usize },
    #[error("row {} sums to {sum}, not 1 (allowed slack {slack:e})", .row + 1)]
    RowSum { row: usize, sum: f64, slack: f64 },
    #[error("duplicate state label {label:?} at position {}", .position + 1)]
    DuplicateLabel { label: String, position: usize },
    #[error("expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("invalid JSON matrix: {0}")]
    Json(String),
    #[error("invalid tolerance (abs_tol={abs_tol}, rel_tol={rel_tol}); both must be finite and nonnegative")]
    InvalidTolerance { abs_tol: f64, rel_tol: f64 },
}

/// Read access shared by both matrix kinds.
pub trait SquareMatrix {
    fn n(&self) -> usize;
    fn get(&self, i: usize, j: usize) -> f64;

    fn off_diagonal_row_sum(&self, i: usize) -> f64 {
        (0..self.n())
            .filter(|&j| j != i)
            .map(|j| self.get(i, j))
            .sum()
    }

    fn off_diagonal_col_sum(&self, j: usize) -> f64 {
        (0..self.n())
            .filter(|&i| i != j)
            .map(|i| self.get(i, j))
            .sum()
    }

    fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

fn check_entries(n: usize, rows: &[Vec<f64>]) -> Result<Vec<f64>, MatrixError> {
    if n == 0 {
        return Err(MatrixError::Empty);
    }
    let mut entries = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(MatrixError::NotSquare {
                row: i,
                expected: n,
                found: row.len(),
            });
        }
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() {
                return Err(MatrixError::NonFinite { row: i, col: j });
            }
            if x < 0.0 {
                return Err(MatrixError::Negative {
                    row: i,
                    col: j,
                    value: x,
                });
            }
        }
        entries.extend_from_slice(row);
    }
    Ok(entries)
}

/// Square nonnegative matrix without a row-sum constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl WorkMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        let entries = check_entries(n, &rows)?;
        Ok(WorkMatrix { n, entries })
    }

    pub(crate) fn from_raw(n: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        WorkMatrix { n, entries }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.n + j] = value;
    }

    pub fn transpose(&self) -> WorkMatrix {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        WorkMatrix { n, entries }
    }
}

impl SquareMatrix for WorkMatrix {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }
}

#[derive(Serialize, Deserialize)]
struct WorkMatrixRepr {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl Serialize for WorkMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WorkMatrixRepr {
            n: self.n,
            rows: self.to_rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WorkMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = WorkMatrixRepr::deserialize(deserializer)?;
        if repr.n != repr.rows.len() {
            return Err(serde::de::Error::custom(MatrixError::SizeMismatch {
                declared: repr.n,
                found: repr.rows.len(),
            }));
        }
        WorkMatrix::from_rows(repr.rows).map_err(serde::de::Error::custom)
    }
}

/// Validated row-stochastic matrix with optional state labels.
///
/// The tolerance it was validated under travels with it and is used by every
/// predicate that has no explicit tolerance argument.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<f64>,
    labels: Option<Vec<String>>,
    tol: Tolerance,
}

impl TransitionMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, MatrixError> {
        Self::with_tolerance(rows, None, Tolerance::default())
    }

    pub fn with_tolerance(
        rows: Vec<Vec<f64>>,
        labels: Option<Vec<String>>,
        tol: Tolerance,
    ) -> Result<Self, MatrixError> {
        let n = rows.len();
        let entries = check_entries(n, &rows)?;
        let slack = tol.row_sum_slack(n);
        for (i, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > slack {
                return Err(MatrixError::RowSum { row: i, sum, slack });
            }
        }
        if let Some(labels) = &labels {
            validate_labels(labels, n)?;
        }
        Ok(TransitionMatrix {
            n,
            entries,
            labels,
            tol,
        })
    }

    /// Validate a work matrix as stochastic.
    pub fn from_work(
        m: &WorkMatrix,
        labels: Option<Vec<String>>,
        tol: Tolerance,
    ) -> Result<Self, MatrixError> {
        Self::with_tolerance(m.to_rows(), labels, tol)
    }

    pub(crate) fn from_raw_unchecked(
        n: usize,
        entries: Vec<f64>,
        labels: Option<Vec<String>>,
        tol: Tolerance,
    ) -> Self {
        TransitionMatrix {
            n,
            entries,
            labels,
            tol,
        }
    }

    /// The `n`-state matrix with every entry `1/n`.
    pub fn uniform(n: usize) -> Result<Self, MatrixError> {
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        let x = 1.0 / n as f64;
        Ok(TransitionMatrix {
            n,
            entries: vec![x; n * n],
            labels: None,
            tol: Tolerance::default(),
        })
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MatrixError> {
        validate_labels(&labels, self.n)?;
        self.labels = Some(labels);
        Ok(self)
    }

    /// Display name of state `i`: its label, or the 1-based index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) => labels[i].clone(),
            None => (i + 1).to_string(),
        }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn to_work(&self) -> WorkMatrix {
        WorkMatrix::from_raw(self.n, self.entries.clone())
    }

    pub fn is_positive(&self, i: usize, j: usize) -> bool {
        !self.tol.is_zero(self.get(i, j))
    }

    /// Apply a permutation: state `perm[i]` of the result is state `i` here.
    pub fn permuted(&self, perm: &[usize]) -> TransitionMatrix {
        let n = self.n;
        assert_eq!(perm.len(), n, "permutation length must equal n");
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[perm[i] * n + perm[j]] = self.entries[i * n + j];
            }
        }
        let labels = self.labels.as_ref().map(|labels| {
            let mut out = vec![String::new(); n];
            for (i, l) in labels.iter().enumerate() {
                out[perm[i]] = l.clone();
            }
            out
        });
        TransitionMatrix {
            n,
            entries,
            labels,
            tol: self.tol,
        }
    }
}

impl SquareMatrix for TransitionMatrix {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }
}

fn validate_labels(labels: &[String], n: usize) -> Result<(), MatrixError> {
    if labels.len() != n {
        return Err(MatrixError::LabelCount {
            expected: n,
            found: labels.len(),
        });
    }
    for (position, label) in labels.iter().enumerate() {
        if labels[..position].contains(label) {
            return Err(MatrixError::DuplicateLabel {
                label: label.clone(),
                position,
            });
        }
    }
    Ok(())
}

/// True iff every off-diagonal pair `(i, j)` matches `(j, i)` within `tol`.
/// The diagonal never matters.
pub fn is_symmetric<M: SquareMatrix + ?Sized>(m: &M, tol: &Tolerance) -> bool {
    first_asymmetric_pair(m, tol).is_none()
}

/// Lexicographically first pair `i < j` with `m[i][j] != m[j][i]` under `tol`.
pub fn first_asymmetric_pair<M: SquareMatrix + ?Sized>(
    m: &M,
    tol: &Tolerance,
) -> Option<(usize, usize)> {
    let n = m.n();
    for i in 0..n {
        for j in i + 1..n {
            if !tol.approx_eq(m.get(i, j), m.get(j, i)) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Largest `|a - b| / allowed_slack` over off-diagonal pairs. Values above 1
/// mean the matrix is asymmetric under `tol`.
pub fn asymmetry_ratio<M: SquareMatrix + ?Sized>(m: &M, tol: &Tolerance) -> f64 {
    let n = m.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (m.get(i, j), m.get(j, i));
            let bound = tol.bound(a, b);
            let diff = (a - b).abs();
            let ratio = if bound > 0.0 {
                diff / bound
            } else if diff > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            worst = worst.max(ratio);
        }
    }
    worst
}

/// First pair `i < j` where exactly one of `p[i][j]`, `p[j][i]` is a
/// structural zero.
pub fn zero_pattern_asymmetry(p: &TransitionMatrix) -> Option<(usize, usize)> {
    let tol = p.tolerance();
    let n = p.n();
    for i in 0..n {
        for j in i + 1..n {
            if tol.is_zero(p.get(i, j)) != tol.is_zero(p.get(j, i)) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn is_zero_pattern_symmetric(p: &TransitionMatrix) -> bool {
    zero_pattern_asymmetry(p).is_none()
}
