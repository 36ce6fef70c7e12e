//! Row and column multiplication operations.
//!
//! Scaling the off-diagonal entries of one row (or one column) by a positive
//! constant multiplies the forward and backward product of every loop by the
//! same amount, so a chain's reversibility status survives the operation.
//!
//! On a [`TransitionMatrix`] each operation is followed by resetting the
//! diagonal so rows sum to one again, which bounds the admissible factor. On a
//! [`WorkMatrix`] the diagonal is left alone and any positive factor goes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matrix::{SquareMatrix, TransitionMatrix, WorkMatrix};
use crate::report::{OpKind, ScalingOperation};
use crate::structure;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalingError {
    #[error("scaling factor must be positive and finite, got {0}")]
    InvalidFactor(f64),
    #[error("state {} out of range for {n} states", .index + 1)]
    IndexOutOfRange { index: usize, n: usize },
    #[error("row {} has no positive off-diagonal entry (absorbing state)", .0 + 1)]
    AbsorbingRow(usize),
    #[error("column {} has no positive off-diagonal entry", .0 + 1)]
    EmptyColumn(usize),
    #[error("factor {factor} exceeds the allowable maximum {bound} for {kind:?} {}", .index + 1)]
    FactorTooLarge {
        kind: OpKind,
        index: usize,
        factor: f64,
        bound: f64,
    },
}

fn check_index<M: SquareMatrix + ?Sized>(m: &M, index: usize) -> Result<(), ScalingError> {
    if index >= m.n() {
        return Err(ScalingError::IndexOutOfRange { index, n: m.n() });
    }
    Ok(())
}

fn check_factor(c: f64) -> Result<(), ScalingError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(ScalingError::InvalidFactor(c));
    }
    Ok(())
}

/// Largest factor for row `i` that keeps the off-diagonal row sum at most 1.
pub fn max_row_factor(p: &TransitionMatrix, i: usize) -> Result<f64, ScalingError> {
    check_index(p, i)?;
    if (0..p.n()).all(|j| j == i || !p.is_positive(i, j)) {
        return Err(ScalingError::AbsorbingRow(i));
    }
    Ok(1.0 / p.off_diagonal_row_sum(i))
}

/// Largest factor for column `j` that keeps every off-diagonal row sum at
/// most 1. Rows with a zero in column `j` do not constrain it.
pub fn max_col_factor(p: &TransitionMatrix, j: usize) -> Result<f64, ScalingError> {
    check_index(p, j)?;
    (0..p.n())
        .filter(|&i| i != j && p.is_positive(i, j))
        .map(|i| 1.0 + (1.0 - p.off_diagonal_row_sum(i)) / p.get(i, j))
        .min_by(f64::total_cmp)
        .ok_or(ScalingError::EmptyColumn(j))
}

/// Matrices the two scaling operations act on.
pub trait Scalable: SquareMatrix + Clone {
    fn apply_row_op(&self, i: usize, c: f64) -> Result<Self, ScalingError>;
    fn apply_col_op(&self, j: usize, c: f64) -> Result<Self, ScalingError>;

    fn apply_op(&self, op: &ScalingOperation) -> Result<Self, ScalingError> {
        match op.kind {
            OpKind::Row => self.apply_row_op(op.index, op.factor),
            OpKind::Column => self.apply_col_op(op.index, op.factor),
        }
    }
}

impl Scalable for WorkMatrix {
    fn apply_row_op(&self, i: usize, c: f64) -> Result<Self, ScalingError> {
        check_index(self, i)?;
        check_factor(c)?;
        let mut out = self.clone();
        for j in (0..self.n()).filter(|&j| j != i) {
            out.set(i, j, self.get(i, j) * c);
        }
        Ok(out)
    }

    fn apply_col_op(&self, j: usize, c: f64) -> Result<Self, ScalingError> {
        check_index(self, j)?;
        check_factor(c)?;
        let mut out = self.clone();
        for i in (0..self.n()).filter(|&i| i != j) {
            out.set(i, j, self.get(i, j) * c);
        }
        Ok(out)
    }
}

fn ensure_within(
    kind: OpKind,
    index: usize,
    factor: f64,
    bound: f64,
    rel_tol: f64,
) -> Result<(), ScalingError> {
    if factor > bound * (1.0 + rel_tol) {
        return Err(ScalingError::FactorTooLarge {
            kind,
            index,
            factor,
            bound,
        });
    }
    Ok(())
}

/// `1 - off-diagonal sum`, with round-off below zero clamped.
fn restore_diagonal(entries: &mut [f64], n: usize, i: usize) {
    let off: f64 = (0..n).filter(|&j| j != i).map(|j| entries[i * n + j]).sum();
    entries[i * n + i] = (1.0 - off).max(0.0);
}

impl Scalable for TransitionMatrix {
    fn apply_row_op(&self, i: usize, c: f64) -> Result<Self, ScalingError> {
        check_index(self, i)?;
        check_factor(c)?;
        // shrinking never breaks stochasticity
        if c > 1.0 {
            let bound = max_row_factor(self, i)?;
            ensure_within(OpKind::Row, i, c, bound, self.tolerance().rel_tol)?;
        }
        let n = self.n();
        let mut entries = self.entries().to_vec();
        for j in (0..n).filter(|&j| j != i) {
            entries[i * n + j] *= c;
        }
        restore_diagonal(&mut entries, n, i);
        Ok(TransitionMatrix::from_raw_unchecked(
            n,
            entries,
            self.labels().map(<[String]>::to_vec),
            self.tolerance(),
        ))
    }

    fn apply_col_op(&self, j: usize, c: f64) -> Result<Self, ScalingError> {
        check_index(self, j)?;
        check_factor(c)?;
        if c > 1.0 {
            let bound = max_col_factor(self, j)?;
            ensure_within(OpKind::Column, j, c, bound, self.tolerance().rel_tol)?;
        }
        let n = self.n();
        let mut entries = self.entries().to_vec();
        for i in (0..n).filter(|&i| i != j) {
            entries[i * n + j] *= c;
        }
        for i in 0..n {
            restore_diagonal(&mut entries, n, i);
        }
        Ok(TransitionMatrix::from_raw_unchecked(
            n,
            entries,
            self.labels().map(<[String]>::to_vec),
            self.tolerance(),
        ))
    }
}

/// One entry of an [`apply_ops`] log.
#[derive(Debug, Clone, PartialEq)]
pub struct OpStep<M> {
    pub op: ScalingOperation,
    /// Off-diagonal sum of the scaled row or column after the operation.
    pub off_diagonal_sum: f64,
    pub matrix: M,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Applied<M> {
    pub matrix: M,
    pub steps: Vec<OpStep<M>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("operation {} ({op}) is invalid: {source}", .index + 1)]
pub struct ApplyError {
    pub index: usize,
    pub op: ScalingOperation,
    #[source]
    pub source: ScalingError,
}

/// Fold `ops` over `m` left to right. Use a [`TransitionMatrix`] to keep rows
/// stochastic after each step, or a [`WorkMatrix`] to leave diagonals as is.
pub fn apply_ops<M: Scalable>(m: &M, ops: &[ScalingOperation]) -> Result<Applied<M>, ApplyError> {
    let mut current = m.clone();
    let mut steps = Vec::with_capacity(ops.len());
    for (index, op) in ops.iter().enumerate() {
        current = current.apply_op(op).map_err(|source| ApplyError {
            index,
            op: *op,
            source,
        })?;
        let off_diagonal_sum = match op.kind {
            OpKind::Row => current.off_diagonal_row_sum(op.index),
            OpKind::Column => current.off_diagonal_col_sum(op.index),
        };
        steps.push(OpStep {
            op: *op,
            off_diagonal_sum,
            matrix: current.clone(),
        });
    }
    Ok(Applied {
        matrix: current,
        steps,
    })
}

/// Generator factors are drawn from this fraction of the allowable maximum.
pub const FACTOR_RANGE: (f64, f64) = (0.2, 0.95);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub ops_count: usize,
    pub seed: u64,
    /// Unordered state pairs forced to zero in both directions.
    pub zero_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub matrix: TransitionMatrix,
    pub ops: Vec<ScalingOperation>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("need at least 2 states, got {0}")]
    TooFewStates(usize),
    #[error("invalid zero pair ({}, {}) for {n} states", .pair.0 + 1, .pair.1 + 1)]
    BadPair { pair: (usize, usize), n: usize },
    #[error("requested zero pattern disconnects the chain: {0}")]
    Disconnected(#[from] structure::StructureError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
}

/// Build a reversible transition matrix: start from the uniform matrix, zero
/// the requested symmetric pairs, then apply `ops_count` random row/column
/// operations. Deterministic in `seed`.
pub fn generate_reversible(config: &GeneratorConfig) -> Result<Generated, GenerateError> {
    let n = config.n;
    if n < 2 {
        return Err(GenerateError::TooFewStates(n));
    }
    let x = 1.0 / n as f64;
    let mut entries = vec![x; n * n];
    for &(i, j) in &config.zero_pairs {
        if i >= n || j >= n || i == j {
            return Err(GenerateError::BadPair { pair: (i, j), n });
        }
        entries[i * n + j] = 0.0;
        entries[j * n + i] = 0.0;
    }
    for i in 0..n {
        restore_diagonal(&mut entries, n, i);
    }
    let mut p = TransitionMatrix::from_raw_unchecked(n, entries, None, Default::default());
    structure::spanning_tree(&structure::build_support(&p), 0)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ops = Vec::with_capacity(config.ops_count);
    for _ in 0..config.ops_count {
        let index = rng.gen_range(0..n);
        let (kind, bound) = if rng.gen_bool(0.5) {
            (OpKind::Row, max_row_factor(&p, index)?)
        } else {
            (OpKind::Column, max_col_factor(&p, index)?)
        };
        let factor = rng.gen_range(FACTOR_RANGE.0..=FACTOR_RANGE.1) * bound;
        let op = ScalingOperation {
            kind,
            index,
            factor,
        };
        p = p.apply_op(&op)?;
        ops.push(op);
    }
    Ok(Generated {
        matrix: p,
        ops,
        seed: config.seed,
    })
}
