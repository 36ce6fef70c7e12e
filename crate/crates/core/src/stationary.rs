//! Stationary distributions: from the global balance equations, and by
//! detailed-balance propagation along a spanning tree for reversible chains.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{SquareMatrix, TransitionMatrix};
use crate::structure::{self, SpanningTree};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StationaryError {
    #[error("chain is not irreducible")]
    Reducible,
    #[error("balance system is singular beyond normalization (pivot {pivot:e} in column {})", .col + 1)]
    Singular { col: usize, pivot: f64 },
    #[error("vector has {found} entries, matrix has {expected} states")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("tree spans {found} states, matrix has {expected}")]
    TreeMismatch { expected: usize, found: usize },
    #[error("detailed balance fails at ({}, {}) with residual {residual:e}; chain is not reversible", .pair.0 + 1, .pair.1 + 1)]
    Inconsistent { pair: (usize, usize), residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StationaryMethod {
    Balance,
    DetailedBalance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `max_j |pi_j - (pi P)_j|`
    pub global: f64,
    /// `max_{i,j} |pi_i p_ij - pi_j p_ji|`
    pub detailed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryDistribution {
    pub pi: Vec<f64>,
    pub method: StationaryMethod,
    pub residuals: Residuals,
}

impl StationaryDistribution {
    fn new(p: &TransitionMatrix, pi: Vec<f64>, method: StationaryMethod) -> Self {
        let global = global_residual(p, &pi);
        let detailed = detailed_residuals(p, &pi).0;
        StationaryDistribution {
            pi,
            method,
            residuals: Residuals { global, detailed },
        }
    }

    /// One comma-separated line.
    pub fn to_csv_line(&self) -> String {
        self.pi
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn global_residual(p: &TransitionMatrix, pi: &[f64]) -> f64 {
    let n = p.n();
    (0..n)
        .map(|j| {
            let flow: f64 = (0..n).map(|i| pi[i] * p.get(i, j)).sum();
            (pi[j] - flow).abs()
        })
        .fold(0.0, f64::max)
}

/// Max residual and first pair `i < j` whose fluxes differ beyond tolerance.
fn detailed_residuals(p: &TransitionMatrix, pi: &[f64]) -> (f64, Option<(usize, usize)>) {
    let tol = p.tolerance();
    let n = p.n();
    let mut worst = 0.0f64;
    let mut violation = None;
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (pi[i] * p.get(i, j), pi[j] * p.get(j, i));
            worst = worst.max((a - b).abs());
            if violation.is_none() && !tol.approx_eq(a, b) {
                violation = Some((i, j));
            }
        }
    }
    (worst, violation)
}

/// Solve `pi P = pi`, `sum(pi) = 1` by Gaussian elimination with partial
/// pivoting, the last balance equation replaced by the normalization.
pub fn stationary_balance(p: &TransitionMatrix) -> Result<StationaryDistribution, StationaryError> {
    if !structure::is_irreducible(p) {
        return Err(StationaryError::Reducible);
    }
    let n = p.n();
    // augmented system (P^T - I | 0) with the last row set to (1 ... 1 | 1)
    let w = n + 1;
    let mut a = vec![0.0; n * w];
    for r in 0..n - 1 {
        for c in 0..n {
            a[r * w + c] = p.get(c, r) - if r == c { 1.0 } else { 0.0 };
        }
    }
    for c in 0..=n {
        a[(n - 1) * w + c] = 1.0;
    }

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| a[x * w + col].abs().total_cmp(&a[y * w + col].abs()))
            .expect("non-empty range");
        let pivot = a[pivot_row * w + col];
        if pivot.abs() < f64::EPSILON * n as f64 {
            return Err(StationaryError::Singular { col, pivot });
        }
        if pivot_row != col {
            for c in 0..w {
                a.swap(col * w + c, pivot_row * w + c);
            }
        }
        for r in col + 1..n {
            let factor = a[r * w + col] / pivot;
            if factor != 0.0 {
                for c in col..w {
                    a[r * w + c] -= factor * a[col * w + c];
                }
            }
        }
    }
    let mut pi = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r * w + c] * pi[c]).sum();
        pi[r] = (a[r * w + n] - tail) / a[r * w + r];
    }
    // elimination can leave -1e-18 style noise on tiny components
    for x in &mut pi {
        *x = x.max(0.0);
    }
    let total: f64 = pi.iter().sum();
    for x in &mut pi {
        *x /= total;
    }
    Ok(StationaryDistribution::new(
        p,
        pi,
        StationaryMethod::Balance,
    ))
}

/// Propagate `w_t = w_s * p[s][t] / p[t][s]` from weight 1 at the root along
/// every tree edge, then normalize. Only meaningful for reversible chains;
/// the detailed-balance residual over all pairs is verified.
pub fn stationary_detailed(
    p: &TransitionMatrix,
    tree: &SpanningTree,
) -> Result<StationaryDistribution, StationaryError> {
    let n = p.n();
    if tree.order().len() != n {
        return Err(StationaryError::TreeMismatch {
            expected: n,
            found: tree.order().len(),
        });
    }
    let mut weight = vec![0.0; n];
    weight[tree.root()] = 1.0;
    for (s, t) in tree.edges() {
        weight[t] = weight[s] * p.get(s, t) / p.get(t, s);
    }
    let total: f64 = weight.iter().sum();
    let pi: Vec<f64> = weight.iter().map(|w| w / total).collect();
    if let (residual, Some(pair)) = detailed_residuals(p, &pi) {
        return Err(StationaryError::Inconsistent { pair, residual });
    }
    Ok(StationaryDistribution::new(
        p,
        pi,
        StationaryMethod::DetailedBalance,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetailedBalanceCheck {
    pub max_residual: f64,
    /// First pair `i < j` with `pi_i p_ij != pi_j p_ji` beyond tolerance.
    pub violation: Option<(usize, usize)>,
}

impl DetailedBalanceCheck {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn verify_detailed_balance(
    p: &TransitionMatrix,
    pi: &[f64],
) -> Result<DetailedBalanceCheck, StationaryError> {
    if pi.len() != p.n() {
        return Err(StationaryError::DimensionMismatch {
            expected: p.n(),
            found: pi.len(),
        });
    }
    let (max_residual, violation) = detailed_residuals(p, pi);
    Ok(DetailedBalanceCheck {
        max_residual,
        violation,
    })
}
