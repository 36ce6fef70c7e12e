//! Reversibility by symmetrization.
//!
//! Walk a BFS spanning tree of the mutual-support graph from state 1. Each
//! newly reached state `t` (via parent `s`) gets its row scaled by
//! `p*[s][t] / p*[t][s]`, which balances the tree edge. Scaling only touches
//! off-diagonal entries, so the result `P*` is a [`WorkMatrix`]. The chain is
//! reversible iff `P*` ends up symmetric.
//!
//! Once a state is incorporated, later operations only touch rows of states
//! incorporated after it, so every pair among incorporated states is final.
//! The walk checks those pairs as it goes and stops at the first mismatch.

use thiserror::Error;

use crate::kolmogorov::{self, loop_products, OracleOptions};
use crate::matrix::{
    asymmetry_ratio, first_asymmetric_pair, zero_pattern_asymmetry, SquareMatrix, TransitionMatrix,
    WorkMatrix,
};
use crate::report::{
    CheckError, LoopWitness, Method, ReversibilityReport, ScalingOperation, Verdict,
};
use crate::scaling::Scalable;
use crate::structure::{self, SpanningTree};

/// Largest chain the exhaustive loop check accepts.
pub const ORACLE_MAX_STATES: usize = 14;
/// Largest chain for which `Auto` runs the loop check as a cross-check.
pub const CROSS_CHECK_MAX_STATES: usize = 7;

/// Comparisons within this factor of the tolerance are flagged.
const BOUNDARY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("pair ({}, {}) is a tree edge or degenerate", .0 + 1, .1 + 1)]
    DegeneratePair(usize, usize),
    #[error("pair ({}, {}) has a zero entry in the original matrix", .0 + 1, .1 + 1)]
    ZeroEntry(usize, usize),
    #[error("loop products {forward} and {backward} agree within tolerance")]
    NotViolating { forward: f64, backward: f64 },
}

/// Cycle through the tree path from `i` to `j` closed by the edge `j -> i`,
/// evaluated on the original matrix.
///
/// Tree edges are balanced in `pstar`, so the ratio of the cycle's two
/// products in `pstar` is `pstar[j][i] / pstar[i][j]`, and scaling changes
/// both products of the same cycle by the same factor. An asymmetric pair
/// therefore always yields a violating cycle in `p`.
pub fn build_witness(
    p: &TransitionMatrix,
    pstar: &WorkMatrix,
    tree: &SpanningTree,
    pair: (usize, usize),
) -> Result<LoopWitness, WitnessError> {
    let (i, j) = pair;
    debug_assert_eq!(p.n(), pstar.n());
    if !p.is_positive(i, j) || !p.is_positive(j, i) {
        return Err(WitnessError::ZeroEntry(i, j));
    }
    let path = tree.path(i, j);
    if path.len() < 3 {
        return Err(WitnessError::DegeneratePair(i, j));
    }
    let witness = LoopWitness::from_cycle(p, &path).expect("tree path has distinct states");
    let (forward, backward) = loop_products(p, &witness.states).expect("valid cycle");
    if p.tolerance().approx_eq(forward, backward) {
        return Err(WitnessError::NotViolating { forward, backward });
    }
    Ok(witness)
}

fn period_diagnostic(p: &TransitionMatrix) -> Result<Option<usize>, CheckError> {
    let period = structure::period(p).map_err(|_| CheckError::Reducible)?;
    Ok((period > 1).then_some(period))
}

/// Decide reversibility with at most `n - 1` row operations.
pub fn symmetrize_check(p: &TransitionMatrix) -> Result<ReversibilityReport, CheckError> {
    let period = period_diagnostic(p)?;
    let n = p.n();
    let tol = p.tolerance();

    if let Some(pair) = zero_pattern_asymmetry(p) {
        let mut report = ReversibilityReport::new(Verdict::NotReversible, Method::Symmetrize, n);
        report.zero_pair = Some(pair);
        report.final_matrix = Some(p.to_work());
        report.diagnostics.period = period;
        return Ok(report);
    }

    let support = structure::build_support(p);
    // Irreducible with symmetric zeros means the mutual graph is connected.
    let tree = structure::spanning_tree(&support, 0).map_err(|_| CheckError::Reducible)?;

    let mut work = p.to_work();
    let mut ops = Vec::new();
    let mut skipped = 0;
    let mut incorporated = vec![tree.root()];
    let mut failure = None;

    for (s, t) in tree.edges() {
        let (toward, back) = (work.get(s, t), work.get(t, s));
        if tol.approx_eq(toward, back) {
            skipped += 1;
        } else {
            let op = ScalingOperation::row(t, toward / back);
            work = work
                .apply_op(&op)
                .expect("positive finite factor on a valid row");
            ops.push(op);
        }
        if let Some(&a) = incorporated
            .iter()
            .find(|&&a| !tol.approx_eq(work.get(a, t), work.get(t, a)))
        {
            failure = Some((a.min(t), a.max(t)));
            break;
        }
        incorporated.push(t);
    }
    debug_assert!(failure.is_some() || first_asymmetric_pair(&work, &tol).is_none());

    let verdict = if failure.is_some() {
        Verdict::NotReversible
    } else {
        Verdict::Reversible
    };
    let mut report = ReversibilityReport::new(verdict, Method::Symmetrize, n);
    report.ops = ops;
    report.ops_skipped = skipped;
    report.diagnostics.period = period;

    let ratio = match failure {
        Some((a, b)) => {
            let (x, y) = (work.get(a, b), work.get(b, a));
            (x - y).abs() / tol.bound(x, y)
        }
        None => asymmetry_ratio(&work, &tol),
    };
    report.diagnostics.asymmetry_ratio = Some(ratio);
    report.diagnostics.near_tolerance = ratio > 1.0 / BOUNDARY_FACTOR && ratio < BOUNDARY_FACTOR;

    if let Some(pair) = failure {
        match build_witness(p, &work, &tree, pair) {
            Ok(witness) => report.witness = Some(witness),
            Err(err) => return escalate(p, err),
        }
    }
    report.final_matrix = Some(work);
    Ok(report)
}

/// The witness could not be confirmed, so the asymmetry sat on the tolerance
/// boundary. Defer to the exhaustive loop check.
fn escalate(p: &TransitionMatrix, err: WitnessError) -> Result<ReversibilityReport, CheckError> {
    if p.n() > ORACLE_MAX_STATES {
        return Err(CheckError::Inconclusive(err.to_string()));
    }
    let mut report = kolmogorov::oracle_check_with(p, OracleOptions::default())?;
    report.diagnostics.notes.push(format!(
        "symmetrizer witness rejected ({err}); verdict from loop check"
    ));
    report.diagnostics.near_tolerance = true;
    Ok(report)
}

/// Method selection for [`check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckMethod {
    /// Symmetrize; with `cross_check`, also run the loop check on small chains.
    #[default]
    Auto,
    Symmetrize,
    Oracle,
    Kelly3,
}

impl std::str::FromStr for CheckMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(CheckMethod::Auto),
            "symmetrize" => Ok(CheckMethod::Symmetrize),
            "oracle" => Ok(CheckMethod::Oracle),
            "kelly3" => Ok(CheckMethod::Kelly3),
            other => Err(format!(
                "unknown method {other:?} (expected auto, symmetrize, oracle or kelly3)"
            )),
        }
    }
}

pub fn check(
    p: &TransitionMatrix,
    method: CheckMethod,
    cross_check: bool,
) -> Result<ReversibilityReport, CheckError> {
    match method {
        CheckMethod::Symmetrize => symmetrize_check(p),
        CheckMethod::Kelly3 => kolmogorov::three_loop_check(p),
        CheckMethod::Oracle => {
            if p.n() > ORACLE_MAX_STATES {
                return Err(CheckError::Infeasible {
                    method: Method::Oracle,
                    reason: format!(
                        "{} states exceed the exhaustive limit of {ORACLE_MAX_STATES}; use the symmetrizer",
                        p.n()
                    ),
                });
            }
            kolmogorov::oracle_check(p)
        }
        CheckMethod::Auto => {
            let mut report = symmetrize_check(p)?;
            if cross_check && p.n() <= CROSS_CHECK_MAX_STATES && report.method == Method::Symmetrize
            {
                let oracle = kolmogorov::oracle_check(p)?;
                if oracle.verdict != report.verdict {
                    return Err(CheckError::Disagreement {
                        first: Method::Symmetrize,
                        first_verdict: report.verdict,
                        second: Method::Oracle,
                        second_verdict: oracle.verdict,
                    });
                }
                report.diagnostics.cross_check = Some(oracle.verdict);
            }
            Ok(report)
        }
    }
}
