//! Kolmogorov's loop criterion, checked exhaustively.
//!
//! A chain is reversible iff every cycle of distinct states has equal forward
//! and backward transition products. Cycles are produced lazily in canonical
//! form (smallest state first, second state smaller than the last), shortest
//! cycles first and lexicographically within a length, so each undirected
//! cycle appears exactly once and the first violation found is deterministic.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::matrix::{SquareMatrix, TransitionMatrix};
use crate::report::{CheckError, LoopWitness, Method, ReversibilityReport, Verdict};
use crate::structure::{self, SupportGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("empty cycle")]
    Empty,
    #[error("state {} out of range for {n} states", .state + 1)]
    OutOfRange { state: usize, n: usize },
    #[error("state {} repeated in cycle", .state + 1)]
    Repeated { state: usize },
}

/// Number of loop equations for `n` states: sum over `i = 3..=n` of
/// `C(n, i) * (i - 1)! / 2`.
pub fn count_loops(n: u32) -> BigUint {
    let mut total = BigUint::zero();
    // binom = C(n, i), fact = (i - 1)!
    let mut binom = BigUint::from(1u32);
    let mut fact = BigUint::from(1u32);
    for i in 1..=n {
        binom = binom * (n - i + 1) / i;
        if i >= 2 {
            fact *= i - 1;
        }
        if i >= 3 {
            total += &binom * &fact / 2u32;
        }
    }
    total
}

/// Lazy stream of canonical cycles over `n` states.
///
/// With a support graph, cycles containing a pair of states with no edge in
/// either direction are skipped: both of their products are zero.
#[derive(Debug, Clone)]
pub struct Loops<'a> {
    n: usize,
    support: Option<&'a SupportGraph>,
    max_len: usize,
    len: usize,
    start: usize,
    path: Vec<usize>,
    cursor: Vec<usize>,
    used: Vec<bool>,
}

impl Loops<'_> {
    fn linked(&self, a: usize, b: usize) -> bool {
        self.support.is_none_or(|g| g.is_linked(a, b))
    }
}

impl Iterator for Loops<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        loop {
            if self.path.is_empty() {
                if self.len > self.max_len {
                    return None;
                }
                // the other len - 1 states must all exceed `start`
                if self.start + self.len > self.n {
                    self.len += 1;
                    self.start = 0;
                    continue;
                }
                self.path.push(self.start);
                self.used[self.start] = true;
                self.cursor.push(self.start + 1);
                continue;
            }

            let top = self.path.len() - 1;
            if self.path.len() == self.len {
                let last = self.path[top];
                let emit = self.path[1] < last && self.linked(last, self.start);
                let cycle = emit.then(|| self.path.clone());
                self.used[last] = false;
                self.path.pop();
                self.cursor.pop();
                if cycle.is_some() {
                    return cycle;
                }
                continue;
            }

            let u = self.path[top];
            let mut c = self.cursor[top];
            while c < self.n && (self.used[c] || !self.linked(u, c)) {
                c += 1;
            }
            if c < self.n {
                self.cursor[top] = c + 1;
                self.path.push(c);
                self.used[c] = true;
                self.cursor.push(self.start + 1);
            } else {
                self.used[u] = false;
                self.path.pop();
                self.cursor.pop();
                if self.path.is_empty() {
                    self.start += 1;
                }
            }
        }
    }
}

pub fn enumerate_loops(n: usize, support: Option<&SupportGraph>) -> Loops<'_> {
    enumerate_loops_up_to(n, n, support)
}

/// Canonical cycles with at most `max_len` states.
pub fn enumerate_loops_up_to(
    n: usize,
    max_len: usize,
    support: Option<&SupportGraph>,
) -> Loops<'_> {
    Loops {
        n,
        support,
        max_len: max_len.min(n),
        len: 3,
        start: 0,
        path: Vec::with_capacity(n),
        cursor: Vec::with_capacity(n),
        used: vec![false; n],
    }
}

/// Forward product `p[j0][j1] ... p[jk][j0]` and its reverse.
pub fn loop_products(p: &TransitionMatrix, cycle: &[usize]) -> Result<(f64, f64), LoopError> {
    let n = p.n();
    if cycle.is_empty() {
        return Err(LoopError::Empty);
    }
    let mut seen = vec![false; n];
    for &s in cycle {
        if s >= n {
            return Err(LoopError::OutOfRange { state: s, n });
        }
        if std::mem::replace(&mut seen[s], true) {
            return Err(LoopError::Repeated { state: s });
        }
    }
    Ok(products_unchecked(p, cycle))
}

fn products_unchecked(p: &TransitionMatrix, cycle: &[usize]) -> (f64, f64) {
    let k = cycle.len();
    let mut forward = 1.0;
    let mut backward = 1.0;
    for t in 0..k {
        let (a, b) = (cycle[t], cycle[(t + 1) % k]);
        forward *= p.get(a, b);
        backward *= p.get(b, a);
    }
    (forward, backward)
}

/// Rotate so the smallest state leads and orient so the second state is
/// smaller than the last. Returns whether the orientation was reversed.
pub fn canonicalize(cycle: &[usize]) -> (Vec<usize>, bool) {
    let k = cycle.len();
    let Some(pos) = (0..k).min_by_key(|&i| cycle[i]) else {
        return (Vec::new(), false);
    };
    let mut out: Vec<usize> = (0..k).map(|t| cycle[(pos + t) % k]).collect();
    let reversed = k > 2 && out[1] > out[k - 1];
    if reversed {
        out[1..].reverse();
    }
    (out, reversed)
}

impl LoopWitness {
    /// Canonicalize `cycle` and evaluate both products on `p`.
    pub fn from_cycle(p: &TransitionMatrix, cycle: &[usize]) -> Result<Self, LoopError> {
        let (states, _) = canonicalize(cycle);
        let (forward, backward) = loop_products(p, &states)?;
        Ok(LoopWitness {
            states,
            forward,
            backward,
        })
    }

    /// Recompute the products on `p` and test them for inequality.
    pub fn verifies_against(&self, p: &TransitionMatrix) -> bool {
        match loop_products(p, &self.states) {
            Ok((f, b)) => !p.tolerance().approx_eq(f, b),
            Err(_) => false,
        }
    }
}

/// Evaluate cycles until the first violation. Returns the number evaluated.
fn first_violation<I>(p: &TransitionMatrix, cycles: I) -> (u64, Option<LoopWitness>)
where
    I: Iterator<Item = Vec<usize>>,
{
    let tol = p.tolerance();
    let mut evaluated = 0u64;
    for states in cycles {
        evaluated += 1;
        let (forward, backward) = products_unchecked(p, &states);
        if !tol.approx_eq(forward, backward) {
            return (
                evaluated,
                Some(LoopWitness {
                    states,
                    forward,
                    backward,
                }),
            );
        }
    }
    (evaluated, None)
}

fn verdict_report(
    p: &TransitionMatrix,
    method: Method,
    evaluated: u64,
    witness: Option<LoopWitness>,
    period: usize,
) -> ReversibilityReport {
    let verdict = if witness.is_some() {
        Verdict::NotReversible
    } else {
        Verdict::Reversible
    };
    let mut report = ReversibilityReport::new(verdict, method, p.n());
    report.witness = witness;
    report.loops_evaluated = Some(evaluated);
    report.loops_total = count_loops(p.n() as u32).to_u64();
    if period > 1 {
        report.diagnostics.period = Some(period);
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Skip cycles that cross a pair with no edge in either direction.
    pub prune: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { prune: true }
    }
}

/// Exhaustive loop check with default options (pruning on).
pub fn oracle_check(p: &TransitionMatrix) -> Result<ReversibilityReport, CheckError> {
    oracle_check_with(p, OracleOptions::default())
}

pub fn oracle_check_with(
    p: &TransitionMatrix,
    options: OracleOptions,
) -> Result<ReversibilityReport, CheckError> {
    let period = structure::period(p).map_err(|_| CheckError::Reducible)?;
    let support = options.prune.then(|| structure::build_support(p));
    let (evaluated, witness) = first_violation(p, enumerate_loops(p.n(), support.as_ref()));
    Ok(verdict_report(
        p,
        Method::Oracle,
        evaluated,
        witness,
        period,
    ))
}

/// Smallest column `j` with `p[i][j] > 0` for every `i != j`: a state every
/// other state reaches in one step.
pub fn kelly_column(p: &TransitionMatrix) -> Option<usize> {
    let n = p.n();
    (0..n).find(|&j| (0..n).all(|i| i == j || p.is_positive(i, j)))
}

/// Check only three-state loops. Sufficient when some column is fully
/// positive off the diagonal (see [`kelly_column`]).
pub fn three_loop_check(p: &TransitionMatrix) -> Result<ReversibilityReport, CheckError> {
    if kelly_column(p).is_none() {
        return Err(CheckError::Infeasible {
            method: Method::Kelly3,
            reason: "no column is positive in every off-diagonal entry".into(),
        });
    }
    let period = structure::period(p).map_err(|_| CheckError::Reducible)?;
    let (evaluated, witness) = first_violation(p, enumerate_loops_up_to(p.n(), 3, None));
    Ok(verdict_report(
        p,
        Method::Kelly3,
        evaluated,
        witness,
        period,
    ))
}
