//! Human-readable text output.

use std::fmt::Write;

use revcheck::{Method, ReversibilityReport, SquareMatrix, TransitionMatrix, Verdict};

/// A float to 12 significant digits without trailing zeros.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&magnitude) {
        let s = format!("{x:.11e}");
        let (mantissa, exponent) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exponent}");
    }
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn vector(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
}

pub fn pair(p: &TransitionMatrix, (i, j): (usize, usize)) -> String {
    format!("({},{})", p.label(i), p.label(j))
}

pub fn report(p: &TransitionMatrix, r: &ReversibilityReport) -> String {
    let mut out = String::new();
    let verdict = match r.verdict {
        Verdict::Reversible => "REVERSIBLE",
        Verdict::NotReversible => "NOT_REVERSIBLE",
    };
    let _ = writeln!(out, "{verdict}");
    let _ = writeln!(out, "method: {}", r.method);
    match r.method {
        Method::Symmetrize => {
            let ops: Vec<String> = r.ops.iter().map(ToString::to_string).collect();
            let list = if ops.is_empty() {
                "none".to_string()
            } else {
                ops.join(", ")
            };
            let _ = writeln!(out, "scaling operations ({}): {list}", ops.len());
            if r.ops_skipped > 0 {
                let _ = writeln!(out, "already balanced edges: {}", r.ops_skipped);
            }
        }
        Method::Oracle => {
            if let (Some(total), Some(evaluated)) = (r.loops_total, r.loops_evaluated) {
                let _ = writeln!(
                    out,
                    "{total} loops in total, {evaluated} evaluated after zero pruning"
                );
            }
        }
        Method::Kelly3 => {
            if let Some(evaluated) = r.loops_evaluated {
                let _ = writeln!(out, "3-state loops evaluated: {evaluated}");
            }
        }
    }
    if let Some((i, j)) = r.zero_pair {
        let (a, b) = if p.get(i, j) > 0.0 { (i, j) } else { (j, i) };
        let _ = writeln!(
            out,
            "asymmetric zero: p{} = {} but p{} = 0",
            pair(p, (a, b)),
            num(p.get(a, b)),
            pair(p, (b, a))
        );
    }
    if let Some(w) = &r.witness {
        let mut states: Vec<String> = w.states.iter().map(|&s| p.label(s)).collect();
        states.push(p.label(w.states[0]));
        let _ = writeln!(
            out,
            "witness loop: {} (forward product {}, backward product {})",
            states.join(" -> "),
            num(w.forward),
            num(w.backward)
        );
    }
    if let Some(v) = r.diagnostics.cross_check {
        let agrees = if v == r.verdict {
            "agrees"
        } else {
            "disagrees"
        };
        let _ = writeln!(out, "cross-check: loop criterion {agrees}");
    }
    out
}

/// Warnings that belong on standard error.
pub fn warnings(r: &ReversibilityReport) -> Vec<String> {
    let mut w = Vec::new();
    if let Some(d) = r.diagnostics.period {
        w.push(format!(
            "chain is periodic (period {d}); the verdict is unaffected"
        ));
    }
    if r.diagnostics.near_tolerance {
        w.push(
            "the deciding comparison is close to the tolerance; consider --abs-tol/--rel-tol"
                .into(),
        );
    }
    w.extend(r.diagnostics.notes.iter().cloned());
    w
}
