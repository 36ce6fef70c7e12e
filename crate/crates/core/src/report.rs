//! Verdicts, witnesses, scaling operations and their JSON forms.
//!
//! States are 0-based in memory and 1-based on the wire, matching the way
//! matrices are written by hand.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::WorkMatrix;

/// Why a reversibility check could not produce a verdict.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("chain is not irreducible")]
    Reducible,
    #[error("method {method} is not applicable: {reason}")]
    Infeasible { method: Method, reason: String },
    #[error("methods disagree: {first} says {first_verdict}, {second} says {second_verdict}")]
    Disagreement {
        first: Method,
        first_verdict: Verdict,
        second: Method,
        second_verdict: Verdict,
    },
    #[error("verdict sits on the tolerance boundary: {0}")]
    Inconclusive(String),
}

pub(crate) mod one_based {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    fn lower<E: serde::de::Error>(x: usize) -> Result<usize, E> {
        x.checked_sub(1)
            .ok_or_else(|| E::custom("state indices are 1-based"))
    }

    pub fn serialize<S: Serializer>(i: &usize, s: S) -> Result<S::Ok, S::Error> {
        (i + 1).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        lower(usize::deserialize(d)?)
    }

    pub mod seq {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|i| i + 1).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
            Vec::<usize>::deserialize(d)?
                .into_iter()
                .map(lower)
                .collect()
        }
    }

    pub mod opt_pair {
        use super::*;

        pub fn serialize<S: Serializer>(
            v: &Option<(usize, usize)>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            v.map(|(i, j)| (i + 1, j + 1)).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<(usize, usize)>, D::Error> {
            Option::<(usize, usize)>::deserialize(d)?
                .map(|(i, j)| Ok((lower(i)?, lower(j)?)))
                .transpose()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Row,
    Column,
}

/// Multiply the off-diagonal entries of one row or column by `factor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingOperation {
    pub kind: OpKind,
    #[serde(with = "one_based")]
    pub index: usize,
    pub factor: f64,
}

impl ScalingOperation {
    pub fn row(index: usize, factor: f64) -> Self {
        ScalingOperation {
            kind: OpKind::Row,
            index,
            factor,
        }
    }

    pub fn column(index: usize, factor: f64) -> Self {
        ScalingOperation {
            kind: OpKind::Column,
            index,
            factor,
        }
    }
}

impl fmt::Display for ScalingOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            OpKind::Row => "ROW",
            OpKind::Column => "COLUMN",
        };
        write!(f, "{kind} {} x{}", self.index + 1, self.factor)
    }
}

/// Parses `ROW 3 x0.25`, `column 2 4` and similar; the state is 1-based and
/// the `x` (or `×`) before the factor is optional.
impl std::str::FromStr for ScalingOperation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        let (Some(kind), Some(index), Some(factor), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(format!(
                "expected `ROW|COLUMN <state> x<factor>`, got {s:?}"
            ));
        };
        let kind = match kind.to_ascii_uppercase().as_str() {
            "ROW" | "R" => OpKind::Row,
            "COLUMN" | "COL" | "C" => OpKind::Column,
            other => return Err(format!("unknown operation kind {other:?}")),
        };
        let index: usize = index
            .parse()
            .ok()
            .and_then(|i: usize| i.checked_sub(1))
            .ok_or_else(|| format!("state must be a positive integer, got {index:?}"))?;
        let raw = factor.strip_prefix(['x', 'X', '×', '*']).unwrap_or(factor);
        let factor: f64 = raw
            .parse()
            .map_err(|_| format!("factor is not a number: {factor:?}"))?;
        Ok(ScalingOperation {
            kind,
            index,
            factor,
        })
    }
}

/// A cycle of distinct states with both oriented transition products.
///
/// Canonical form: the smallest state first, and the second state smaller
/// than the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopWitness {
    #[serde(with = "one_based::seq")]
    pub states: Vec<usize>,
    pub forward: f64,
    pub backward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Reversible,
    NotReversible,
}

impl Verdict {
    pub fn is_reversible(self) -> bool {
        self == Verdict::Reversible
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Reversible => "REVERSIBLE",
            Verdict::NotReversible => "NOT_REVERSIBLE",
        })
    }
}

/// Which procedure produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Symmetrize,
    Oracle,
    #[serde(rename = "KELLY3")]
    Kelly3,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Symmetrize => "SYMMETRIZE",
            Method::Oracle => "ORACLE",
            Method::Kelly3 => "KELLY3",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest off-diagonal `|a - b|` of the final matrix relative to the
    /// tolerance slack; above 1 means asymmetric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymmetry_ratio: Option<f64>,
    /// The deciding comparison sat within a factor 10 of the tolerance.
    #[serde(default)]
    pub near_tolerance: bool,
    /// Set when the chain is periodic (period > 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    /// Verdict of a second method run on the same input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReversibilityReport {
    pub verdict: Verdict,
    pub method: Method,
    pub n: usize,
    /// Scaling operations with factor != 1, in application order.
    pub ops: Vec<ScalingOperation>,
    /// Tree edges that were already balanced and needed no operation.
    #[serde(default)]
    pub ops_skipped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_matrix: Option<WorkMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<LoopWitness>,
    #[serde(
        default,
        with = "one_based::opt_pair",
        skip_serializing_if = "Option::is_none"
    )]
    pub zero_pair: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loops_evaluated: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loops_total: Option<u64>,
    #[serde(default)]
    pub diagnostics: Diagnostics,
}

impl ReversibilityReport {
    pub(crate) fn new(verdict: Verdict, method: Method, n: usize) -> Self {
        ReversibilityReport {
            verdict,
            method,
            n,
            ops: Vec::new(),
            ops_skipped: 0,
            final_matrix: None,
            witness: None,
            zero_pair: None,
            loops_evaluated: None,
            loops_total: None,
            diagnostics: Diagnostics::default(),
        }
    }

    /// Scaling steps taken, including the skipped identity ones.
    pub fn ops_count(&self) -> usize {
        self.ops.len() + self.ops_skipped
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_json_is_one_based() {
        let ops = vec![
            ScalingOperation::row(2, 0.25),
            ScalingOperation::column(1, 4.0),
        ];
        let json = serde_json::to_string(&ops).unwrap();
        assert_eq!(
            json,
            r#"[{"kind":"row","index":3,"factor":0.25},{"kind":"column","index":2,"factor":4.0}]"#
        );
        let back: Vec<ScalingOperation> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ops);
        assert!(
            serde_json::from_str::<ScalingOperation>(r#"{"kind":"row","index":0,"factor":1}"#)
                .is_err()
        );
    }

    #[test]
    fn op_text_round_trips() {
        for op in [
            ScalingOperation::row(2, 0.25),
            ScalingOperation::column(1, 4.0),
        ] {
            assert_eq!(op.to_string().parse::<ScalingOperation>(), Ok(op));
        }
        assert_eq!("col 2 ×4".parse(), Ok(ScalingOperation::column(1, 4.0)));
        assert_eq!("row 1 0.5".parse(), Ok(ScalingOperation::row(0, 0.5)));
        for bad in [
            "ROW 0 x1",
            "DIAG 1 x2",
            "ROW 1",
            "ROW 1 xx",
            "ROW 1 x2 extra",
        ] {
            assert!(bad.parse::<ScalingOperation>().is_err(), "{bad}");
        }
    }

    #[test]
    fn report_round_trips() {
        let mut r = ReversibilityReport::new(Verdict::NotReversible, Method::Symmetrize, 3);
        r.ops.push(ScalingOperation::row(1, 7.0 / 3.0));
        r.ops_skipped = 1;
        r.final_matrix = Some(WorkMatrix::from_rows(vec![vec![0.0; 3]; 3]).unwrap());
        r.witness = Some(LoopWitness {
            states: vec![0, 1, 2],
            forward: 0.343,
            backward: 0.027,
        });
        r.diagnostics.notes.push("x".into());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains(r#""verdict":"NOT_REVERSIBLE""#));
        assert!(json.contains(r#""states":[1,2,3]"#));
        let back: ReversibilityReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);

        let mut z = ReversibilityReport::new(Verdict::NotReversible, Method::Kelly3, 3);
        z.zero_pair = Some((0, 1));
        let json = serde_json::to_string(&z).unwrap();
        assert!(json.contains(r#""zero_pair":[1,2]"#));
        assert!(json.contains(r#""method":"KELLY3""#));
        assert_eq!(
            serde_json::from_str::<ReversibilityReport>(&json).unwrap(),
            z
        );
    }
}
