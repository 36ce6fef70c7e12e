use std::collections::hash_map::RandomState;
use std::fs;
use std::hash::{BuildHasher, Hasher};
use std::io::{self, Read};

use revcheck::{
    build_support, count_loops as loop_count, generate_reversible, is_irreducible, parse_str,
    period, spanning_tree, stationary_balance, stationary_detailed, symmetrize_check,
    verify_detailed_balance, write_matrix, zero_pattern_asymmetry, CheckMethod, Format,
    GenerateError, GeneratorConfig, ReversibilityReport, ScalingError, ScalingOperation,
    SquareMatrix, StationaryDistribution, Tolerance, TransitionMatrix, Verdict,
};
use serde::{Deserialize, Serialize};

use crate::{render, Exit, Failure, Input};

fn read_source(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    if path == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::invalid(format!("stdin: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn input_format(input: &Input) -> Format {
    input
        .format
        .or_else(|| Format::from_path(&input.path))
        .unwrap_or(Format::Csv)
}

fn load(input: &Input, tol: Tolerance) -> Result<TransitionMatrix, Failure> {
    let text = read_source(&input.path)?;
    parse_str(&text, input_format(input), tol)
        .map_err(|e| Failure::invalid(format!("{}: {e}", input.path)))
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("output serializes")
    );
}

fn one_based((i, j): (usize, usize)) -> [usize; 2] {
    [i + 1, j + 1]
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Validation {
    pub n: usize,
    pub irreducible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    pub zeros_symmetric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymmetric_zero: Option<[usize; 2]>,
}

pub fn validate(input: &Input, tol: Tolerance, json: bool) -> Result<Exit, Failure> {
    let p = load(input, tol)?;
    let asymmetric = zero_pattern_asymmetry(&p);
    let irreducible = is_irreducible(&p);
    let v = Validation {
        n: p.n(),
        irreducible,
        period: period(&p).ok(),
        zeros_symmetric: asymmetric.is_none(),
        asymmetric_zero: asymmetric.map(one_based),
    };
    if json {
        print_json(&v);
    } else {
        println!("valid {n}x{n} transition matrix", n = v.n);
        if !irreducible {
            println!("not irreducible");
        } else {
            let periodicity = match v.period {
                Some(1) | None => "aperiodic".to_string(),
                Some(d) => format!("periodic (period {d})"),
            };
            let zeros = match asymmetric {
                None => "zeros symmetric".to_string(),
                Some(pair) => format!("zeros not symmetric at {}", render::pair(&p, pair)),
            };
            println!("irreducible, {periodicity}, {zeros}");
        }
    }
    Ok(if irreducible {
        Exit::Success
    } else {
        Exit::NotIrreducible
    })
}

/// `check --json --stationary` output.
#[derive(Debug, Serialize, Deserialize)]
pub struct CheckOutput {
    pub report: ReversibilityReport,
    pub stationary: Option<StationaryDistribution>,
}

fn detailed_pi(p: &TransitionMatrix) -> Result<StationaryDistribution, Failure> {
    let tree = spanning_tree(&build_support(p), 0).map_err(|e| Failure {
        exit: Exit::Internal,
        message: e.to_string(),
    })?;
    stationary_detailed(p, &tree).map_err(|e| Failure {
        exit: Exit::Internal,
        message: e.to_string(),
    })
}

pub fn check(
    input: &Input,
    tol: Tolerance,
    json: bool,
    method: CheckMethod,
    with_stationary: bool,
    cross_check: bool,
) -> Result<Exit, Failure> {
    let p = load(input, tol)?;
    let report = revcheck::check(&p, method, cross_check)?;
    let stationary = match (with_stationary, report.verdict) {
        (true, Verdict::Reversible) => Some(detailed_pi(&p)?),
        _ => None,
    };
    for w in render::warnings(&report) {
        eprintln!("warning: {w}");
    }
    if json {
        if with_stationary {
            print_json(&CheckOutput {
                report: report.clone(),
                stationary,
            });
        } else {
            print_json(&report);
        }
    } else {
        print!("{}", render::report(&p, &report));
        if let Some(s) = &stationary {
            println!("stationary distribution: {}", render::vector(&s.pi));
        }
    }
    Ok(match report.verdict {
        Verdict::Reversible => Exit::Success,
        Verdict::NotReversible => Exit::NotReversible,
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StationaryOutput {
    pub balance: StationaryDistribution,
    pub reversible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detailed: Option<StationaryDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<[usize; 2]>,
}

pub fn stationary(input: &Input, tol: Tolerance, json: bool) -> Result<Exit, Failure> {
    let p = load(input, tol)?;
    if !is_irreducible(&p) {
        return Err(Failure {
            exit: Exit::NotIrreducible,
            message: "chain is not irreducible".into(),
        });
    }
    let balance = stationary_balance(&p).map_err(|e| Failure {
        exit: Exit::Internal,
        message: e.to_string(),
    })?;
    let reversible = symmetrize_check(&p)?.verdict.is_reversible();
    let (detailed, violation) = if reversible {
        (Some(detailed_pi(&p)?), None)
    } else {
        let db = verify_detailed_balance(&p, &balance.pi).map_err(|e| Failure {
            exit: Exit::Internal,
            message: e.to_string(),
        })?;
        (None, db.violation)
    };
    if json {
        print_json(&StationaryOutput {
            balance,
            reversible,
            detailed,
            violation: violation.map(one_based),
        });
    } else {
        println!("pi (balance solve): {}", render::vector(&balance.pi));
        println!(
            "global balance residual: {}",
            render::num(balance.residuals.global)
        );
        match (&detailed, violation) {
            (Some(d), _) => {
                println!("pi (detailed balance): {}", render::vector(&d.pi));
                println!(
                    "detailed balance residual: {}",
                    render::num(d.residuals.detailed)
                );
            }
            (None, Some(pair)) => {
                println!(
                    "not reversible: detailed balance fails at {}",
                    render::pair(&p, pair)
                )
            }
            (None, None) => println!("not reversible"),
        }
    }
    Ok(Exit::Success)
}

pub fn count_loops(n: Option<u32>, json: bool) -> Result<Exit, Failure> {
    let n = n.ok_or_else(|| Failure::invalid("missing state count"))?;
    if n == 0 {
        return Err(Failure::invalid("state count must be at least 1"));
    }
    let count = loop_count(n);
    if json {
        println!("{{\"n\": {n}, \"loops\": \"{count}\"}}");
    } else {
        println!("{count}");
    }
    Ok(Exit::Success)
}

/// JSON form of a generated matrix; readable as a matrix file.
#[derive(Debug, Serialize, Deserialize)]
pub struct GeneratedDoc {
    pub seed: u64,
    pub ops: Vec<ScalingOperation>,
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

fn system_seed() -> u64 {
    RandomState::new().build_hasher().finish()
}

pub fn generate(
    n: usize,
    ops_count: usize,
    seed: Option<u64>,
    zero_pairs: Vec<(usize, usize)>,
    format: Format,
) -> Result<Exit, Failure> {
    let seed = seed.unwrap_or_else(system_seed);
    let g = generate_reversible(&GeneratorConfig {
        n,
        ops_count,
        seed,
        zero_pairs,
    })
    .map_err(|e: GenerateError| Failure::invalid(e))?;
    match format {
        Format::Csv => {
            println!("# revcheck generate n={n} ops_count={ops_count} seed={seed}");
            for op in &g.ops {
                println!("# {op}");
            }
            print!("{}", write_matrix(&g.matrix, Format::Csv));
        }
        Format::Json => print_json(&GeneratedDoc {
            seed,
            ops: g.ops,
            n,
            rows: g.matrix.to_rows(),
        }),
    }
    Ok(Exit::Success)
}

fn parse_ops(text: &str) -> Result<Vec<ScalingOperation>, Failure> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| Failure::invalid(format!("ops file: {e}")));
    }
    text.lines()
        .enumerate()
        .map(|(i, line)| (i, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(i, line)| {
            line.parse()
                .map_err(|e| Failure::invalid(format!("ops file line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn apply_ops(
    input: &Input,
    ops_path: &str,
    tol: Tolerance,
    log: bool,
) -> Result<Exit, Failure> {
    if input.path == "-" && ops_path == "-" {
        return Err(Failure::invalid(
            "matrix and ops cannot both come from stdin",
        ));
    }
    let p = load(input, tol)?;
    let ops = parse_ops(&read_source(ops_path)?)?;
    let applied = revcheck::apply_ops(&p, &ops).map_err(|e| {
        let hint = match e.source {
            ScalingError::FactorTooLarge { bound, .. } => format!(
                " (max_{}_factor = {})",
                match e.op.kind {
                    revcheck::OpKind::Row => "row",
                    revcheck::OpKind::Column => "col",
                },
                render::num(bound)
            ),
            _ => String::new(),
        };
        Failure::invalid(format!("{e}{hint}"))
    })?;
    let format = input_format(input);
    if log {
        for (k, step) in applied.steps.iter().enumerate() {
            eprintln!(
                "# step {}: {} (off-diagonal sum {})",
                k + 1,
                step.op,
                render::num(step.off_diagonal_sum)
            );
            eprint!("{}", write_matrix(&step.matrix, format));
        }
    }
    print!("{}", write_matrix(&applied.matrix, format));
    Ok(Exit::Success)
}
