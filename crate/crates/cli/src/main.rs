mod commands;
mod render;

use std::fmt;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use revcheck::{CheckError, CheckMethod, Format, Tolerance};

/// Decide whether a finite Markov chain is reversible.
#[derive(Debug, Parser)]
#[command(name = "revcheck", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Absolute tolerance (overrides REVCHECK_TOL).
    #[arg(long, global = true, value_name = "ABS")]
    abs_tol: Option<f64>,

    /// Relative tolerance (overrides REVCHECK_TOL).
    #[arg(long, global = true, value_name = "REL")]
    rel_tol: Option<f64>,

    /// Default tolerances as `ABS` or `ABS,REL`.
    #[arg(
        long = "tol",
        env = "REVCHECK_TOL",
        global = true,
        value_name = "ABS[,REL]"
    )]
    tol: Option<String>,

    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Args)]
struct Input {
    /// Matrix file, or `-` for standard input.
    #[arg(value_name = "FILE")]
    path: String,

    /// Input format; inferred from the extension when omitted (stdin: csv).
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a transition matrix and report its structure.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Decide reversibility.
    Check {
        #[command(flatten)]
        input: Input,
        /// auto, symmetrize, oracle or kelly3.
        #[arg(long, default_value = "auto")]
        method: CheckMethod,
        /// Append the stationary distribution when reversible.
        #[arg(long)]
        stationary: bool,
        /// With auto, confirm the verdict by the loop check on chains up to 7 states.
        #[arg(long)]
        cross_check: bool,
    },
    /// Compute the stationary distribution.
    Stationary {
        #[command(flatten)]
        input: Input,
    },
    /// Count the loop equations of the loop criterion for N states.
    CountLoops {
        #[arg(value_name = "N", conflicts_with = "n", required_unless_present = "n")]
        positional: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Generate a random reversible transition matrix.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        ops_count: usize,
        /// Random seed; drawn from the system when omitted and always printed.
        #[arg(long)]
        seed: Option<u64>,
        /// Symmetric zero pairs, e.g. `1-2,3-4`.
        #[arg(long, value_parser = parse_zeros)]
        zeros: Option<ZeroPairs>,
        /// Output format.
        #[arg(long, value_parser = parse_format, default_value = "csv")]
        format: Format,
    },
    /// Apply row and column scaling operations to a transition matrix.
    ApplyOps {
        #[command(flatten)]
        input: Input,
        /// Operations file (`ROW 3 x0.25` per line, or a JSON array), `-` for stdin.
        #[arg(long, value_name = "FILE")]
        ops: String,
        /// Print every intermediate matrix to standard error.
        #[arg(long)]
        log: bool,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

#[derive(Debug, Clone, Default)]
struct ZeroPairs(Vec<(usize, usize)>);

fn parse_zeros(s: &str) -> Result<ZeroPairs, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once('-')
                .ok_or_else(|| format!("expected `i-j`, got {pair:?}"))?;
            let state = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .ok()
                    .and_then(|i| i.checked_sub(1))
                    .ok_or_else(|| format!("state must be a positive integer, got {x:?}"))
            };
            Ok((state(a)?, state(b)?))
        })
        .collect::<Result<_, _>>()
        .map(ZeroPairs)
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    NotReversible = 1,
    InvalidInput = 2,
    NotIrreducible = 3,
    Infeasible = 4,
    Internal = 5,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl fmt::Display) -> Self {
        Failure {
            exit: Exit::InvalidInput,
            message: message.to_string(),
        }
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        let exit = match e {
            CheckError::Reducible => Exit::NotIrreducible,
            CheckError::Infeasible { .. } => Exit::Infeasible,
            CheckError::Disagreement { .. } | CheckError::Inconclusive(_) => Exit::Internal,
        };
        Failure {
            exit,
            message: e.to_string(),
        }
    }
}

fn tolerance(cli: &Cli) -> Result<Tolerance, Failure> {
    let mut tol = Tolerance::default();
    if let Some(raw) = &cli.tol {
        let mut parts = raw.split(',').map(str::trim);
        let num = |s: Option<&str>| -> Result<Option<f64>, Failure> {
            s.map(|s| {
                s.parse()
                    .map_err(|_| Failure::invalid(format!("REVCHECK_TOL: not a number: {s:?}")))
            })
            .transpose()
        };
        if let Some(abs) = num(parts.next())? {
            tol.abs_tol = abs;
        }
        if let Some(rel) = num(parts.next())? {
            tol.rel_tol = rel;
        }
        if parts.next().is_some() {
            return Err(Failure::invalid("REVCHECK_TOL: expected ABS or ABS,REL"));
        }
    }
    Tolerance::new(
        cli.abs_tol.unwrap_or(tol.abs_tol),
        cli.rel_tol.unwrap_or(tol.rel_tol),
    )
    .map_err(Failure::invalid)
}

fn run(cli: Cli) -> Result<Exit, Failure> {
    let tol = tolerance(&cli)?;
    let json = cli.json;
    match cli.command {
        Command::Validate { input } => commands::validate(&input, tol, json),
        Command::Check {
            input,
            method,
            stationary,
            cross_check,
        } => commands::check(&input, tol, json, method, stationary, cross_check),
        Command::Stationary { input } => commands::stationary(&input, tol, json),
        Command::CountLoops { positional, n } => commands::count_loops(positional.or(n), json),
        Command::Generate {
            n,
            ops_count,
            seed,
            zeros,
            format,
        } => commands::generate(n, ops_count, seed, zeros.unwrap_or_default().0, format),
        Command::ApplyOps { input, ops, log } => commands::apply_ops(&input, &ops, tol, log),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exit = match run(cli) {
        Ok(exit) => exit,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.exit
        }
    };
    ExitCode::from(exit as u8)
}
