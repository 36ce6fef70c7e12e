//! Reversibility checking for finite Markov chains.
//!
//! The main entry point is [`symmetrize_check`]: it balances a spanning tree
//! of the chain's mutual-support graph with at most `n - 1` row scalings and
//! declares the chain reversible iff the scaled matrix comes out symmetric.
//! [`oracle_check`] is the exhaustive Kolmogorov loop check used to
//! cross-validate it. [`stationary_balance`] and [`stationary_detailed`]
//! compute stationary distributions, and [`generate_reversible`] builds
//! random reversible chains from the uniform matrix.
//!
//! ```
//! use revcheck::{symmetrize_check, TransitionMatrix, Verdict};
//!
//! let p = TransitionMatrix::from_rows(vec![
//!     vec![0.5, 0.5],
//!     vec![0.25, 0.75],
//! ])?;
//! assert_eq!(symmetrize_check(&p)?.verdict, Verdict::Reversible);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod io;
pub mod kolmogorov;
pub mod matrix;
pub mod report;
pub mod scaling;
pub mod stationary;
pub mod structure;
pub mod symmetrizer;

#[cfg(test)]
mod testing;

pub use io::{parse_matrix, parse_str, write_matrix, write_rows, Format};
pub use kolmogorov::{
    count_loops, enumerate_loops, kelly_column, loop_products, oracle_check, oracle_check_with,
    three_loop_check, OracleOptions,
};
pub use matrix::{
    is_symmetric, is_zero_pattern_symmetric, zero_pattern_asymmetry, MatrixError, SquareMatrix,
    Tolerance, TransitionMatrix, WorkMatrix,
};
pub use report::{
    CheckError, Diagnostics, LoopWitness, Method, OpKind, ReversibilityReport, ScalingOperation,
    Verdict,
};
pub use scaling::{
    apply_ops, generate_reversible, max_col_factor, max_row_factor, Applied, GenerateError,
    GeneratorConfig, Scalable, ScalingError,
};
pub use stationary::{
    stationary_balance, stationary_detailed, verify_detailed_balance, StationaryDistribution,
    StationaryError, StationaryMethod,
};
pub use structure::{
    build_support, is_irreducible, period, spanning_tree, SpanningTree, StructureError,
    SupportGraph,
};
pub use symmetrizer::{build_witness, check, symmetrize_check, CheckMethod};
