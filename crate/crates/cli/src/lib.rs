//! Library side of the `ufp` binary: strategy grammar, the `run` and `sweep`
//! commands, and the acceptance checks behind `verify`.

// `!(a <= b)` is deliberate: a NaN capital must count as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod grammar;
pub mod runner;

pub use acceptance::{run_criterion, verify_command, CriterionResult, CRITERIA};
pub use grammar::{parse_forecaster, parse_skeptic, parse_spec, ParseError, ParsedSpec};
pub use runner::{default_summary_path, read_grid, run_command, sweep_command, CliError, GameReport, RunConfig};
