//! File formats, ensembles and the command implementations behind the
//! `vqls` binary.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{cmd_circuits, cmd_decompose, cmd_estimate, cmd_solve, cmd_trace, SolveSummary};
pub use config::RunConfig;
pub use error::{CliError, Result};
