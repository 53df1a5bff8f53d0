//! Experiment driver for the lerayflow toolkit: configuration files, the
//! binary field format, run manifests, CSV reports, and the scripted
//! pipelines.

pub mod config;
pub mod io;
pub mod manifest;
pub mod pipelines;
pub mod pool;
pub mod report;

use std::fmt;

/// Driver-level error, mapped onto process exit codes by the binary
/// (0 ok, 2 validation, 3 solver failure, 1 anything else).
#[derive(Debug)]
pub enum CliError {
    /// Configuration violates one or more named rules.
    Validation(Vec<String>),
    /// A numerical run failed (non-contraction, CFL, envelope, ...).
    Solver(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(rules) => {
                writeln!(f, "configuration rejected; violated rules:")?;
                for r in rules {
                    writeln!(f, "  - {r}")?;
                }
                Ok(())
            }
            CliError::Solver(msg) => write!(f, "solver failure: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<lerayflow_core::Error> for CliError {
    fn from(e: lerayflow_core::Error) -> Self {
        CliError::Solver(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Process exit code for an error.
pub fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Validation(_) => 2,
        CliError::Solver(_) => 3,
        CliError::Io(_) => 1,
    }
}
