//! Process-level error taxonomy.
//!
//! Every failure is folded into one of three buckets that map 1:1 onto exit
//! codes, so scripts can distinguish "fix your config" from "the numerics
//! gave up" from "the cross-check failed":
//!
//! * configuration problems → exit code 2,
//! * numerical failures while evaluating a valid scenario → exit code 3,
//! * validation checks exceeding their tolerances → exit code 4.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// The scenario file, a flag, or an environment variable is unusable;
    /// the message names the offending field.
    Config(String),
    /// A solver or quadrature routine failed on otherwise valid input.
    Numeric(String),
    /// A validation run completed but at least one check missed tolerance.
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Validation(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration: {msg}"),
            CliError::Numeric(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Validation(msg) => write!(f, "validation failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Shorthand for wrapping a library error as a numerical failure.
pub fn numeric(context: &str, err: impl fmt::Display) -> CliError {
    CliError::Numeric(format!("{context}: {err}"))
}

/// Shorthand for a configuration complaint about a named field.
pub fn config(field: &str, reason: impl fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {reason}"))
}
