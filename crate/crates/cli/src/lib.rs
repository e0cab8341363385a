//! Configuration-driven runs of the `ellipthom-core` solvers, with
//! canonical JSON, CSV and SVG output.

pub mod canonical;
pub mod commands;
pub mod config;
pub mod gridio;
pub mod report;
pub mod svg;
pub mod sweep;

use std::fmt;

use serde_json::json;

/// Failure of a command, with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or invalid configuration or input file: exit 1.
    Config(String),
    /// A solver or generator failed on valid input: exit 2.
    Solver(String),
    /// Output could not be written: exit 2.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Solver(_) | Self::Io(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Solver(_) => "solver",
            Self::Io(_) => "io",
        }
    }

    /// The one-line machine-readable form written to stderr.
    pub fn to_json(&self) -> String {
        let message = match self {
            Self::Config(m) | Self::Solver(m) | Self::Io(m) => m,
        };
        json!({ "error": self.kind(), "message": message }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

impl std::error::Error for CliError {}

impl From<ellipthom_core::Error> for CliError {
    fn from(e: ellipthom_core::Error) -> Self {
        Self::Solver(e.to_string())
    }
}
