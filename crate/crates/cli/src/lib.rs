//! Library side of the `ghz-worlds` command: scenario files, run reports,
//! the hidden-variable census report and the full claim table.

pub mod claims;
pub mod report;
pub mod scenario_file;

use std::fmt;

/// A scenario that could not be parsed, validated or executed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct SchemaError {
    pub problems: Vec<String>,
}

impl SchemaError {
    pub fn new(problems: Vec<String>) -> Self {
        SchemaError { problems }
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid scenario: {}", self.problems.join("; "))
    }
}

/// Output flavour shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}
