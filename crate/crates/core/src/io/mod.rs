//! Tab-separated link/node files and JSON reports.

mod links;
mod nodes;
mod report;

use thiserror::Error;

use crate::graph::GraphError;

pub use links::{read_link_file, write_link_file, LinkFileOptions, LinkReader};
pub use nodes::read_node_file;
pub use report::{write_report, Report, ViolationRecord};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected 3 or 4 fields, got {got}")]
    FieldCount { line: usize, got: usize },
    #[error("line {line}: expected at least 3 fields, got {got}")]
    NodeFieldCount { line: usize, got: usize },
    #[error("line {line}: invalid {field} {value:?}: {reason}")]
    InvalidField { line: usize, field: &'static str, value: String, reason: String },
    #[error("line {line}: weight column present but the file is read as unweighted")]
    UnexpectedWeight { line: usize },
    #[error("line {line}: missing weight column")]
    MissingWeight { line: usize },
    #[error("line {line}: duplicate node id {id}")]
    DuplicateNode { line: usize, id: u64 },
    #[error("delimiter {0:?} must not be a digit")]
    InvalidDelimiter(char),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl IoError {
    /// Line number for parse errors.
    pub fn line(&self) -> Option<usize> {
        match self {
            IoError::FieldCount { line, .. }
            | IoError::NodeFieldCount { line, .. }
            | IoError::InvalidField { line, .. }
            | IoError::UnexpectedWeight { line }
            | IoError::MissingWeight { line }
            | IoError::DuplicateNode { line, .. } => Some(*line),
            _ => None,
        }
    }
}

pub(crate) fn parse_int<T: std::str::FromStr>(line: usize, field: &'static str, value: &str) -> Result<T, IoError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| IoError::InvalidField {
        line,
        field,
        value: value.to_string(),
        reason: e.to_string(),
    })
}
