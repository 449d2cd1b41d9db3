use std::fmt;

use thiserror::Error;

use super::document::Position;
use crate::bn::NetworkError;

/// Failure to read a network document. Every variant carries a position.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetSpecError {
    #[error("{position}: syntax error: {message}")]
    Syntax { position: Position, message: String },
    #[error("{position}: missing `version` declaration")]
    MissingVersion { position: Position },
    #[error("{position}: unsupported format version {version}")]
    VersionUnsupported { version: i64, position: Position },
    #[error("{position}: variable `{name}` already declared at {first}")]
    DuplicateVariable { name: String, position: Position, first: Position },
    #[error("{position}: second CPT for `{child}` (first at {first})")]
    DuplicateCpt { child: String, position: Position, first: Position },
    #[error("{position}: `{state}` is not a state of `{parent}` (row of `{child}`)")]
    UnknownStateInRow { child: String, parent: String, state: String, position: Position },
    #[error("{position}: row ({}) of `{child}` given twice", .configuration.join(", "))]
    DuplicateRow { child: String, configuration: Vec<String>, position: Position },
    #[error("{position}: CPT for `{child}` has no row for ({})", .configuration.join(", "))]
    MissingRow { child: String, configuration: Vec<String>, position: Position },
    #[error("{position}: invalid JSON document: {message}")]
    Json { message: String, position: Position },
}

impl NetSpecError {
    pub fn position(&self) -> Position {
        match self {
            Self::Syntax { position, .. }
            | Self::MissingVersion { position }
            | Self::VersionUnsupported { position, .. }
            | Self::DuplicateVariable { position, .. }
            | Self::DuplicateCpt { position, .. }
            | Self::UnknownStateInRow { position, .. }
            | Self::DuplicateRow { position, .. }
            | Self::MissingRow { position, .. }
            | Self::Json { position, .. } => *position,
        }
    }
}

/// A network validation error mapped back onto the declarations involved.
#[derive(Debug, Clone, PartialEq)]
pub struct LocatedError {
    pub error: NetworkError,
    pub positions: Vec<Position>,
}

impl fmt::Display for LocatedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at: Vec<String> = self.positions.iter().map(Position::to_string).collect();
        write!(f, "{}: {}", at.join(", "), self.error)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Document(#[from] NetSpecError),
    #[error("{}", .0.iter().map(LocatedError::to_string).collect::<Vec<_>>().join("\n"))]
    Network(Vec<LocatedError>),
}
