use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} has shape {left}, expected {right}")]
    DimensionMismatch {
        what: &'static str,
        left: String,
        right: String,
    },

    #[error("entry ({row}, {col}) = {value} lies outside [-1, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unknown game kind `{0}`")]
    UnknownGameKind(String),

    #[error("parse error at line {line}, column {column}: {reason}")]
    Parse {
        line: usize,
        column: usize,
        reason: String,
    },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("epoch {epoch}: {source}")]
    Epoch {
        epoch: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("zero weight at index {index} in the previous {player} strategy")]
    ZeroWeight { player: &'static str, index: usize },

    #[error("{0}")]
    Analysis(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short stable identifier used for machine-readable error lines and FFI codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EntryOutOfRange { .. } => "entry_out_of_range",
            Error::InvalidStrategy(_) => "invalid_strategy",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::UnknownGameKind(_) => "unknown_game_kind",
            Error::Parse { .. } => "parse",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Epoch { source, .. } => source.kind(),
            Error::ZeroWeight { .. } => "zero_weight",
            Error::Analysis(_) => "analysis",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
