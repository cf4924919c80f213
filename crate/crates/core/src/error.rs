use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {source_name}, line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid model: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("Euler-rate map is singular at joint {joint} (smallest singular value {sigma_min:e})")]
    SingularEulerMap { joint: usize, sigma_min: f64 },

    #[error("sequence too short: need at least {required} frames, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("cannot resample {from} fps to {to} fps: not an integer stride")]
    NonIntegerStride { from: f64, to: f64 },

    #[error("stacked Jacobian is empty")]
    EmptyStack,

    #[error("every frame of the clip is degenerate")]
    AllDegenerate,

    #[error("clip is unscorable: {degenerate} of {total} frames degenerate")]
    Unscorable { degenerate: usize, total: usize },

    #[error("too few records: need at least {required}, got {actual}")]
    TooFewRecords { required: usize, actual: usize },

    #[error("sequence length mismatch: {left} vs {right} frames")]
    LengthMismatch { left: usize, right: usize },

    #[error("no records with MDS below {threshold}")]
    EmptyStratum { threshold: f64 },

    #[error("correlation undefined: {0} column has zero variance")]
    DegenerateVariance(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }
}
