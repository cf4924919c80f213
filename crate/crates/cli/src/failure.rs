use std::fmt;
use std::process::ExitCode;

use torquescore::Error;

/// A command failure and the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, unreadable or malformed inputs.
    Usage(anyhow::Error),
    /// The command ran but had nothing to produce.
    Empty(String),
    /// Numerical breakdown while scoring or analysing.
    Numerical(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Usage(_) => 2,
            Failure::Empty(_) => 3,
            Failure::Numerical(_) => 4,
        })
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        Failure::Usage(anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Numerical(e) => write!(f, "{e:#}"),
            Failure::Empty(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if is_numerical(&e) {
            Failure::Numerical(e.into())
        } else if let Error::EmptyStratum { .. } = e {
            Failure::Empty(e.to_string())
        } else {
            Failure::Usage(e.into())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.into())
    }
}

pub fn is_numerical(e: &Error) -> bool {
    matches!(
        e,
        Error::SingularEulerMap { .. }
            | Error::EmptyStack
            | Error::AllDegenerate
            | Error::Unscorable { .. }
            | Error::DegenerateVariance(_)
    )
}

pub type CmdResult<T = ()> = Result<T, Failure>;
