use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A generator or configuration parameter violates its constraints.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Exhaustive enumeration would exceed the configured committee budget.
    #[error("enumeration budget exceeded: C({m},{k}) = {committees} committees, budget is {budget}")]
    Budget {
        m: usize,
        k: usize,
        committees: u128,
        budget: u64,
    },

    /// No load distribution exists (some candidate has no approvers).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Both optima of a ratio are zero.
    #[error("degenerate profile: {0}")]
    Degenerate(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported input at line {line}: {message}")]
    Unsupported { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parameter(_) | Error::Infeasible(_) | Error::Degenerate(_) => 2,
            Error::Parse { .. } | Error::Unsupported { .. } | Error::Io(_) => 3,
            Error::Budget { .. } => 4,
        }
    }
}
