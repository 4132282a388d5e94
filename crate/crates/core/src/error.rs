use thiserror::Error;

/// Failure modes shared by every solver module.
///
/// The variants line up with the process exit codes used by the command
/// line front end: `Input` is 2, `Infeasible` and `Refused` are 3,
/// `Invariant` is 4. `Contract` is raised when a caller breaks a documented
/// precondition (for example, asking for the vertices of an unbounded region).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invariant breach: {0}")]
    Invariant(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub fn refused(msg: impl Into<String>) -> Self {
        Error::Refused(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// Exit status the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::Infeasible(_) | Error::Refused(_) => 3,
            Error::Contract(_) => 3,
            Error::Invariant(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
