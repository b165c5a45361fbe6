use std::fmt;

/// Failures of the command-line layer, split by exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Bad arguments, unreadable files, malformed input. Exit status 1.
    Input(String),
    /// A numerical routine failed on valid input. Exit status 2.
    Solver(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 1,
            Error::Solver(_) => 2,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(msg) => write!(f, "input error: {msg}"),
            Error::Solver(msg) => write!(f, "solver error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<cwot_core::Error> for Error {
    fn from(e: cwot_core::Error) -> Self {
        match e {
            cwot_core::Error::Solver(_) => Error::Solver(e.to_string()),
            other => Error::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Input(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
