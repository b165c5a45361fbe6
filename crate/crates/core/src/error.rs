use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed arguments: dimension mismatch, invalid weights, bad exponent.
    Input(String),
    /// The requested family has no closed-form projected law.
    UnsupportedFamily(&'static str),
    /// A solver gave up (iteration cap) or hit an inconsistent state.
    Solver(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn dimension_mismatch(expected: usize, found: usize) -> Self {
        Error::Input(alloc::format!(
            "dimension mismatch: expected {expected}, found {found}"
        ))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(msg) => write!(f, "input error: {msg}"),
            Error::UnsupportedFamily(name) => {
                write!(f, "family `{name}` has no closed-form projected law")
            }
            Error::Solver(msg) => write!(f, "solver error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
