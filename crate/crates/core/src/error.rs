use alloc::string::String;
use core::fmt;

/// Errors raised by the engine, environments and oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A translation matrix has ragged rows, no rows, or duplicate rows.
    InvalidMatrix(String),
    /// A numeric parameter is outside its domain.
    Parameter(String),
    /// A combination of inputs that the engine refuses to run.
    Configuration(String),
    /// A candidate separator leaves two actions undistinguished.
    NotASeparator { first: usize, second: usize },
    /// An oracle was handed data it cannot process.
    Oracle(String),
    /// Malformed environment input such as an infeasible allocation.
    Input(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMatrix(m) => write!(f, "invalid translation matrix: {m}"),
            Error::Parameter(m) => write!(f, "invalid parameter: {m}"),
            Error::Configuration(m) => write!(f, "configuration error: {m}"),
            Error::NotASeparator { first, second } => {
                write!(f, "actions {first} and {second} are not separated")
            }
            Error::Oracle(m) => write!(f, "oracle error: {m}"),
            Error::Input(m) => write!(f, "input error: {m}"),
        }
    }
}

impl core::error::Error for Error {}
