use thiserror::Error;

/// Errors produced by the library.
///
/// Modeled coding failures (an encoder that finds no typical sequence, a
/// decoder that finds two) are outcomes, not errors, and never show up here.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or inconsistent input: unknown variable, bad table, alphabet mismatch.
    #[error("configuration error: {0}")]
    Config(String),
    /// The context model does not satisfy the cardinality rules of the requested scenario.
    #[error("scenario error: {0}")]
    Scenario(String),
    /// A budget (memory, enumeration, grid size) would be exceeded.
    #[error("resource error: {0}")]
    Resource(String),
    /// An operation was called on a value that does not meet its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Sequence lengths or symbol indices out of range.
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! config_err {
    ($($arg:tt)*) => { $crate::error::Error::Config(format!($($arg)*)) };
}
pub(crate) use config_err;
