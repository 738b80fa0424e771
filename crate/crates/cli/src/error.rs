//! Process exit codes and the error type that carries them.

use std::fmt;

pub const EXIT_OK: i32 = 0;
/// File could not be read, parsed or written; bad command-line usage.
pub const EXIT_PARSE: i32 = 2;
/// The file parsed but a table or parameter is invalid.
pub const EXIT_VALIDATION: i32 = 3;
/// The context model does not fit the requested scenario.
pub const EXIT_SCENARIO: i32 = 4;
/// A codebook or search exceeds its budget.
pub const EXIT_RESOURCE: i32 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<semctx::Error> for CliError {
    fn from(e: semctx::Error) -> Self {
        use semctx::Error::*;
        let code = match &e {
            Config(_) | Precondition(_) => EXIT_VALIDATION,
            Scenario(_) => EXIT_SCENARIO,
            Resource(_) => EXIT_RESOURCE,
            Usage(_) => EXIT_PARSE,
        };
        Self::new(code, e.to_string())
    }
}
