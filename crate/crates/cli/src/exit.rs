//! Exit codes and the error type carried up to `main`.

use std::fmt;

use seqmetro::error::Error;

pub const FAILURE: i32 = 1;
pub const MALFORMED: i32 = 2;
pub const NOT_CPTP: i32 = 3;
pub const NON_CONVERGENCE: i32 = 4;
pub const CONDITIONS_NOT_MET: i32 = 5;
pub const SANITY_FAILED: i32 = 6;

#[derive(Debug, Clone, PartialEq)]
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

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(MALFORMED, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn code_for(e: &Error) -> i32 {
    match e {
        Error::NotTracePreserving { .. } | Error::NotCompletelyPositive { .. } => NOT_CPTP,
        Error::NonConvergence { .. } | Error::NoConvergence { .. } | Error::AlgorithmInvariantViolated(_) => {
            NON_CONVERGENCE
        }
        Error::ShapeMismatch { .. }
        | Error::DimensionMismatch { .. }
        | Error::NonFinite
        | Error::InvalidInput(_)
        | Error::InvalidState(_)
        | Error::DomainViolation { .. }
        | Error::NotNormalized { .. }
        | Error::NotHermitian { .. }
        | Error::NotUnitary { .. } => MALFORMED,
        Error::DegenerateUnresolved { .. } | Error::RankDeficientSignal { .. } | Error::DegeneratePurity { .. } => {
            FAILURE
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::new(code_for(&e), e.to_string())
    }
}
