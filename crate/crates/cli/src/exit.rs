//! Mapping of failures onto process exit codes.

use qdwitness_core::Error;

pub const CONFIG_ERROR: u8 = 2;
pub const INVARIANT_VIOLATION: u8 = 3;
pub const STALLED: u8 = 4;

/// Malformed or inconsistent user input.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

/// 2 for bad input, 3 when a matrix breaks a numerical invariant, 4 when
/// Monte Carlo sampling stalls, 1 for anything else (IO and the like).
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return CONFIG_ERROR;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Stalled { .. }) => STALLED,
        Some(
            Error::InvariantViolation(_)
            | Error::NotHermitian(_)
            | Error::NotPositive(_)
            | Error::InvalidTrace(_)
            | Error::NotNormalized(_)
            | Error::NotUnitary(_)
            | Error::NotTracePreserving(_),
        ) => INVARIANT_VIOLATION,
        Some(_) => CONFIG_ERROR,
        None => 1,
    }
}
