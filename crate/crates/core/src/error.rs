use std::path::PathBuf;

use thiserror::Error;

/// Unified error type for the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The operation only accepts naturals whose decimal expansion ends in 1.
    #[error("p = {0} does not end in the digit 1")]
    NotEndingInOne(u64),

    /// A sieve or sweep was asked to go past the configured ceiling.
    #[error("limit {limit} exceeds the configured maximum {max}")]
    LimitExceeded { limit: u64, max: u64 },

    /// The check is only defined for the (10x+7)(10y+3) class.
    #[error("operation is only defined for case 73, got case {0}")]
    WrongCase(String),

    /// Log-domain comparison needs a positive left-hand side.
    #[error("log-domain comparison requires a positive left-hand side, got {0}")]
    NonPositiveLhs(String),

    /// A constructed instance violated its defining identity.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
