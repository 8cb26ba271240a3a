use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("reciprocal of zero")]
    ZeroReciprocal,
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("rational {0:?} is not in reduced form")]
    NotCanonical(String),

    #[error("argument out of range: {0}")]
    Domain(String),
    #[error("n = {n} exceeds the oracle bound {bound}")]
    OracleBound { n: u64, bound: u64 },
    #[error("prime table limit {limit} is below the required {needed}")]
    TableTooSmall { limit: u64, needed: u64 },
    #[error("interval {0} straddles zero")]
    IntervalStraddlesZero(String),

    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
