//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("parameter violation: {0}")]
    ParamViolation(String),
    #[error("gaussian parameter {s} below quality threshold {threshold} of the basis")]
    QualityTooLow { s: f64, threshold: f64 },
    #[error("retry budget exhausted in {0}")]
    RetryBudget(&'static str),
    #[error("matrix is not a column prefix of the extension target")]
    NotAPrefix,
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("ciphertext coordinate decodes to neither 0 nor 1")]
    MalformedCiphertext,
    #[error("commitment openings are inconsistent (binding violation)")]
    BindingViolation,
    #[error("one-time signing key already consumed")]
    KeyReuse,
    #[error("user key holds no leaf entry for the requested period")]
    MissingLeaf,
    #[error("user key entry set is corrupt: {0}")]
    CorruptKey(String),
    #[error("no period after {0}: key lifetime exhausted")]
    EndOfLifetime(u64),
    #[error("signature rejected")]
    VerifyReject,
    #[error("opening rejected: {0}")]
    OpenReject(String),
    #[error("encoding error: {0}")]
    Encoding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
