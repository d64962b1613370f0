//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by a scalar indistinguishable from zero at precision {abs_prec}")]
    DivisionByZeroAtPrecision { abs_prec: i64 },
    #[error("no significant digits left: {0}")]
    PrecisionExhausted(String),
    #[error("mismatched primes: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("result window is empty: {0}")]
    WindowUnderflow(String),
    #[error("no invertible leading term at precision: {0}")]
    NotAUnit(String),
    #[error("substitution target violates the positive-valuation precondition: {0}")]
    SubstitutionDiverges(String),
    #[error("torus element is not in T_+: {0}")]
    NotInTPlus(String),
    #[error("valuation shift exceeds the group level: {0}")]
    LevelOverflow(String),
    #[error("matrix is not etale at precision: {0}")]
    NotEtale(String),
    #[error("level too small: {0}")]
    LevelTooSmall(String),
    #[error("expansion depth too shallow: {0}")]
    DepthTooShallow(String),
    #[error("representation certification failed: {0}")]
    CertificationFailed(String),
    #[error("window insufficient: {0}")]
    WindowInsufficient(String),
    #[error("certificate violation: {0}")]
    CertificateViolation(String),
    #[error("parse error at {location}: {message}")]
    ParseError { location: String, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
