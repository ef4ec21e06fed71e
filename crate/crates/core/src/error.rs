use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("squarefreeness of {0} could not be proven within the trial-division bound")]
    SquarefreeUnproven(BigInt),

    #[error("could not factor cofactor {0} within the trial-division bound")]
    Unfactored(BigInt),

    #[error("point is not on the curve")]
    PointNotOnCurve,

    #[error("point is not in (A/C^2, B/C^3) normal form: {0}")]
    NotNormalized(String),

    #[error("gcd({a}, {c}) != 1")]
    NotCoprime { a: BigInt, c: BigInt },

    #[error("point is not primitive")]
    NotPrimitive,

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(BigInt, BigInt),

    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(BigInt),

    #[error("unsupported conductor {0} (only 1 and 2 are handled)")]
    UnsupportedConductor(BigInt),

    #[error("{0} is too large for exhaustive enumeration")]
    TooLarge(BigInt),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}
