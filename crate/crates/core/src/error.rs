use thiserror::Error;

/// Errors produced by the library. Variants are grouped by the layer that
/// raises them; the CLI maps every variant to a config error (exit 2).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("offspring law is supercritical (mean {mean})")]
    Supercritical { mean: String },
    #[error("offspring law puts all mass on one child (xi_1 = 1)")]
    DegenerateOneChild,
    #[error("offspring law has xi_0 = 0")]
    NoLeaves,
    #[error("offspring law is not normalized (total mass {total})")]
    NotNormalized { total: String },
    #[error("offspring law has a negative coefficient at {index}")]
    NegativeMass { index: usize },
    #[error("offspring law requires finite variance but it is not available: {0}")]
    MomentUnavailable(String),
    #[error("offspring law is not critical (mean {mean})")]
    NotCritical { mean: String },

    #[error("degree set must contain 0")]
    SetMissingZero,
    #[error("invalid degree set {0:?}")]
    BadSet(String),

    #[error("series has zero constant term and cannot be inverted")]
    NotInvertible,
    #[error("truncated law is known only up to order {known}, order {needed} requested")]
    TruncationTooShort { known: usize, needed: usize },

    #[error("invalid tree text {0:?}")]
    BadTreeText(String),
    #[error("invalid depth-first queue: {0}")]
    BadQueue(String),
    #[error("invalid rational {0:?}")]
    BadRational(String),
    #[error("invalid distribution spec: {0}")]
    BadDistSpec(String),

    #[error("vertex cap {cap} exceeds the exhaustive enumeration limit {limit}")]
    EnumerationTooLarge { cap: usize, limit: usize },
    #[error("P(#_A T = {n}) = 0; the conditioned tree is undefined")]
    ZeroProbability { n: usize },
    #[error("rejection sampler exhausted its budget of {tries} tries")]
    BudgetExhausted { tries: u64 },
    #[error("invalid q-family: {0}")]
    BadQFamily(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
