use thiserror::Error;

/// Errors raised by the series, threshold, admissibility and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("leading coefficient {modulus:e} is below the division tolerance")]
    ZeroLeadingCoefficient { modulus: f64 },

    #[error("series is not normalized: constant term {re} + {im}i, expected 1")]
    NotNormalized { re: f64, im: f64 },

    #[error("evaluation point has modulus {modulus} outside the closed unit disk")]
    OutOfDisk { modulus: f64 },

    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("singular denominator: {0}")]
    SingularDenominator(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("psi has a pole at the evaluation point (|denominator| = {modulus:e})")]
    PoleHit { modulus: f64 },

    #[error("normalized factor vanishes inside the sampled disk (min modulus {min_modulus:e}, winding {winding})")]
    UnitVanishes { min_modulus: f64, winding: i64 },

    #[error("function is not locally p-valent on the sampled disk")]
    NotLocallyValent,

    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
