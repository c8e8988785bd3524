use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("basis size {0} cannot represent the dynamics")]
    BasisTooSmall(usize),

    #[error("truncation N = {n} is inadequate: tail p_N / max p = {ratio:e}")]
    TruncationInadequate { n: usize, ratio: f64 },

    #[error("truncation exceeds the hard limit of {limit} Fock states")]
    ResourceExhausted { limit: usize },

    #[error("linewidth undefined for the vacuum state (mean photon number is zero)")]
    Vacuum,

    #[error("{0} requires a different interaction-time distribution")]
    UnsupportedDistribution(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("time integration failed at t = {reached}: {reason}")]
    Integration { reached: f64, reason: String },

    #[error("eigen-decomposition ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("non-decaying mode with rate {0}")]
    NonDecaying(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
