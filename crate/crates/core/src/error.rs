use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("weight {0} is not an even integer >= 4")]
    InvalidWeight(u32),
    #[error("truncation {got} too small, need at least {need}")]
    TruncationTooSmall { got: usize, need: usize },
    #[error("no eigenvalue stored for prime {0}")]
    MissingPrime(u64),
    #[error("Hecke operator has a repeated eigenvalue at working precision (weight {0})")]
    RepeatedEigenvalue(u32),
    #[error("eigenvalue coverage insufficient: need lambda(n) for n <= {need}, have {have}")]
    Coverage { need: u64, have: u64 },
    #[error("tolerance {0:e} unattainable with the available truncation")]
    Unattainable(f64),
    #[error("modulus {c} exceeds the configured guard {max}")]
    Guard { c: u64, max: u64 },
    #[error("zeta has a pole at s = 1")]
    ZetaPole,
    #[error("no stationary point in the interval")]
    NoStationaryPoint,
    #[error("more than one stationary point in the interval")]
    MultipleStationaryPoints,
    #[error("parameter window violated: {0}")]
    Window(String),
    #[error("argument outside the strip of validity: {0}")]
    Strip(String),
    #[error("truncation certificate failed: {0}")]
    Truncation(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub type Result<T> = std::result::Result<T, Error>;
