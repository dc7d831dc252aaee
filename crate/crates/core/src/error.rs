use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("grid mismatch")]
    GridMismatch,
    #[error("invalid axis {axis} for n = {n}")]
    InvalidAxis { axis: usize, n: usize },
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("matrix is not unitary (residual {0:e})")]
    NonUnitary(f64),
    #[error("B block is singular (|det B| = {0:e})")]
    SingularB(f64),
    #[error("L is singular (|det L| = {0:e})")]
    SingularL(f64),
    #[error("no torus shift gives a well-conditioned free matrix (best sigma_min {0:e})")]
    FactorizationFailed(f64),
    #[error("invalid exponent p = {0}")]
    InvalidExponent(f64),
    #[error("invalid epsilon {0}")]
    InvalidEpsilon(f64),
    #[error("mode/group mismatch: {0}")]
    ModeMismatch(String),
    #[error("weight vanishes at z: {0}")]
    ZeroWeight(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
