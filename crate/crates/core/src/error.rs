use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("|v(z)| = {residual:e} at z = {z}; not a zero of the model field")]
    NotAZero { z: String, residual: f64 },

    #[error("finite-difference stencil leaves the domain at z = {0}")]
    StencilOutOfDomain(String),

    #[error("quadrature did not converge: estimated error {est_error:e} > tolerance {tolerance:e}")]
    QuadratureNotConverged { est_error: f64, tolerance: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    #[error("map is not {factor}-contractive: d(Tx,Ty) = {image:e} > {bound:e}")]
    NotContractive { factor: f64, image: f64, bound: f64 },

    #[error("iteration limit of {0} reached")]
    MaxIters(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` is not `Clone`/`PartialEq`; keep the rendered message.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct IoError(pub String);

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError(e.to_string()))
    }
}
