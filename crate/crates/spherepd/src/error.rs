use thiserror::Error;

/// Errors for sequence, operator and validation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parity error: kernel requires j - n even with 0 <= n <= j, got j={j}, n={n}")]
    Parity { j: u64, n: u64 },

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("derivative unavailable: {0}")]
    DerivativeUnavailable(String),

    #[error("step underflow: {0}")]
    StepUnderflow(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
