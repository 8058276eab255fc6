use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("not an exact derivative; irreducible remainder: {remainder}")]
    NotExactDerivative { remainder: String },

    #[error("operator norm reached 1 (det(I - K) = {det:e}); increase truncation or nodes")]
    Singular { det: f64 },

    #[error("singular linear system at pivot {pivot}")]
    SingularSystem { pivot: usize },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(
        "Newton iteration diverged after {iterations} steps (residual norm {residual:e}); {advice}"
    )]
    Divergence {
        iterations: usize,
        residual: f64,
        advice: &'static str,
    },

    #[error("{0}")]
    Window(String),
}

pub type Result<T> = std::result::Result<T, Error>;
