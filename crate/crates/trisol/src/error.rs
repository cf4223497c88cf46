use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested constant or regime is not covered (e.g. p = N embeddings).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Adaptive quadrature exhausted its refinement budget.
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    /// A configuration or precondition check failed.
    #[error("validation error: {0}")]
    Validation(String),

    /// Expression parser failure.
    #[error("expression error: {0}")]
    Expression(String),

    /// Non-finite value encountered while evaluating a user function.
    #[error("evaluation error: {0}")]
    Eval(String),

    /// Mountain-pass path maximum descended into an endpoint basin.
    #[error("mountain-pass path collapsed: {0}")]
    PathCollapse(String),

    /// A hypothesis required by a certificate genuinely fails.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
