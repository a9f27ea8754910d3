use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("argument {value} outside the domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("capability limit: {0}")]
    Capability(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("point {index} is invalid: {reason}")]
    InvalidPoint { index: usize, reason: String },

    #[error("inner-product clusters {a} and {b} are closer than 2*tol = {gap}; retry with a smaller tolerance")]
    Ambiguous { a: f64, b: f64, gap: f64 },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
