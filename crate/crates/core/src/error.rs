use thiserror::Error;

/// Failure categories shared by every module.
///
/// The CLI maps `Precondition`/`Domain`/`Structural` to exit code 2,
/// `Resource` to 3 and `Invariant`/`Convergence` to 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("element does not match group {0}")]
    Structural(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("resource cap exceeded: {what} (limit {limit}, reached {reached})")]
    Resource {
        what: String,
        limit: usize,
        reached: usize,
    },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("no convergence: {what} (residual {residual:e})")]
    Convergence { what: String, residual: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
