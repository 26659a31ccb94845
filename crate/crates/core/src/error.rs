use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid or mode configuration that cannot be honoured.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The pair (u, v) has zero weighted coupling integral, so the quotient is undefined.
    #[error("degenerate pair: potential integral is {0:e}")]
    DegeneratePair(f64),

    /// The descent collapsed or produced non-finite values.
    #[error("solver error: {0}")]
    Solver(String),

    /// Support of the tiled test function leaves the admissible sector.
    #[error("construction error: {reason} (minimal admissible alpha is {min_alpha})")]
    Construction { reason: String, min_alpha: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
