use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("constraint violated: sum n|a_n|^2 deviates from 1 by {deviation:e} (tolerance {tolerance:e})")]
    Constraint { deviation: f64, tolerance: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("search budget exceeded: {needed} nodes > cap {cap}")]
    Size { needed: u128, cap: u128 },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("no convergence after {iterations} iterations ({detail})")]
    Convergence { iterations: usize, detail: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("ordering error: {0}")]
    Ordering(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
