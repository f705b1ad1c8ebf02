use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("requested n = {requested} exceeds the configured cap of {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error(
        "precision escalation exhausted: coefficients certified up to n = {achieved_n} \
         at {precision_bits} bits (first failure at n = {failed_n})"
    )]
    MaxPrecisionExceeded {
        achieved_n: usize,
        failed_n: usize,
        precision_bits: u32,
    },

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("containment violation at n = {n}: {detail}")]
    Containment { n: usize, detail: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
