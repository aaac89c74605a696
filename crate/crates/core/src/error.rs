use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed group element encoding: {0}")]
    Encoding(String),

    #[error("capacity exceeded: {what} needs {needed} entries, cap is {cap}")]
    Capacity {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("embedding rejected: {0}")]
    Embedding(String),

    #[error("empty or invalid evaluation domain: {0}")]
    Domain(String),

    #[error("restricted weight has zero mass on the subgroup range")]
    DegenerateRestriction,

    #[error("tower construction failed: {reason} (suggested marker length {suggested_marker})")]
    Tower {
        reason: String,
        suggested_marker: usize,
    },

    #[error("stage {stage} failed: {reason}")]
    Stage { stage: usize, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
