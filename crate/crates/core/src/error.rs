use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed signal: {0}")]
    MalformedSignal(String),

    #[error("degenerate signal: {0}")]
    DegenerateSignal(&'static str),

    #[error("invalid window {window} for signal of length {len}")]
    InvalidWindow { window: usize, len: usize },

    #[error("shape mismatch: expected length {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("empty signal set")]
    EmptySet,

    #[error("insufficient data: need at least {needed} signals, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
}
