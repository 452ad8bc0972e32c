use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed interval [{lo}, {hi})")]
    MalformedInterval { lo: u64, hi: u64 },
    #[error("query {x} outside window [{base}, {end})")]
    OutOfWindow { x: u64, base: u64, end: u64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("interleaving violated at block {index}")]
    Interleaving { index: usize },
    #[error("blocks overlap at block {index}")]
    BlockOverlap { index: usize },
    #[error("precision budget exceeded: {0}")]
    Precision(String),
    #[error("window bounds violation: {0}")]
    WindowBounds(String),
    #[error("budget exceeded: {needed} bits needed, budget is {budget}")]
    Budget { needed: u64, budget: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
