use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("line index {index} out of range for {lines} lines")]
    Index { index: usize, lines: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A requested coordinate is not covered by the environment grid.
    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("instance too large for enumeration: {lists} lists exceeds the cap of {cap}")]
    Capacity { lists: u128, cap: u128 },

    #[error("initial condition is unrewarded on the whole window")]
    NoReward,

    #[error("invalid input: {0}")]
    Input(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
