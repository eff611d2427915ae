use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("action has dimension {actual}, expected {expected}")]
    ActionDimension { expected: usize, actual: usize },

    #[error("input has dimension {actual}, expected {expected}")]
    InputDimension { expected: usize, actual: usize },

    #[error("step called on a terminal simulator (after {steps} steps)")]
    StepAfterTerminal { steps: usize },

    #[error("action sequence ended after {consumed} steps without reaching a terminal state")]
    NotTerminal { consumed: usize },

    #[error("empty action sequence")]
    EmptyActions,

    #[error("unknown scenario id {0} (expected 1, 2 or 3)")]
    UnknownScenario(u32),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
