use thiserror::Error;

/// Errors raised by environments, agents and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The evaluation or episode budget has no room for the requested step.
    #[error("evaluation budget exhausted")]
    BudgetExhausted,

    /// A step was requested after the final year without a reset.
    #[error("episode is done; reset before stepping again")]
    EpisodeDone,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Transport-level failure talking to a remote environment. Retryable.
    #[error("transport error: {0}")]
    Transport(String),

    /// The remote side answered with an error we have no local mapping for.
    #[error("remote error: {0}")]
    Remote(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("run {index} failed: {source}")]
    Run {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Whether retrying the same request may succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Transport(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
