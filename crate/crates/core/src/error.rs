use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters: qubit counts, generator arguments, grid ranges.
    #[error("configuration error: {0}")]
    Config(String),

    /// A state would not fit under the configured qubit cap.
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("dimension mismatch: {left} vs {right} qubits")]
    Dimension { left: usize, right: usize },

    /// The state became empty or unnormalized where that is not allowed.
    #[error("state error: {0}")]
    State(String),

    /// A run exceeded its time budget.
    #[error("timed out: {0}")]
    Timeout(String),

    #[error("circuit parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[cfg(feature = "store")]
    #[error("store error: {0}")]
    Store(#[from] rusqlite::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn state(msg: impl Into<String>) -> Self {
        Error::State(msg.into())
    }
}
