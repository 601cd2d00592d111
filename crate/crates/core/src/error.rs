use thiserror::Error;

pub type Result<T> = std::result::Result<T, QcbError>;

#[derive(Debug, Error)]
pub enum QcbError {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("index {index} out of range for {len} entries")]
    Index { index: usize, len: usize },

    #[error("round {round} outside the schedule of {len} rounds")]
    Range { round: usize, len: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl QcbError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        QcbError::Config(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(QcbError::Dimension { expected, found })
        }
    }

    /// True for failures that come from the numerics rather than from the
    /// caller's input or the environment.
    pub fn is_numerical(&self) -> bool {
        matches!(self, QcbError::Numerical(_) | QcbError::Invariant(_))
    }
}
