use thiserror::Error;

pub type Result<T, E = QatsError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QatsError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{what} is not a probability vector (sum = {sum}, entries must lie in [0, 1])")]
    NotStochastic { what: String, sum: f64 },

    #[error("a hidden Markov model needs at least two states, got {0}")]
    TooFewStates(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("emission log-density is not finite for state {state} at position {position}")]
    NonFiniteEmission { state: usize, position: usize },

    #[error("index out of range: {0}")]
    OutOfBounds(String),

    #[error("search domain {lo}..={hi} is empty")]
    EmptyDomain { lo: usize, hi: usize },

    #[error("no admissible path on segment {ell}..={r}: every candidate score is -inf")]
    Infeasible { ell: usize, r: usize },

    #[error("instance too large for exhaustive search: {states}^{len} paths")]
    InstanceTooLarge { states: usize, len: usize },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl QatsError {
    /// True for errors caused by bad user input rather than by the data or the runtime.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            QatsError::DimensionMismatch(_)
                | QatsError::NotStochastic { .. }
                | QatsError::TooFewStates(_)
                | QatsError::InvalidParameter(_)
                | QatsError::OutOfBounds(_)
                | QatsError::EmptyDomain { .. }
                | QatsError::InstanceTooLarge { .. }
                | QatsError::Parse(_)
                | QatsError::Json(_)
                | QatsError::Csv(_)
        )
    }
}
