use thiserror::Error;

/// Failure of an embedding or scoring backend.
#[derive(Debug, Error)]
pub enum BackendError {
    /// Connection refused, timeout or other failure before a response arrived.
    #[error("transport error calling {endpoint}: {message}")]
    Transport { endpoint: String, message: String },
    /// A response arrived but was unusable (bad status, malformed body, wrong length).
    #[error("protocol error from {endpoint}: {message}")]
    Protocol { endpoint: String, message: String },
    #[error("embedding dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("backend {backend} returned a non-finite value")]
    NonFinite { backend: String },
    #[error("invalid backend input: {0}")]
    InvalidInput(String),
}

impl BackendError {
    pub fn is_transport(&self) -> bool {
        matches!(self, BackendError::Transport { .. })
    }
}
