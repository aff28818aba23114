use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside the supported domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A computed object contradicts an invariant that must hold by construction
    /// (broken model, tolerance too tight, transcription error in a reference state).
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    /// The operation is defined only for a subset of models (e.g. odd gons).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::InternalInconsistency(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
