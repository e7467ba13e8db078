use std::path::PathBuf;

/// Failure class, used by callers to map errors onto process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input could not be read or decoded.
    Input,
    /// The input was fine but violates a precondition of the requested analysis.
    Precondition,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {detail}")]
    Malformed { path: PathBuf, detail: String },

    #[error("empty series: {detail}")]
    EmptySeries { detail: String },

    #[error("series too short: {len} samples, need at least {required}")]
    SeriesTooShort { len: usize, required: usize },

    #[error("octave range: {detail}")]
    OctaveRange { detail: String },

    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },

    #[error("record belongs to no labeled session: {detail}")]
    UnknownSession { detail: String },

    #[error("no download traffic from {addr}")]
    NoSuchFlow { addr: std::net::Ipv4Addr },

    #[error("circulant embedding not nonnegative definite: {detail}")]
    EmbeddingFailed { detail: String },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } | Error::Malformed { .. } => ErrorClass::Input,
            _ => ErrorClass::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
