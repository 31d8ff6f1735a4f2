use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("incomplete frame: need {needed} bytes, have {available}")]
    Incomplete { needed: usize, available: usize },
    #[error("unsupported protocol version {0}")]
    Version(u8),
    #[error("unknown frame kind {0}")]
    Kind(u8),
    #[error("payload of {len} bytes exceeds the limit of {max}")]
    TooLarge { len: usize, max: usize },
    #[error("{0} trailing bytes after frame")]
    Trailing(usize),
    #[error("malformed payload: {0}")]
    Payload(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Code carried in the first two bytes of an error frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u16)]
pub enum ErrorCode {
    /// Hello shape or window length disagrees with the model.
    ShapeMismatch = 1,
    /// Bad version, unknown kind, oversized or unparsable payload.
    Malformed = 2,
    /// A valid frame arrived out of order, e.g. a window before the hello.
    Protocol = 3,
    Internal = 4,
}

impl ErrorCode {
    pub fn from_u16(v: u16) -> Option<Self> {
        Some(match v {
            1 => Self::ShapeMismatch,
            2 => Self::Malformed,
            3 => Self::Protocol,
            4 => Self::Internal,
            _ => return None,
        })
    }
}

#[derive(Debug, Error)]
pub enum MediatorError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Io(#[from] io::Error),
    /// The peer sent an error frame.
    #[error("server error {code}: {message}")]
    Remote { code: u16, message: String },
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error(transparent)]
    Model(#[from] raekit::Error),
}
