use thiserror::Error;

use crate::bitseq::BitString;

/// Errors produced by the library.
///
/// Decoder-related variants are split so that callers can tell a branch that
/// legitimately failed its post-check apart from an outright broken invariant.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("segment {index} of the {marker} segmentation has length {len}, above the bound {bound}")]
    SegmentTooLong {
        marker: String,
        index: usize,
        len: usize,
        bound: usize,
    },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    /// A decoder branch produced no acceptable candidate.
    #[error("decode failure: {0}")]
    DecodeFailure(String),

    /// The counter residues fall in a pattern no two-deletion error can produce.
    #[error("classification error: {0}")]
    Classification(String),

    /// Two distinct codewords share a received word.
    #[error("code is not two-deletion-correcting: {first} and {second} both explain the received word")]
    NotCorrecting { first: BitString, second: BitString },

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn decode(msg: impl Into<String>) -> Self {
        Error::DecodeFailure(msg.into())
    }

    /// True for failures a decoder dispatch may treat as "this branch did not apply".
    pub fn is_branch_failure(&self) -> bool {
        matches!(self, Error::DecodeFailure(_) | Error::SegmentTooLong { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
