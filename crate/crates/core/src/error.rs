use thiserror::Error;

use crate::fock::FockBasis;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("cannot parse `{input}` as a rational number: {reason}")]
    RationalParse { input: String, reason: String },

    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch { left: FockBasis, right: FockBasis },

    #[error("margin {margin} exceeds the truncation caps of {basis:?}")]
    MarginTooLarge { margin: usize, basis: FockBasis },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polynomial spinor outside the j = {j} block: {reason}")]
    SpinorOutOfBlock { j: u32, reason: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
