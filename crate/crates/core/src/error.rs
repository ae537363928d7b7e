use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("password must not be empty")]
    EmptyPassword,

    /// A submitted message does not belong to its space. The text is the
    /// user-facing prompt.
    #[error("{0}")]
    InvalidMessage(String),

    #[error("cum_end not strictly increasing at line {index}: {previous} then {found}")]
    NonMonotone {
        index: u64,
        previous: u128,
        found: u128,
    },

    #[error("block_size {found} at line {index} does not match cum_end difference {expected}")]
    BlockSizeMismatch {
        index: u64,
        expected: u128,
        found: u128,
    },

    #[error("seed {seed} outside mapped range [0, {total_end})")]
    SeedOutOfRange { seed: u128, total_end: u128 },

    #[error("message space `{0}` is empty")]
    EmptySpace(String),

    #[error("mapping store corrupted: {0}")]
    Corrupt(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("store `{0}` is already populated")]
    AlreadyPopulated(String),

    #[error("honey dataset has {have} messages, {need} needed per block")]
    HoneyExhausted { need: usize, have: usize },

    #[error("character {0:?} appears in more than one level table")]
    OverlappingLevels(char),

    #[error("seed space exhausted: {0}")]
    Capacity(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidMessage(msg.into())
    }
}
