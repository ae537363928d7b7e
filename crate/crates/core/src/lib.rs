//! Honey encryption for server-side personal information.
//!
//! Every field is turned into a 64-bit seed by a distribution-transforming
//! encoder and then XORed with a key derived from the login password. The
//! key is never stored. Decrypting with any key yields a seed, and every seed
//! decodes to a well-formed message drawn from the field's message
//! distribution, so a wrong password produces a plausible decoy instead of an
//! error.
//!
//! The crate provides:
//!
//! * [`keycrypt`]: password to temporary key, and the XOR seed cipher.
//! * [`mapstore`]: chunked `message,cum_end` mapping files with a two-level
//!   binary search.
//! * [`space`]: the four message-space codecs (uniform prefix spaces, ID
//!   numbers, incremental email space, two-part Chinese names).
//! * [`stats`]: chi-square and Kolmogorov-Smirnov helpers used to check the
//!   honey distributions.

pub mod config;
pub mod error;
pub mod keycrypt;
pub mod mapstore;
pub mod space;
pub mod stats;

pub use error::{Error, Result};
pub use keycrypt::{derive_key, xor_crypt, Ciphertext, KeyDerivation, Md5Truncated, Seed, TempKey};
pub use mapstore::{ChunkedMapStore, DirStorage, MapLine, MemStorage, Storage};
pub use config::{build_space, BuildSummary, SpaceConfig, SpaceKind};

/// Size of the seed space every codec maps into.
pub const SEED_SPACE: u128 = 1u128 << 64;
