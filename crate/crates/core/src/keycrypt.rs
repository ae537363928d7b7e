//! Temporary key derivation and the reversible seed cipher.
//!
//! The key is a pure function of the password. It lives only for the
//! duration of one request and is never written anywhere.

use std::fmt;
use std::str::FromStr;

use md5::{Digest, Md5};

use crate::error::{Error, Result};

/// 64-bit key derived from a login password.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct TempKey(pub u64);

// Keys are deliberately opaque in logs.
impl fmt::Debug for TempKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TempKey(..)")
    }
}

/// A point in the 64-bit seed space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Seed(pub u64);

/// An encrypted seed, persisted as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ciphertext(pub u64);

impl fmt::Display for Ciphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Ciphertext {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<u64>()
            .map(Ciphertext)
            .map_err(|_| Error::Corrupt(format!("ciphertext {s:?} is not a 64-bit decimal")))
    }
}

/// Pluggable password-to-key function.
pub trait KeyDerivation: Send + Sync {
    fn derive(&self, password: &str) -> Result<TempKey>;
}

/// First eight bytes of `MD5(utf8(password))`, read big-endian.
#[derive(Debug, Clone, Copy, Default)]
pub struct Md5Truncated;

impl KeyDerivation for Md5Truncated {
    fn derive(&self, password: &str) -> Result<TempKey> {
        if password.is_empty() {
            return Err(Error::EmptyPassword);
        }
        Ok(TempKey(md5_prefix(password.as_bytes())))
    }
}

pub(crate) fn md5_prefix(bytes: &[u8]) -> u64 {
    let digest = Md5::digest(bytes);
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_be_bytes(head)
}

/// Derives the temporary key with the default [`Md5Truncated`] function.
pub fn derive_key(password: &str) -> Result<TempKey> {
    Md5Truncated.derive(password)
}

/// `key XOR value`. Self-inverse.
#[inline]
pub fn xor_crypt(key: TempKey, value: u64) -> u64 {
    key.0 ^ value
}

impl TempKey {
    pub fn encrypt(self, seed: Seed) -> Ciphertext {
        Ciphertext(xor_crypt(self, seed.0))
    }

    pub fn decrypt(self, cipher: Ciphertext) -> Seed {
        Seed(xor_crypt(self, cipher.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen from a reference MD5 (python hashlib).
    #[test]
    fn derive_key_matches_reference_md5() {
        assert_eq!(derive_key("password").unwrap().0, 0x5f4d_cc3b_5aa7_65d6);
        assert_eq!(md5_prefix(b""), 0xd41d_8cd9_8f00_b204);
    }

    #[test]
    fn empty_password_rejected() {
        assert!(matches!(derive_key(""), Err(Error::EmptyPassword)));
    }

    #[test]
    fn derive_key_is_deterministic() {
        assert_eq!(derive_key("wzg018-pass").unwrap(), derive_key("wzg018-pass").unwrap());
        assert_ne!(derive_key("a").unwrap(), derive_key("b").unwrap());
    }

    #[test]
    fn non_ascii_passwords_use_utf8_bytes() {
        let k = derive_key("王作广").unwrap();
        assert_eq!(k.0, md5_prefix("王作广".as_bytes()));
    }

    #[test]
    fn xor_examples() {
        assert_eq!(xor_crypt(TempKey(0), 12345), 12345);
        assert_eq!(xor_crypt(TempKey(u64::MAX), 0), u64::MAX);
        let k = TempKey(0xdead_beef_0bad_f00d);
        assert_eq!(k.decrypt(k.encrypt(Seed(42))), Seed(42));
    }

    #[test]
    fn ciphertext_decimal_roundtrip() {
        let c = Ciphertext(10558774665968163607);
        assert_eq!(c.to_string(), "10558774665968163607");
        assert_eq!("10558774665968163607".parse::<Ciphertext>().unwrap(), c);
        assert!("18446744073709551616".parse::<Ciphertext>().is_err());
        assert!("-1".parse::<Ciphertext>().is_err());
    }

    #[test]
    fn debug_does_not_print_key() {
        assert_eq!(format!("{:?}", TempKey(7)), "TempKey(..)");
    }
}
