//! Chinese 18-character resident ID numbers.
//!
//! The first 17 digits (region code, birth date, sequence number) form a
//! structured uniform space; the 18th character is the ISO 7064 MOD 11-2
//! check character. Only the 17-digit body is encoded. The check character
//! is dropped at registration and recomputed after decoding, so every honey
//! ID carries a valid checksum.

use std::sync::Arc;

use chrono::{Datelike, Local, NaiveDate};
use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};
use crate::keycrypt::Seed;
use crate::mapstore::{ChunkedMapStore, Storage};
use crate::space::uniform::{Enumeration, UniformSpace};

/// Prompt returned for a malformed or out-of-space ID.
pub const INVALID_ID: &str = "the ID N.O. is not valid";

const WEIGHTS: [u32; 17] = [7, 9, 10, 5, 8, 4, 2, 1, 6, 3, 7, 9, 10, 5, 8, 4, 2];
const CHECK_CHARS: &[u8; 11] = b"10X98765432";
const SEQUENCES: u128 = 1000;

/// MOD 11-2 check character of a 17-digit body.
pub fn checksum_digit(body17: &str) -> Result<char> {
    let bytes = body17.as_bytes();
    if bytes.len() != 17 || !bytes.iter().all(u8::is_ascii_digit) {
        return Err(Error::invalid(INVALID_ID));
    }
    let s: u32 = bytes.iter().zip(WEIGHTS).map(|(&d, w)| (d - b'0') as u32 * w).sum();
    Ok(CHECK_CHARS[(s % 11) as usize] as char)
}

/// Inclusive birth-date window used for plausibility checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BirthWindow {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

impl BirthWindow {
    pub fn new(from: NaiveDate, to: NaiveDate) -> Result<Self> {
        if from > to {
            return Err(Error::Config(format!("birth window {from}..{to} is empty")));
        }
        Ok(BirthWindow { from, to })
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        self.from <= d && d <= self.to
    }

    fn days(&self) -> u128 {
        (self.to - self.from).num_days() as u128 + 1
    }
}

impl Default for BirthWindow {
    /// 1900-01-01 through today.
    fn default() -> Self {
        BirthWindow {
            from: NaiveDate::from_ymd_opt(1900, 1, 1).unwrap(),
            to: Local::now().date_naive(),
        }
    }
}

fn parse_birth(digits: &str) -> Option<NaiveDate> {
    let y = digits[0..4].parse().ok()?;
    let m = digits[4..6].parse().ok()?;
    let d = digits[6..8].parse().ok()?;
    NaiveDate::from_ymd_opt(y, m, d)
}

/// True iff `id` has 17 digits plus the matching check character and a
/// birth date inside `window`.
pub fn validate(id: &str, window: &BirthWindow) -> bool {
    if id.len() != 18 || !id.is_ascii() {
        return false;
    }
    let (body, check) = id.split_at(17);
    let Ok(expected) = checksum_digit(body) else { return false };
    if !check.eq_ignore_ascii_case(&expected.to_string()) {
        return false;
    }
    parse_birth(&body[6..14]).is_some_and(|d| window.contains(d))
}

/// Region codes x birth dates x sequence numbers 000-999.
#[derive(Debug, Clone)]
pub struct IdBodySpace {
    regions: Vec<String>,
    window: BirthWindow,
    days: u128,
}

impl IdBodySpace {
    pub fn new(mut regions: Vec<String>, window: BirthWindow) -> Result<Self> {
        regions.sort();
        regions.dedup();
        if regions.is_empty() {
            return Err(Error::Config("no region codes configured".into()));
        }
        if let Some(r) = regions.iter().find(|r| r.len() != 6 || !r.bytes().all(|b| b.is_ascii_digit())) {
            return Err(Error::Config(format!("region code {r:?} is not 6 digits")));
        }
        let days = window.days();
        Ok(IdBodySpace { regions, window, days })
    }

    pub fn window(&self) -> &BirthWindow {
        &self.window
    }

    pub fn regions(&self) -> &[String] {
        &self.regions
    }
}

impl Enumeration for IdBodySpace {
    fn count(&self) -> u128 {
        self.regions.len() as u128 * self.days * SEQUENCES
    }

    fn rank(&self, body: &str) -> Option<u128> {
        if body.len() != 17 || !body.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let region = self.regions.binary_search_by(|r| r.as_str().cmp(&body[..6])).ok()? as u128;
        let date = parse_birth(&body[6..14]).filter(|d| self.window.contains(*d))?;
        let day = (date - self.window.from).num_days() as u128;
        let seq: u128 = body[14..].parse().ok()?;
        Some((region * self.days + day) * SEQUENCES + seq)
    }

    fn unrank(&self, rank: u128) -> Option<String> {
        if rank >= self.count() {
            return None;
        }
        let seq = rank % SEQUENCES;
        let rest = rank / SEQUENCES;
        let day = rest % self.days;
        let region = (rest / self.days) as usize;
        let date = self.window.from + chrono::Duration::days(day as i64);
        Some(format!(
            "{}{:04}{:02}{:02}{:03}",
            self.regions[region],
            date.year(),
            date.month(),
            date.day(),
            seq
        ))
    }

    fn messages(&self) -> Box<dyn Iterator<Item = String> + '_> {
        let from = self.window.from;
        let to = self.window.to;
        Box::new(self.regions.iter().flat_map(move |r| {
            from.iter_days().take_while(move |d| *d <= to).flat_map(move |d| {
                let stem = format!("{r}{}", d.format("%Y%m%d"));
                (0..SEQUENCES).map(move |s| format!("{stem}{s:03}"))
            })
        }))
    }
}

/// Honey encryption codec for full 18-character IDs.
#[derive(Debug, Clone)]
pub struct IdNumberSpace {
    bodies: UniformSpace<IdBodySpace>,
}

impl IdNumberSpace {
    pub fn new(name: impl Into<String>, bodies: IdBodySpace) -> Result<Self> {
        Ok(IdNumberSpace { bodies: UniformSpace::new(name, bodies)? })
    }

    pub fn with_seed_space(name: impl Into<String>, bodies: IdBodySpace, seed_space: u128) -> Result<Self> {
        Ok(IdNumberSpace { bodies: UniformSpace::with_seed_space(name, bodies, seed_space)? })
    }

    pub fn bodies(&self) -> &UniformSpace<IdBodySpace> {
        &self.bodies
    }

    pub fn validate(&self, id: &str) -> bool {
        validate(id, self.bodies.enumeration().window())
    }

    /// Drops the check character and encodes the 17-digit body.
    pub fn encode_body<R: RngCore + CryptoRng>(&self, id: &str, rng: &mut R) -> Result<Seed> {
        if !self.validate(id) {
            return Err(Error::invalid(INVALID_ID));
        }
        let rank = self.bodies.rank_of(&id[..17]).ok_or_else(|| Error::invalid(INVALID_ID))?;
        Ok(self.bodies.sample_in_block(rank, rng))
    }

    /// Decodes the body (through `store` when given) and appends its check
    /// character.
    pub fn decode_full(&self, store: Option<&ChunkedMapStore>, seed: Seed) -> Result<String> {
        let mut body = self.bodies.decode_with(store, seed)?;
        let check = checksum_digit(&body).map_err(|_| Error::Corrupt(format!("stored ID body {body:?}")))?;
        body.push(check);
        Ok(body)
    }

    pub fn build_mapfiles(&self, storage: Arc<dyn Storage>, file_name: &str, f_unit: usize) -> Result<ChunkedMapStore> {
        self.bodies.build_mapfiles(storage, file_name, f_unit)
    }
}
