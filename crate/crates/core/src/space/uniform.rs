//! Limited message spaces with a uniform distribution: phone numbers, PINs,
//! card passwords.
//!
//! Messages are enumerated in a fixed order and message `j` owns the seed
//! block `[j*q, (j+1)*q)` where `q = floor(seed_space / m_sum)`. The last
//! message additionally absorbs the remainder, so the blocks tile the seed
//! space exactly. Encoding is pure arithmetic; decoding reads the message
//! back from the mapping files.

use std::ops::Range;
use std::sync::Arc;

use rand::{CryptoRng, Rng, RngCore};

use crate::error::{Error, Result};
use crate::keycrypt::Seed;
use crate::mapstore::{position_to_address, ChunkedMapStore, MapLine, Storage};
use crate::SEED_SPACE;

/// A finite, ordered message set with rank/unrank in both directions.
pub trait Enumeration: Send + Sync + std::fmt::Debug {
    fn count(&self) -> u128;
    /// 0-based rank of `message`, or `None` if it is not in the space.
    fn rank(&self, message: &str) -> Option<u128>;
    fn unrank(&self, rank: u128) -> Option<String>;

    /// Every message in rank order.
    fn messages(&self) -> Box<dyn Iterator<Item = String> + '_> {
        Box::new((0..self.count()).map(move |r| self.unrank(r).expect("rank below count")))
    }
}

impl<E: Enumeration + ?Sized> Enumeration for Arc<E> {
    fn count(&self) -> u128 {
        (**self).count()
    }

    fn rank(&self, message: &str) -> Option<u128> {
        (**self).rank(message)
    }

    fn unrank(&self, rank: u128) -> Option<String> {
        (**self).unrank(rank)
    }

    fn messages(&self) -> Box<dyn Iterator<Item = String> + '_> {
        (**self).messages()
    }
}

/// One prefix followed by `suffix_len` free decimal digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixEntry {
    pub prefix: String,
    pub suffix_len: u32,
}

impl PrefixEntry {
    pub fn new(prefix: impl Into<String>, suffix_len: u32) -> Self {
        PrefixEntry { prefix: prefix.into(), suffix_len }
    }

    fn len(&self) -> usize {
        self.prefix.len() + self.suffix_len as usize
    }

    fn count(&self) -> u128 {
        10u128.pow(self.suffix_len)
    }
}

/// Messages described by a table of `(prefix, suffix digits)` entries.
#[derive(Debug, Clone)]
pub struct PrefixTable {
    entries: Vec<PrefixEntry>,
    offsets: Vec<u128>,
    total: u128,
}

impl PrefixTable {
    pub fn new(entries: Vec<PrefixEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config("prefix table is empty".into()));
        }
        for e in &entries {
            if !e.prefix.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Config(format!("prefix {:?} is not numeric", e.prefix)));
            }
            if e.suffix_len > 20 {
                return Err(Error::Config(format!("suffix length {} too large", e.suffix_len)));
            }
        }
        // A message must match exactly one entry.
        for (i, a) in entries.iter().enumerate() {
            for b in &entries[i + 1..] {
                if a.len() == b.len() && (a.prefix.starts_with(&b.prefix) || b.prefix.starts_with(&a.prefix)) {
                    return Err(Error::Config(format!("prefixes {:?} and {:?} overlap", a.prefix, b.prefix)));
                }
            }
        }
        let mut offsets = Vec::with_capacity(entries.len());
        let mut total = 0u128;
        for e in &entries {
            offsets.push(total);
            total = total
                .checked_add(e.count())
                .filter(|&t| t <= SEED_SPACE)
                .ok_or_else(|| Error::Config("message space larger than the seed space".into()))?;
        }
        Ok(PrefixTable { entries, offsets, total })
    }

    pub fn entries(&self) -> &[PrefixEntry] {
        &self.entries
    }
}

impl Enumeration for PrefixTable {
    fn count(&self) -> u128 {
        self.total
    }

    fn rank(&self, message: &str) -> Option<u128> {
        let (i, e) = self
            .entries
            .iter()
            .enumerate()
            .find(|(_, e)| message.len() == e.len() && message.starts_with(e.prefix.as_str()))?;
        let suffix = &message[e.prefix.len()..];
        if !suffix.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let value = if suffix.is_empty() { 0 } else { suffix.parse::<u128>().ok()? };
        Some(self.offsets[i] + value)
    }

    fn unrank(&self, rank: u128) -> Option<String> {
        if rank >= self.total {
            return None;
        }
        let i = self.offsets.partition_point(|&o| o <= rank) - 1;
        let e = &self.entries[i];
        let value = rank - self.offsets[i];
        Some(if e.suffix_len == 0 {
            e.prefix.clone()
        } else {
            format!("{}{:0width$}", e.prefix, value, width = e.suffix_len as usize)
        })
    }

    // Odometer walk, independent of `unrank`.
    fn messages(&self) -> Box<dyn Iterator<Item = String> + '_> {
        Box::new(self.entries.iter().flat_map(|e| {
            let width = e.suffix_len as usize;
            let mut digits = vec![b'0'; width];
            let mut done = false;
            std::iter::from_fn(move || {
                if done {
                    return None;
                }
                let mut s = e.prefix.clone();
                s.push_str(std::str::from_utf8(&digits).unwrap());
                // increment
                let mut k = width;
                loop {
                    if k == 0 {
                        done = true;
                        break;
                    }
                    k -= 1;
                    if digits[k] == b'9' {
                        digits[k] = b'0';
                    } else {
                        digits[k] += 1;
                        break;
                    }
                }
                Some(s)
            })
        }))
    }
}

/// An explicit, sorted message list (e.g. a `telno.txt` style file).
#[derive(Debug, Clone)]
pub struct MessageList {
    messages: Vec<String>,
}

impl MessageList {
    pub fn new(mut messages: Vec<String>) -> Result<Self> {
        messages.sort();
        messages.dedup();
        if messages.is_empty() {
            return Err(Error::Config("message list is empty".into()));
        }
        for m in &messages {
            crate::mapstore::check_message_text(m).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(MessageList { messages })
    }
}

impl Enumeration for MessageList {
    fn count(&self) -> u128 {
        self.messages.len() as u128
    }

    fn rank(&self, message: &str) -> Option<u128> {
        self.messages.binary_search_by(|m| m.as_str().cmp(message)).ok().map(|i| i as u128)
    }

    fn unrank(&self, rank: u128) -> Option<String> {
        self.messages.get(usize::try_from(rank).ok()?).cloned()
    }
}

/// Uniform DTE over an enumerated message set.
#[derive(Debug, Clone)]
pub struct UniformSpace<E> {
    name: String,
    enumeration: E,
    seed_space: u128,
    block: u128,
    remainder: u128,
}

impl<E: Enumeration> UniformSpace<E> {
    /// Space over the full 2^64 seed space.
    pub fn new(name: impl Into<String>, enumeration: E) -> Result<Self> {
        Self::with_seed_space(name, enumeration, SEED_SPACE)
    }

    /// Space over `[0, seed_space)`; smaller seed spaces are for toy tests.
    pub fn with_seed_space(name: impl Into<String>, enumeration: E, seed_space: u128) -> Result<Self> {
        let name = name.into();
        let m_sum = enumeration.count();
        if m_sum == 0 {
            return Err(Error::EmptySpace(name));
        }
        if seed_space > SEED_SPACE || m_sum > seed_space {
            return Err(Error::Config(format!("space `{name}` has {m_sum} messages for {seed_space} seeds")));
        }
        let block = seed_space / m_sum;
        let remainder = seed_space - block * m_sum;
        Ok(UniformSpace { name, enumeration, seed_space, block, remainder })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn enumeration(&self) -> &E {
        &self.enumeration
    }

    pub fn m_sum(&self) -> u128 {
        self.enumeration.count()
    }

    pub fn seed_space(&self) -> u128 {
        self.seed_space
    }

    /// `q = floor(seed_space / m_sum)`.
    pub fn block(&self) -> u128 {
        self.block
    }

    /// Seeds left over after `m_sum` blocks of `q`; owned by the last message.
    pub fn remainder(&self) -> u128 {
        self.remainder
    }

    /// Seed block owned by the message at `rank`.
    pub fn block_of(&self, rank: u128) -> Range<u128> {
        let start = rank * self.block;
        let end = if rank + 1 == self.m_sum() { self.seed_space } else { start + self.block };
        start..end
    }

    pub fn rank_of(&self, message: &str) -> Option<u128> {
        self.enumeration.rank(message)
    }

    /// Samples a uniformly random seed from the message's block.
    pub fn encode<R: RngCore + CryptoRng>(&self, message: &str, rng: &mut R) -> Result<Seed> {
        let rank = self
            .enumeration
            .rank(message)
            .ok_or_else(|| Error::invalid(format!("{message:?} is not a valid {}", self.name)))?;
        Ok(self.sample_in_block(rank, rng))
    }

    pub(crate) fn sample_in_block<R: RngCore + CryptoRng>(&self, rank: u128, rng: &mut R) -> Seed {
        let b = self.block_of(rank);
        Seed(rng.gen_range(b) as u64)
    }

    /// Rank whose block contains `seed`. Seeds beyond `seed_space` (toy
    /// spaces only) fold into the last block.
    pub fn position_of(&self, seed: Seed) -> u128 {
        (seed.0 as u128 / self.block).min(self.m_sum() - 1)
    }

    /// Independent arithmetic decoder: rank to message without any files.
    pub fn unrank_oracle(&self, position: u128) -> Result<String> {
        self.enumeration
            .unrank(position)
            .ok_or_else(|| Error::SeedOutOfRange { seed: position, total_end: self.m_sum() })
    }

    /// Arithmetic decode, for spaces too large to materialize.
    pub fn decode_arithmetic(&self, seed: Seed) -> Result<String> {
        self.unrank_oracle(self.position_of(seed))
    }

    /// Decodes `seed` by fetching the message line from the mapping files.
    pub fn decode(&self, store: &ChunkedMapStore, seed: Seed) -> Result<String> {
        self.check_store(store)?;
        let position = self.position_of(seed) as u64;
        let (chunk, line_no) = position_to_address(position, store.f_unit());
        Ok(store.read_line(chunk, line_no)?.message)
    }

    /// Decodes through `store` when present, arithmetically otherwise.
    pub fn decode_with(&self, store: Option<&ChunkedMapStore>, seed: Seed) -> Result<String> {
        match store {
            Some(s) => self.decode(s, seed),
            None => self.decode_arithmetic(seed),
        }
    }

    pub fn check_store(&self, store: &ChunkedMapStore) -> Result<()> {
        let snap = store.snapshot();
        if snap.line_count as u128 != self.m_sum() || snap.total_end != self.seed_space {
            return Err(Error::Config(format!(
                "mapping files of `{}` hold {} lines ending at {}, space has {} messages over {} seeds",
                store.name(),
                snap.line_count,
                snap.total_end,
                self.m_sum(),
                self.seed_space
            )));
        }
        Ok(())
    }

    /// Writes the mapping files: one `message,cum_end` line per message.
    pub fn build_mapfiles(&self, storage: Arc<dyn Storage>, file_name: &str, f_unit: usize) -> Result<ChunkedMapStore> {
        let m_sum = self.m_sum();
        let q = self.block;
        let seed_space = self.seed_space;
        let lines = self.enumeration.messages().zip(1u128..).map(move |(m, j)| {
            let cum_end = if j == m_sum { seed_space } else { j * q };
            MapLine::new(m, cum_end)
        });
        ChunkedMapStore::write_chunks(storage, file_name, lines, f_unit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapstore::MemStorage;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy() -> UniformSpace<PrefixTable> {
        // Messages "1".."4" over a 16-seed toy space.
        let t = PrefixTable::new((1..=4).map(|d| PrefixEntry::new(d.to_string(), 0)).collect()).unwrap();
        UniformSpace::with_seed_space("toy", t, 16).unwrap()
    }

    #[test]
    fn toy_build_gives_expected_cum_ends() {
        let s = toy();
        assert_eq!(s.block(), 4);
        let st = s.build_mapfiles(Arc::new(MemStorage::new()), "toy", 100_000).unwrap();
        let ends: Vec<u128> = st.all_lines().unwrap().iter().map(|l| l.cum_end).collect();
        assert_eq!(ends, vec![4, 8, 12, 16]);
    }

    #[test]
    fn toy_encode_stays_in_block() {
        let s = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let seed = s.encode("2", &mut rng).unwrap().0;
            assert!((4..8).contains(&seed));
            let seed = s.encode("1", &mut rng).unwrap().0;
            assert!(seed < 4);
        }
    }

    #[test]
    fn single_message_owns_everything() {
        let s = UniformSpace::new("one", PrefixTable::new(vec![PrefixEntry::new("7", 0)]).unwrap()).unwrap();
        assert_eq!(s.m_sum(), 1);
        assert_eq!(s.block_of(0), 0..SEED_SPACE);
        let st = s.build_mapfiles(Arc::new(MemStorage::new()), "one", 10).unwrap();
        assert_eq!(st.all_lines().unwrap(), vec![MapLine::new("7", SEED_SPACE)]);
        assert_eq!(s.decode(&st, Seed(u64::MAX)).unwrap(), "7");
    }

    #[test]
    fn unrank_examples() {
        let t = PrefixTable::new(vec![PrefixEntry::new("13", 2)]).unwrap();
        assert_eq!(t.unrank(7).unwrap(), "1307");
        assert_eq!(t.unrank(0).unwrap(), "1300");
        assert_eq!(t.unrank(99).unwrap(), "1399");
        assert!(t.unrank(100).is_none());
    }

    #[test]
    fn multi_prefix_rank_unrank() {
        let t = PrefixTable::new(vec![PrefixEntry::new("136", 2), PrefixEntry::new("1395", 1)]).unwrap();
        assert_eq!(t.count(), 110);
        assert_eq!(t.rank("13600"), Some(0));
        assert_eq!(t.rank("13699"), Some(99));
        assert_eq!(t.rank("13950"), Some(100));
        assert_eq!(t.unrank(109).unwrap(), "13959");
        assert_eq!(t.rank("1360"), None);
        assert_eq!(t.rank("1369a"), None);
        assert_eq!(t.rank("14000"), None);
    }

    #[test]
    fn overlapping_prefixes_rejected() {
        assert!(PrefixTable::new(vec![PrefixEntry::new("13", 3), PrefixEntry::new("136", 2)]).is_err());
        assert!(PrefixTable::new(vec![PrefixEntry::new("13", 3), PrefixEntry::new("136", 3)]).is_ok());
        assert!(PrefixTable::new(vec![]).is_err());
    }

    #[test]
    fn odometer_matches_unrank() {
        let t = PrefixTable::new(vec![PrefixEntry::new("5", 2), PrefixEntry::new("61", 1), PrefixEntry::new("7", 0)]).unwrap();
        let walked: Vec<String> = t.messages().collect();
        let ranked: Vec<String> = (0..t.count()).map(|r| t.unrank(r).unwrap()).collect();
        assert_eq!(walked, ranked);
    }

    #[test]
    fn last_seed_decodes_to_last_message() {
        let t = PrefixTable::new(vec![PrefixEntry::new("9", 3)]).unwrap();
        let s = UniformSpace::new("pin", t).unwrap();
        assert!(s.remainder() > 0);
        assert_eq!(s.decode_arithmetic(Seed(u64::MAX)).unwrap(), "9999");
        let st = s.build_mapfiles(Arc::new(MemStorage::new()), "pin", 128).unwrap();
        assert_eq!(s.decode(&st, Seed(u64::MAX)).unwrap(), "9999");
    }

    #[test]
    fn invalid_message_rejected() {
        let s = UniformSpace::new("pin", PrefixTable::new(vec![PrefixEntry::new("", 4)]).unwrap()).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        assert!(s.encode("123", &mut rng).is_err());
        assert!(s.encode("12a4", &mut rng).is_err());
        assert!(s.encode("1234", &mut rng).is_ok());
    }

    #[test]
    fn store_mismatch_is_config_error() {
        let a = UniformSpace::new("a", PrefixTable::new(vec![PrefixEntry::new("1", 1)]).unwrap()).unwrap();
        let b = UniformSpace::new("b", PrefixTable::new(vec![PrefixEntry::new("1", 2)]).unwrap()).unwrap();
        let st = a.build_mapfiles(Arc::new(MemStorage::new()), "a", 100).unwrap();
        assert!(matches!(b.decode(&st, Seed(0)), Err(Error::Config(_))));
    }

    #[test]
    fn message_list_space() {
        let l = MessageList::new(vec!["13651160987".into(), "13000000000".into(), "13651160987".into()]).unwrap();
        assert_eq!(l.count(), 2);
        assert_eq!(l.rank("13651160987"), Some(1));
        assert_eq!(l.unrank(0).unwrap(), "13000000000");
    }
}
