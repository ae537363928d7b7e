//! Incremental DTE for email addresses.
//!
//! The space of addresses is unbounded, so it is materialized lazily. Every
//! registration appends a block of `seed_block` messages: the user's address
//! at a random position and `seed_block - 1` honey addresses drawn from a
//! dataset. Each message owns `seed_unit` consecutive seeds. Decoding
//! reduces a seed modulo the number of assigned seeds, which is the
//! identity for every seed issued so far.

use std::sync::Mutex;

use rand::seq::index;
use rand::{CryptoRng, Rng, RngCore};

use crate::error::{Error, Result};
use crate::keycrypt::Seed;
use crate::mapstore::ChunkedMapStore;
use crate::space::{append_messages, decode_modulo};

/// `local-part@domain` shape check: local part 1..=64 octets of atext and
/// non-adjacent dots, domain 1..=255 octets of dot-separated LDH labels.
pub fn is_valid_email(addr: &str) -> bool {
    let Some((local, domain)) = addr.split_once('@') else { return false };
    if local.is_empty() || local.len() > 64 || domain.is_empty() || domain.len() > 255 {
        return false;
    }
    const SPECIALS: &[u8] = b"!#$%&'*+-/=?^_`{|}~.";
    let local_ok = local.bytes().all(|b| b.is_ascii_alphanumeric() || SPECIALS.contains(&b))
        && !local.starts_with('.')
        && !local.ends_with('.')
        && !local.contains("..");
    let domain_ok = domain.split('.').count() >= 2
        && domain.split('.').all(|label| {
            !label.is_empty()
                && label.len() <= 63
                && label.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
                && !label.starts_with('-')
                && !label.ends_with('-')
        });
    local_ok && domain_ok
}

/// Pool of plausible addresses used as honey padding.
#[derive(Debug, Clone)]
pub struct HoneyDataset {
    emails: Vec<String>,
}

impl HoneyDataset {
    pub fn new(emails: Vec<String>) -> Result<Self> {
        if let Some(bad) = emails.iter().find(|e| !is_valid_email(e)) {
            return Err(Error::Config(format!("honey dataset entry {bad:?} is not an email address")));
        }
        Ok(HoneyDataset { emails })
    }

    /// One address per line; blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned).collect())
    }

    pub fn len(&self) -> usize {
        self.emails.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emails.is_empty()
    }

    pub fn emails(&self) -> &[String] {
        &self.emails
    }

    /// Synthetic addresses built from romanized name tokens and common
    /// mail domains.
    pub fn synthetic<R: Rng>(n: usize, rng: &mut R) -> Self {
        const SURNAMES: &[&str] = &[
            "wang", "li", "zhang", "liu", "chen", "yang", "huang", "zhao", "wu", "zhou", "xu", "sun", "ma",
            "zhu", "hu", "guo", "he", "lin", "luo", "gao", "zheng", "liang", "xie", "song", "tang", "han",
            "feng", "deng", "cao", "peng",
        ];
        const GIVEN: &[&str] = &[
            "wei", "fang", "na", "min", "jing", "lei", "jun", "yang", "yong", "yan", "jie", "tao", "ming",
            "chao", "xiuying", "xia", "ping", "gang", "hui", "hong", "qiang", "lin", "dan", "hao", "xin",
            "yu", "bo", "kai", "peng", "ting", "zuoguang", "jiaqian", "hongsong", "limin",
        ];
        const DOMAINS: &[&str] = &[
            "qq.com", "163.com", "126.com", "sina.com", "gmail.com", "outlook.com", "hotmail.com",
            "foxmail.com", "yahoo.com", "sohu.com", "aliyun.com", "mails.ucas.ac.cn", "iie.ac.cn",
            "pku.edu.cn", "tsinghua.edu.cn",
        ];
        let emails = (0..n)
            .map(|_| {
                let s = SURNAMES[rng.gen_range(0..SURNAMES.len())];
                let g = GIVEN[rng.gen_range(0..GIVEN.len())];
                let local = match rng.gen_range(0..5) {
                    0 => format!("{g}{s}"),
                    1 => format!("{s}{g}{}", rng.gen_range(1..100)),
                    2 => format!("{s}.{g}"),
                    3 => format!("{g}_{s}{}", rng.gen_range(1960..2010)),
                    _ => format!("{s}{g}{}", rng.gen_range(10..20)),
                };
                format!("{local}@{}", DOMAINS[rng.gen_range(0..DOMAINS.len())])
            })
            .collect();
        HoneyDataset { emails }
    }
}

/// Honey addresses mapped before the first registration.
pub const DEFAULT_BOOTSTRAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncrementalParams {
    /// Seeds per mapped message.
    pub seed_unit: u128,
    /// Messages appended per registration (one real, the rest honey).
    pub seed_block: usize,
}

impl Default for IncrementalParams {
    fn default() -> Self {
        IncrementalParams { seed_unit: 10, seed_block: 10 }
    }
}

/// Outcome of a registration on an incremental space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Registered {
    pub seed: Seed,
    /// Assigned seed total after the registration.
    pub seed_num: u128,
}

#[derive(Debug)]
pub struct EmailSpace {
    store: ChunkedMapStore,
    params: IncrementalParams,
    honey: HoneyDataset,
    writer: Mutex<()>,
}

impl EmailSpace {
    pub fn new(store: ChunkedMapStore, params: IncrementalParams, honey: HoneyDataset) -> Result<Self> {
        if params.seed_unit == 0 || params.seed_block == 0 {
            return Err(Error::Config("seed_unit and seed_block must be positive".into()));
        }
        if honey.len() < params.seed_block - 1 {
            return Err(Error::HoneyExhausted { need: params.seed_block - 1, have: honey.len() });
        }
        Ok(EmailSpace { store, params, honey, writer: Mutex::new(()) })
    }

    pub fn store(&self) -> &ChunkedMapStore {
        &self.store
    }

    pub fn params(&self) -> IncrementalParams {
        self.params
    }

    /// Assigned seed total. The store is the source of truth.
    pub fn seed_num(&self) -> u128 {
        self.store.total_end()
    }

    /// Maps `n` honey addresses before any real registration.
    pub fn bootstrap<R: RngCore + CryptoRng>(&self, n: usize, rng: &mut R) -> Result<u128> {
        let _w = self.writer.lock().unwrap();
        if self.store.line_count() > 0 {
            return Err(Error::AlreadyPopulated(self.store.name().to_owned()));
        }
        if n > 0 && self.honey.is_empty() {
            return Err(Error::HoneyExhausted { need: 1, have: 0 });
        }
        let pool = self.honey.emails();
        let picks: Vec<&str> = if n <= pool.len() {
            index::sample(rng, pool.len(), n).into_iter().map(|i| pool[i].as_str()).collect()
        } else {
            (0..n).map(|_| pool[rng.gen_range(0..pool.len())].as_str()).collect()
        };
        append_messages(&self.store, picks, self.params.seed_unit, false)?;
        Ok(self.seed_num())
    }

    /// Registers `email` at a uniformly random position of a fresh block.
    pub fn register_encode<R: RngCore + CryptoRng>(&self, email: &str, rng: &mut R) -> Result<Registered> {
        let insert_index = rng.gen_range(0..self.params.seed_block);
        self.register_encode_at(email, insert_index, rng)
    }

    /// [`register_encode`](Self::register_encode) with a fixed position.
    pub fn register_encode_at<R: RngCore + CryptoRng>(
        &self,
        email: &str,
        insert_index: usize,
        rng: &mut R,
    ) -> Result<Registered> {
        if !is_valid_email(email) {
            return Err(Error::invalid("the email address is not valid"));
        }
        if insert_index >= self.params.seed_block {
            return Err(Error::Config(format!("insert index {insert_index} outside block")));
        }
        let _w = self.writer.lock().unwrap();
        let pool = self.honey.emails();
        let mut block: Vec<&str> = index::sample(rng, pool.len(), self.params.seed_block - 1)
            .into_iter()
            .map(|i| pool[i].as_str())
            .collect();
        block.insert(insert_index, email);
        let old = append_messages(&self.store, block, self.params.seed_unit, false)?;
        let unit = self.params.seed_unit;
        let start = old + insert_index as u128 * unit;
        let seed = rng.gen_range(start..start + unit);
        Ok(Registered { seed: Seed(seed as u64), seed_num: self.seed_num() })
    }

    /// `seed mod seed_num`, then the mapping-file lookup.
    pub fn decode(&self, seed: Seed) -> Result<String> {
        decode_modulo(&self.store, seed)
    }
}
