//! The demo model: small in-memory phone and name spaces plus one stored
//! record, independent of any JS binding.

use std::sync::Arc;

use rand::rngs::OsRng;
use rand::RngCore;
use serde::Serialize;

use seiguard_core::mapstore::{ChunkedMapStore, MemStorage, Storage, DEFAULT_F_UNIT};
use seiguard_core::space::name::{build_firstname, build_lastname};
use seiguard_core::space::{
    FirstnameCorpus, NamePart, NameSpace, PrefixEntry, PrefixTable, SurnameTable, UniformSpace, WeightModel,
};
use seiguard_core::stats::chi_square_uniform;
use seiguard_core::{derive_key, Ciphertext, Result, Seed, SEED_SPACE};

const LEVEL1: &str = include_str!("../../../data/spaces/level1.txt");
const LEVEL2: &str = include_str!("../../../data/spaces/level2.txt");
const LEVEL3: &str = include_str!("../../../data/spaces/level3.txt");
const FAMILIAR: &str = include_str!("../../../data/spaces/familiar.txt");
const SURNAMES: &str = include_str!("../../../data/spaces/surnames.csv");

pub const PHONE_PREFIX: &str = "136511";
pub const PHONE_SUFFIX_LEN: u32 = 5;

#[derive(Debug, Clone, Serialize)]
pub struct StoredRecord {
    pub phone: String,
    pub lastname: String,
    pub firstname: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decoded {
    pub phone: String,
    pub name: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockInfo {
    pub message: String,
    /// Decimal, since seed offsets exceed JS number precision.
    pub start: String,
    pub size: String,
    /// Share of the whole firstname seed space.
    pub share: f64,
    pub main_part: bool,
}

#[derive(Debug)]
pub struct Demo {
    phone: UniformSpace<PrefixTable>,
    phone_store: ChunkedMapStore,
    names: NameSpace,
    stored: Option<[Ciphertext; 3]>,
}

impl Demo {
    pub fn new() -> Result<Self> {
        let storage: Arc<dyn Storage> = Arc::new(MemStorage::new());
        let phone = UniformSpace::new("phone", PrefixTable::new(vec![PrefixEntry::new(PHONE_PREFIX, PHONE_SUFFIX_LEN)])?)?;
        let phone_store = phone.build_mapfiles(storage.clone(), "phone", DEFAULT_F_UNIT)?;
        let corpus = FirstnameCorpus::new(
            [
                FirstnameCorpus::parse_level(LEVEL1)?,
                FirstnameCorpus::parse_level(LEVEL2)?,
                FirstnameCorpus::parse_level(LEVEL3)?,
            ],
            FirstnameCorpus::parse_familiar(FAMILIAR),
        )?;
        build_firstname(storage.clone(), "firstname", &corpus, &WeightModel::default(), DEFAULT_F_UNIT)?;
        build_lastname(storage.clone(), "lastname", &SurnameTable::parse(SURNAMES)?, 1_000_000_000, DEFAULT_F_UNIT)?;
        let names = NameSpace {
            first: NamePart::open_firstname(storage.clone(), "firstname")?,
            last: NamePart::open_lastname(storage, "lastname")?,
        };
        Ok(Demo { phone, phone_store, names, stored: None })
    }

    /// Encrypts and stores one record; returns what the server would keep.
    pub fn register(&mut self, password: &str, phone: &str, lastname: &str, firstname: &str) -> Result<[Ciphertext; 3]> {
        let key = derive_key(password)?;
        let p = self.phone.encode(phone, &mut OsRng)?;
        let n = self.names.encode_fullname(firstname, lastname, &mut OsRng)?;
        let c = [key.encrypt(p), key.encrypt(n.l_seed), key.encrypt(n.f_seed)];
        self.stored = Some(c);
        Ok(c)
    }

    pub fn stored(&self) -> Option<[Ciphertext; 3]> {
        self.stored
    }

    /// Decrypts the stored record under any password. Wrong passwords
    /// yield plausible values rather than an error.
    pub fn login(&self, password: &str) -> Result<Option<Decoded>> {
        let Some([c_phone, c_ln, c_fn]) = self.stored else { return Ok(None) };
        let key = derive_key(password)?;
        let phone = self.phone.decode(&self.phone_store, key.decrypt(c_phone))?;
        let (first, last) = self.names.decode_fullname(key.decrypt(c_fn), key.decrypt(c_ln))?;
        Ok(Some(Decoded { phone, name: format!("{last}{first}") }))
    }

    /// Decodes `samples` random seeds in the phone space and buckets the
    /// suffixes into `buckets` equal ranges.
    pub fn phone_histogram(&self, samples: usize, buckets: usize) -> Result<Histogram> {
        let buckets = buckets.clamp(2, 1000);
        let m = self.phone.m_sum();
        let mut counts = vec![0u64; buckets];
        for _ in 0..samples {
            let msg = self.phone.decode(&self.phone_store, Seed(OsRng.next_u64()))?;
            let rank = self.phone.rank_of(&msg).expect("decoded phone is in the space");
            counts[(rank * buckets as u128 / m) as usize] += 1;
        }
        let chi = chi_square_uniform(&counts);
        Ok(Histogram { counts, statistic: chi.statistic, dof: chi.dof, p_value: chi.p_value })
    }

    /// Seed block of a firstname: its weight-derived size in the main part,
    /// or the minimum block for a rare name not yet seen.
    pub fn firstname_block(&self, firstname: &str) -> Result<BlockInfo> {
        let part = &self.names.first;
        part.validate(firstname)?;
        let total = part.seed_num();
        let share = |size: u128| size as f64 / total.max(1) as f64;
        if let Some(line) = part.find_main(firstname)? {
            let size = line.block_size.unwrap_or(0);
            return Ok(BlockInfo {
                message: firstname.to_owned(),
                start: (line.cum_end - size).to_string(),
                size: size.to_string(),
                share: share(size),
                main_part: true,
            });
        }
        let size = seiguard_core::space::name::MIN_SEED_UNIT;
        Ok(BlockInfo {
            message: firstname.to_owned(),
            start: total.to_string(),
            size: size.to_string(),
            share: share(size),
            main_part: false,
        })
    }

    pub fn seed_space() -> u128 {
        SEED_SPACE
    }
}
