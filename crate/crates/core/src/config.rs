//! Space config files.
//!
//! One `key=value` per line, `#` starts a comment. Keys may repeat where
//! noted. File paths are resolved against the config file's directory.
//!
//! ```text
//! space=phone
//! kind=uniform
//! prefix=136511,5
//! prefix=13800138,3
//! f_unit=100000
//! ```
//!
//! | kind        | keys                                                         |
//! |-------------|--------------------------------------------------------------|
//! | `uniform`   | `prefix=<digits>,<suffix_len>` (repeat) or `list=<file>`     |
//! | `idnum`     | `regions=<file>` and/or `region=<code>` (repeat), `birth_from`, `birth_to` |
//! | `email`     | `honey=<file>` or `honey_synthetic=<n>`, `bootstrap`, `seed_unit`, `seed_block` |
//! | `firstname` | `level1`, `level2`, `level3`, `familiar` (files), `seed_unit` |
//! | `lastname`  | `surnames=<file>`, `seed_initial`                            |
//!
//! `seed_space=<n>` shrinks the seed space of a uniform space, for toys.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;
use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};
use crate::mapstore::{ChunkedMapStore, Storage, DEFAULT_F_UNIT};
use crate::space::email::DEFAULT_BOOTSTRAP;
use crate::space::name::{build_firstname, build_lastname, SURNAME_SEED_INITIAL};
use crate::space::{
    BirthWindow, EmailSpace, Enumeration, FirstnameCorpus, HoneyDataset, IdBodySpace, IdNumberSpace,
    IncrementalParams, MessageList, PrefixEntry, PrefixTable, SurnameTable, UniformSpace, WeightModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Uniform,
    IdNumber,
    Email,
    Firstname,
    Lastname,
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" | "phone" | "pin" => SpaceKind::Uniform,
            "idnum" | "id" => SpaceKind::IdNumber,
            "email" => SpaceKind::Email,
            "firstname" => SpaceKind::Firstname,
            "lastname" | "surname" => SpaceKind::Lastname,
            other => return Err(Error::Config(format!("unknown space kind {other:?}"))),
        })
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::Uniform => "uniform",
            SpaceKind::IdNumber => "idnum",
            SpaceKind::Email => "email",
            SpaceKind::Firstname => "firstname",
            SpaceKind::Lastname => "lastname",
        })
    }
}

/// A parsed space config.
#[derive(Debug, Clone)]
pub struct SpaceConfig {
    pub name: String,
    pub kind: SpaceKind,
    base_dir: PathBuf,
    entries: Vec<(String, String)>,
}

/// Accepts plain integers and `<int>e<exp>` shorthand (`1e9`).
pub fn parse_u128(s: &str) -> Option<u128> {
    let s = s.trim();
    match s.split_once(['e', 'E']) {
        Some((m, e)) => m.parse::<u128>().ok()?.checked_mul(10u128.checked_pow(e.parse().ok()?)?),
        None => s.parse().ok(),
    }
}

impl SpaceConfig {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut entries = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got {raw:?}", no + 1)))?;
            entries.push((k.trim().to_owned(), v.trim().to_owned()));
        }
        let find = |key: &str| entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());
        let name = find("space").ok_or_else(|| Error::Config("missing `space=`".into()))?;
        crate::mapstore::check_message_text(&name).map_err(|_| Error::Config(format!("bad space name {name:?}")))?;
        if name.contains(['/', '\\']) {
            return Err(Error::Config(format!("bad space name {name:?}")));
        }
        let kind = find("kind").map(|k| k.parse()).transpose()?.unwrap_or(SpaceKind::Uniform);
        Ok(SpaceConfig { name, kind, base_dir: base_dir.into(), entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    /// Replaces every `key=` entry with one `key=value`.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.retain(|(k, _)| k != key);
        self.entries.push((key.to_owned(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.entries.iter().filter(move |(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn number(&self, key: &str) -> Result<Option<u128>> {
        self.get(key)
            .map(|v| parse_u128(v).ok_or_else(|| Error::Config(format!("`{key}={v}` is not a number"))))
            .transpose()
    }

    fn date(&self, key: &str) -> Result<Option<NaiveDate>> {
        self.get(key)
            .map(|v| {
                NaiveDate::parse_from_str(v, "%Y-%m-%d").map_err(|_| Error::Config(format!("`{key}={v}` is not YYYY-MM-DD")))
            })
            .transpose()
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        self.base_dir.join(rel)
    }

    fn read_file(&self, key: &str) -> Result<Option<String>> {
        let Some(rel) = self.get(key) else { return Ok(None) };
        let path = self.resolve(rel);
        std::fs::read_to_string(&path)
            .map(Some)
            .map_err(|e| Error::Config(format!("`{key}`: cannot read {}: {e}", path.display())))
    }

    fn require_file(&self, key: &str) -> Result<String> {
        self.read_file(key)?.ok_or_else(|| Error::Config(format!("`{}` needs `{key}=`", self.name)))
    }

    fn expect_kind(&self, kind: SpaceKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Config(format!("`{}` is a {} space, not {kind}", self.name, self.kind)));
        }
        Ok(())
    }

    pub fn f_unit(&self) -> Result<usize> {
        match self.number("f_unit")? {
            None => Ok(DEFAULT_F_UNIT),
            Some(0) => Err(Error::Config("f_unit must be positive".into())),
            Some(n) => usize::try_from(n).map_err(|_| Error::Config("f_unit too large".into())),
        }
    }

    pub fn enumeration(&self) -> Result<Arc<dyn Enumeration>> {
        self.expect_kind(SpaceKind::Uniform)?;
        let mut entries = Vec::new();
        for v in self.get_all("prefix") {
            let (p, n) = v
                .split_once(',')
                .ok_or_else(|| Error::Config(format!("`prefix={v}`: expected <digits>,<suffix_len>")))?;
            let n: u32 = n.trim().parse().map_err(|_| Error::Config(format!("`prefix={v}`: bad suffix length")))?;
            entries.push(PrefixEntry::new(p.trim(), n));
        }
        match (entries.is_empty(), self.read_file("list")?) {
            (false, None) => Ok(Arc::new(PrefixTable::new(entries)?)),
            (true, Some(text)) => {
                let list = text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned).collect();
                Ok(Arc::new(MessageList::new(list)?))
            }
            (false, Some(_)) => Err(Error::Config("use either `prefix=` or `list=`, not both".into())),
            (true, None) => Err(Error::EmptySpace(self.name.clone())),
        }
    }

    pub fn uniform_space(&self) -> Result<UniformSpace<Arc<dyn Enumeration>>> {
        let e = self.enumeration()?;
        match self.number("seed_space")? {
            Some(s) => UniformSpace::with_seed_space(&self.name, e, s),
            None => UniformSpace::new(&self.name, e),
        }
    }

    pub fn id_space(&self) -> Result<IdNumberSpace> {
        self.expect_kind(SpaceKind::IdNumber)?;
        let mut regions: Vec<String> = self.get_all("region").map(str::to_owned).collect();
        if let Some(text) = self.read_file("regions")? {
            regions.extend(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_owned));
        }
        let d = BirthWindow::default();
        let window = BirthWindow::new(self.date("birth_from")?.unwrap_or(d.from), self.date("birth_to")?.unwrap_or(d.to))?;
        let bodies = IdBodySpace::new(regions, window)?;
        match self.number("seed_space")? {
            Some(s) => IdNumberSpace::with_seed_space(&self.name, bodies, s),
            None => IdNumberSpace::new(&self.name, bodies),
        }
    }

    pub fn incremental_params(&self) -> Result<IncrementalParams> {
        let d = IncrementalParams::default();
        let seed_block = match self.number("seed_block")? {
            Some(b) => usize::try_from(b).map_err(|_| Error::Config("seed_block too large".into()))?,
            None => d.seed_block,
        };
        Ok(IncrementalParams { seed_unit: self.number("seed_unit")?.unwrap_or(d.seed_unit), seed_block })
    }

    pub fn bootstrap_count(&self) -> Result<usize> {
        Ok(self.number("bootstrap")?.map(|n| n as usize).unwrap_or(DEFAULT_BOOTSTRAP))
    }

    /// The honey pool: `honey=<file>` wins, else a synthetic pool of
    /// `honey_synthetic` addresses (default 10000).
    pub fn honey_dataset<R: RngCore>(&self, rng: &mut R) -> Result<HoneyDataset> {
        self.expect_kind(SpaceKind::Email)?;
        if let Some(text) = self.read_file("honey")? {
            return HoneyDataset::parse(&text);
        }
        let n = self.number("honey_synthetic")?.unwrap_or(10_000) as usize;
        Ok(HoneyDataset::synthetic(n, rng))
    }

    pub fn firstname_corpus(&self) -> Result<FirstnameCorpus> {
        self.expect_kind(SpaceKind::Firstname)?;
        let levels = [
            FirstnameCorpus::parse_level(&self.require_file("level1")?)?,
            FirstnameCorpus::parse_level(&self.require_file("level2")?)?,
            FirstnameCorpus::parse_level(&self.require_file("level3")?)?,
        ];
        let familiar = self.read_file("familiar")?.map(|t| FirstnameCorpus::parse_familiar(&t)).unwrap_or_default();
        FirstnameCorpus::new(levels, familiar)
    }

    pub fn weight_model(&self) -> Result<WeightModel> {
        let mut m = WeightModel::default();
        if let Some(u) = self.number("seed_unit")? {
            m.seed_unit = u;
        }
        Ok(m)
    }

    pub fn surname_table(&self) -> Result<SurnameTable> {
        self.expect_kind(SpaceKind::Lastname)?;
        SurnameTable::parse(&self.require_file("surnames")?)
    }

    pub fn seed_initial(&self) -> Result<u128> {
        Ok(self.number("seed_initial")?.unwrap_or(SURNAME_SEED_INITIAL))
    }
}

/// Result of materializing one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildSummary {
    pub space: String,
    pub kind: SpaceKind,
    pub lines: u64,
    pub chunks: usize,
    pub total_end: u128,
}

impl fmt::Display for BuildSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}): {} lines in {} chunk(s), total_end={}",
            self.space, self.kind, self.lines, self.chunks, self.total_end
        )
    }
}

/// Writes the mapping files for `cfg` into `storage`. Email spaces are
/// created and bootstrapped with honey addresses.
pub fn build_space<R: RngCore + CryptoRng>(cfg: &SpaceConfig, storage: Arc<dyn Storage>, rng: &mut R) -> Result<BuildSummary> {
    let f_unit = cfg.f_unit()?;
    let store = match cfg.kind {
        SpaceKind::Uniform => cfg.uniform_space()?.build_mapfiles(storage, &cfg.name, f_unit)?,
        SpaceKind::IdNumber => cfg.id_space()?.build_mapfiles(storage, &cfg.name, f_unit)?,
        SpaceKind::Firstname => build_firstname(storage, &cfg.name, &cfg.firstname_corpus()?, &cfg.weight_model()?, f_unit)?,
        SpaceKind::Lastname => build_lastname(storage, &cfg.name, &cfg.surname_table()?, cfg.seed_initial()?, f_unit)?,
        SpaceKind::Email => {
            let honey = cfg.honey_dataset(rng)?;
            let store = ChunkedMapStore::open_or_create(storage.clone(), &cfg.name, f_unit)?;
            let space = EmailSpace::new(store, cfg.incremental_params()?, honey)?;
            space.bootstrap(cfg.bootstrap_count()?, rng)?;
            ChunkedMapStore::open(storage, &cfg.name)?
        }
    };
    let snap = store.snapshot();
    Ok(BuildSummary {
        space: cfg.name.clone(),
        kind: cfg.kind,
        lines: snap.line_count,
        chunks: snap.chunk_count(),
        total_end: snap.total_end,
    })
}
