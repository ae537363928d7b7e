//! Two-part DTE for Chinese personal names.
//!
//! Firstnames and surnames are encoded independently, each in its own seed
//! space. The firstname main part is every 1- and 2-character combination
//! over three character levels, weighted by the product of per-character
//! level weights, with very familiar firstnames overridden to a top weight.
//! The surname main part follows a surname frequency table. Names outside
//! either main part are appended incrementally with the smallest block size.
//!
//! Weights are exact: a level weight of `10^-k` becomes a block of
//! `seed_unit / 10^k` seeds, never a float.

use std::collections::HashSet;
use std::sync::{Arc, Mutex};

use rand::{CryptoRng, Rng, RngCore};

use crate::error::{Error, Result};
use crate::keycrypt::Seed;
use crate::mapstore::{ChunkedMapStore, MapLine, Storage};
use crate::space::{append_messages, decode_modulo};
use crate::SEED_SPACE;

pub const FIRSTNAME_SEED_UNIT: u128 = 1_000_000_000;
pub const SURNAME_SEED_INITIAL: u128 = 1_000_000_000;
/// Block size of incrementally added rare names; equals the rarest
/// main-part combination (`10^-8 * 10^9`).
pub const MIN_SEED_UNIT: u128 = 10;

/// Decimal exponents of the firstname weights: levels 1-3 and the familiar
/// override.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightModel {
    pub level_exponents: [u32; 3],
    pub familiar_exponent: u32,
    pub seed_unit: u128,
}

impl Default for WeightModel {
    /// `w11 = 1`, `w12 = 0.01`, `w13 = 0.0001`, `w14 = 10000`.
    fn default() -> Self {
        WeightModel { level_exponents: [0, 2, 4], familiar_exponent: 4, seed_unit: FIRSTNAME_SEED_UNIT }
    }
}

impl WeightModel {
    /// Block size for a message whose characters sit at `levels` (0-based).
    fn product_block(&self, levels: &[usize]) -> Result<u128> {
        let down: u32 = levels.iter().map(|&l| self.level_exponents[l]).sum();
        let div = 10u128.pow(down);
        if !self.seed_unit.is_multiple_of(div) {
            return Err(Error::Config(format!("seed_unit {} not divisible by 10^{down}", self.seed_unit)));
        }
        Ok(self.seed_unit / div)
    }

    fn familiar_block(&self) -> u128 {
        self.seed_unit * 10u128.pow(self.familiar_exponent)
    }
}

fn check_name_text(s: &str, what: &str, max_chars: usize) -> Result<()> {
    let n = s.chars().count();
    if n == 0 || n > max_chars || s.chars().any(|c| c.is_whitespace() || c.is_control() || c == ',') {
        return Err(Error::invalid(format!("the {what} is not valid")));
    }
    Ok(())
}

/// Level character tables plus the familiar-firstname list.
#[derive(Debug, Clone)]
pub struct FirstnameCorpus {
    levels: [Vec<char>; 3],
    familiar: Vec<String>,
}

impl FirstnameCorpus {
    pub fn new(levels: [Vec<char>; 3], familiar: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for level in &levels {
            for &c in level {
                if c.is_whitespace() || c.is_control() || c == ',' {
                    return Err(Error::Config(format!("character {c:?} cannot appear in a name")));
                }
                if !seen.insert(c) {
                    return Err(Error::OverlappingLevels(c));
                }
            }
        }
        if seen.is_empty() {
            return Err(Error::EmptySpace("firstname".into()));
        }
        Ok(FirstnameCorpus { levels, familiar })
    }

    /// One character per line.
    pub fn parse_level(text: &str) -> Result<Vec<char>> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                let mut it = l.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => Ok(c),
                    _ => Err(Error::Config(format!("level table line {l:?} is not one character"))),
                }
            })
            .collect()
    }

    /// One firstname per line.
    pub fn parse_familiar(text: &str) -> Vec<String> {
        text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned).collect()
    }

    pub fn levels(&self) -> &[Vec<char>; 3] {
        &self.levels
    }

    /// Number of main-part messages: `n + n^2`.
    pub fn message_count(&self) -> u128 {
        let n = self.levels.iter().map(Vec::len).sum::<usize>() as u128;
        n + n * n
    }

    /// All 1- and 2-character firstnames in code-point order, with block
    /// sizes.
    pub fn weighted_messages(&self, model: &WeightModel) -> Result<impl Iterator<Item = (String, u128)> + '_> {
        let mut chars: Vec<(char, usize)> = self
            .levels
            .iter()
            .enumerate()
            .flat_map(|(l, cs)| cs.iter().map(move |&c| (c, l)))
            .collect();
        chars.sort_unstable();
        // Precompute the (at most 6) product blocks.
        let mut blocks = [[0u128; 3]; 3];
        let mut single = [0u128; 3];
        for a in 0..3 {
            single[a] = model.product_block(&[a])?;
            for b in 0..3 {
                blocks[a][b] = model.product_block(&[a, b])?;
            }
        }
        let familiar: HashSet<&str> = self.familiar.iter().map(String::as_str).collect();
        let top = model.familiar_block();
        let inner = chars.clone();
        Ok(chars
            .into_iter()
            .flat_map(move |(c1, l1)| {
                let first = std::iter::once((c1.to_string(), single[l1]));
                let pairs = inner.clone().into_iter().map(move |(c2, l2)| {
                    let mut s = String::with_capacity(8);
                    s.push(c1);
                    s.push(c2);
                    (s, blocks[l1][l2])
                });
                first.chain(pairs)
            })
            .map(move |(m, b)| if familiar.contains(m.as_str()) { (m, top) } else { (m, b) }))
    }
}

/// `(surname, frequency)` pairs.
#[derive(Debug, Clone)]
pub struct SurnameTable {
    entries: Vec<(String, f64)>,
}

impl SurnameTable {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptySpace("lastname".into()));
        }
        let mut seen = HashSet::new();
        for (s, f) in &entries {
            check_name_text(s, "lastname", 4).map_err(|_| Error::Config(format!("surname {s:?}")))?;
            if !(f.is_finite() && *f > 0.0) {
                return Err(Error::Config(format!("surname {s:?} has frequency {f}")));
            }
            if !seen.insert(s.as_str()) {
                return Err(Error::Config(format!("surname {s:?} listed twice")));
            }
        }
        Ok(SurnameTable { entries })
    }

    /// `surname,frequency` per line.
    pub fn parse(text: &str) -> Result<Self> {
        let entries = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                let (s, f) = l
                    .split_once(',')
                    .ok_or_else(|| Error::Config(format!("surname line {l:?} lacks a frequency")))?;
                let f: f64 = f.trim().parse().map_err(|_| Error::Config(format!("bad frequency in {l:?}")))?;
                Ok((s.trim().to_owned(), f))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    /// Integer blocks in code-point order. Frequencies are rescaled to sum
    /// to one and the rounding residual goes to the last surname, so the
    /// blocks sum to exactly `seed_initial`.
    pub fn blocks(&self, seed_initial: u128) -> Result<Vec<(String, u128)>> {
        let mut sorted = self.entries.clone();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let sum: f64 = sorted.iter().map(|e| e.1).sum();
        let mut out = Vec::with_capacity(sorted.len());
        let mut assigned = 0u128;
        let n = sorted.len();
        for (i, (s, f)) in sorted.into_iter().enumerate() {
            let b = if i + 1 == n {
                seed_initial.saturating_sub(assigned)
            } else {
                (f / sum * seed_initial as f64).round() as u128
            };
            if b == 0 {
                return Err(Error::Config(format!("surname {s:?} rounds to an empty block")));
            }
            assigned += b;
            out.push((s, b));
        }
        Ok(out)
    }
}

fn write_main_meta(storage: &dyn Storage, name: &str, store: &ChunkedMapStore) -> Result<()> {
    let snap = store.snapshot();
    storage.write(&format!("{name}.main"), format!("{},{}\n", snap.line_count, snap.total_end).as_bytes())?;
    Ok(())
}

fn weighted_lines(items: impl Iterator<Item = (String, u128)>) -> impl Iterator<Item = MapLine> {
    items.scan(0u128, |end, (m, b)| {
        *end += b;
        Some(MapLine::with_block(m, *end, b))
    })
}

/// Writes the firstname main-part mapping files.
pub fn build_firstname(
    storage: Arc<dyn Storage>,
    name: &str,
    corpus: &FirstnameCorpus,
    model: &WeightModel,
    f_unit: usize,
) -> Result<ChunkedMapStore> {
    let store = ChunkedMapStore::write_chunks(storage.clone(), name, weighted_lines(corpus.weighted_messages(model)?), f_unit)?;
    if store.total_end() > SEED_SPACE {
        return Err(Error::Capacity(format!("firstname space needs {} seeds", store.total_end())));
    }
    write_main_meta(storage.as_ref(), name, &store)?;
    Ok(store)
}

/// Writes the surname main-part mapping file.
pub fn build_lastname(
    storage: Arc<dyn Storage>,
    name: &str,
    table: &SurnameTable,
    seed_initial: u128,
    f_unit: usize,
) -> Result<ChunkedMapStore> {
    if seed_initial == 0 || seed_initial > SEED_SPACE {
        return Err(Error::Config(format!("seed_initial {seed_initial} out of range")));
    }
    let store = ChunkedMapStore::write_chunks(storage.clone(), name, weighted_lines(table.blocks(seed_initial)?.into_iter()), f_unit)?;
    write_main_meta(storage.as_ref(), name, &store)?;
    Ok(store)
}

/// One half of a name: sorted main part plus incremental tail.
#[derive(Debug)]
pub struct NamePart {
    label: &'static str,
    store: ChunkedMapStore,
    main_lines: u64,
    min_seed_unit: u128,
    max_chars: usize,
    writer: Mutex<()>,
}

impl NamePart {
    fn open(storage: Arc<dyn Storage>, name: &str, label: &'static str, max_chars: usize, min_seed_unit: u128) -> Result<Self> {
        let meta = storage
            .read(&format!("{name}.main"))?
            .ok_or_else(|| Error::Config(format!("`{name}` has no main-part metadata; build it first")))?;
        let meta = String::from_utf8_lossy(&meta);
        let main_lines: u64 = meta
            .split(',')
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Corrupt(format!("{name}.main")))?;
        let store = ChunkedMapStore::open(storage, name)?;
        if store.line_count() < main_lines {
            return Err(Error::Corrupt(format!("`{name}` shorter than its main part")));
        }
        Ok(NamePart { label, store, main_lines, min_seed_unit, max_chars, writer: Mutex::new(()) })
    }

    /// Opens a built firstname store.
    pub fn open_firstname(storage: Arc<dyn Storage>, name: &str) -> Result<Self> {
        Self::open(storage, name, "firstname", 2, MIN_SEED_UNIT)
    }

    /// Opens a built surname store.
    pub fn open_lastname(storage: Arc<dyn Storage>, name: &str) -> Result<Self> {
        Self::open(storage, name, "lastname", 4, MIN_SEED_UNIT)
    }

    pub fn with_min_seed_unit(mut self, unit: u128) -> Self {
        self.min_seed_unit = unit.max(1);
        self
    }

    pub fn store(&self) -> &ChunkedMapStore {
        &self.store
    }

    pub fn main_lines(&self) -> u64 {
        self.main_lines
    }

    pub fn seed_num(&self) -> u128 {
        self.store.total_end()
    }

    pub fn validate(&self, message: &str) -> Result<()> {
        check_name_text(message, self.label, self.max_chars)
    }

    /// Main-part lookup by binary search.
    pub fn find_main(&self, message: &str) -> Result<Option<MapLine>> {
        Ok(self.store.find_message(message, self.main_lines)?.map(|l| l.line))
    }

    /// Samples a seed for `message`, appending an incremental block when it
    /// is not in the main part. Returns the seed and the assigned total.
    pub fn encode<R: RngCore + CryptoRng>(&self, message: &str, rng: &mut R) -> Result<(Seed, u128)> {
        self.validate(message)?;
        if let Some(line) = self.find_main(message)? {
            let size = line.block_size.ok_or_else(|| Error::Corrupt(format!("{message} has no block size")))?;
            let seed = rng.gen_range(line.cum_end - size..line.cum_end);
            return Ok((Seed(seed as u64), self.seed_num()));
        }
        let _w = self.writer.lock().unwrap();
        let start = append_messages(&self.store, [message], self.min_seed_unit, true)?;
        let seed = rng.gen_range(start..start + self.min_seed_unit);
        Ok((Seed(seed as u64), self.seed_num()))
    }

    pub fn decode(&self, seed: Seed) -> Result<String> {
        decode_modulo(&self.store, seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NameSeeds {
    pub f_seed: Seed,
    pub l_seed: Seed,
    pub f_seed_num: u128,
    pub l_seed_num: u128,
}

/// Firstname and surname halves.
#[derive(Debug)]
pub struct NameSpace {
    pub first: NamePart,
    pub last: NamePart,
}

impl NameSpace {
    pub fn encode_fullname<R: RngCore + CryptoRng>(&self, first: &str, last: &str, rng: &mut R) -> Result<NameSeeds> {
        self.first.validate(first)?;
        self.last.validate(last)?;
        let (f_seed, f_seed_num) = self.first.encode(first, rng)?;
        let (l_seed, l_seed_num) = self.last.encode(last, rng)?;
        Ok(NameSeeds { f_seed, l_seed, f_seed_num, l_seed_num })
    }

    /// Returns `(firstname, lastname)`.
    pub fn decode_fullname(&self, f_seed: Seed, l_seed: Seed) -> Result<(String, String)> {
        Ok((self.first.decode(f_seed)?, self.last.decode(l_seed)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapstore::MemStorage;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn corpus() -> FirstnameCorpus {
        FirstnameCorpus::new([vec!['大', '卫'], vec!['作'], vec!['广']], vec!["大卫".into(), "作广".into()]).unwrap()
    }

    fn block_of(lines: &[MapLine], m: &str) -> u128 {
        lines.iter().find(|l| l.message == m).unwrap().block_size.unwrap()
    }

    #[test]
    fn firstname_weights() {
        let st = build_firstname(Arc::new(MemStorage::new()), "firstname", &corpus(), &WeightModel::default(), 100_000)
            .unwrap();
        let lines = st.all_lines().unwrap();
        assert_eq!(lines.len(), 4 + 16);
        assert_eq!(block_of(&lines, "卫大"), 1_000_000_000);
        assert_eq!(block_of(&lines, "大广"), 100_000);
        assert_eq!(block_of(&lines, "卫作"), 10_000_000);
        assert_eq!(block_of(&lines, "广广"), 10);
        assert_eq!(block_of(&lines, "广"), 100_000);
        // Familiar override replaces, regardless of composition.
        assert_eq!(block_of(&lines, "大卫"), 10_000_000_000_000);
        assert_eq!(block_of(&lines, "作广"), 10_000_000_000_000);
        let sorted: Vec<&str> = lines.iter().map(|l| l.message.as_str()).collect();
        let mut expect = sorted.clone();
        expect.sort();
        assert_eq!(sorted, expect);
    }

    #[test]
    fn overlapping_levels_rejected() {
        let err = FirstnameCorpus::new([vec!['大'], vec!['大'], vec![]], vec![]).unwrap_err();
        assert!(matches!(err, Error::OverlappingLevels('大')));
    }

    #[test]
    fn parse_level_table() {
        assert_eq!(FirstnameCorpus::parse_level("大\n卫\n\n").unwrap(), vec!['大', '卫']);
        assert!(FirstnameCorpus::parse_level("大卫\n").is_err());
    }

    #[test]
    fn lastname_cum_ends() {
        let t = SurnameTable::new(vec![("李".into(), 0.75), ("王".into(), 0.25)]).unwrap();
        let st = build_lastname(Arc::new(MemStorage::new()), "lastname", &t, 100, 100_000).unwrap();
        let ends: Vec<u128> = st.all_lines().unwrap().iter().map(|l| l.cum_end).collect();
        assert_eq!(ends, vec![75, 100]);
    }

    #[test]
    fn single_surname_covers_all() {
        let t = SurnameTable::new(vec![("王".into(), 1.0)]).unwrap();
        assert_eq!(t.blocks(SURNAME_SEED_INITIAL).unwrap(), vec![("王".into(), SURNAME_SEED_INITIAL)]);
    }

    #[test]
    fn surname_rescaling_is_exact() {
        let t = SurnameTable::new(vec![("a".into(), 1.0), ("b".into(), 1.0), ("c".into(), 1.0)]).unwrap();
        let b = t.blocks(100).unwrap();
        assert_eq!(b.iter().map(|x| x.1).sum::<u128>(), 100);
        assert_eq!(b.iter().map(|x| x.1).collect::<Vec<_>>(), vec![33, 33, 34]);
    }

    #[test]
    fn bad_frequencies_rejected() {
        assert!(SurnameTable::new(vec![("王".into(), 0.0)]).is_err());
        assert!(SurnameTable::new(vec![("王".into(), -1.0)]).is_err());
        assert!(SurnameTable::parse("王\n").is_err());
        assert!(SurnameTable::parse("王,x\n").is_err());
    }

    fn names() -> NameSpace {
        let storage: Arc<dyn Storage> = Arc::new(MemStorage::new());
        build_firstname(storage.clone(), "firstname", &corpus(), &WeightModel::default(), 100_000).unwrap();
        let t = SurnameTable::new(vec![("李".into(), 0.75), ("王".into(), 0.25)]).unwrap();
        build_lastname(storage.clone(), "lastname", &t, SURNAME_SEED_INITIAL, 100_000).unwrap();
        NameSpace {
            first: NamePart::open_firstname(storage.clone(), "firstname").unwrap(),
            last: NamePart::open_lastname(storage, "lastname").unwrap(),
        }
    }

    #[test]
    fn main_part_encode_lands_in_block() {
        let ns = names();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let line = ns.first.find_main("作广").unwrap().unwrap();
        for _ in 0..100 {
            let s = ns.encode_fullname("作广", "王", &mut rng).unwrap();
            let f = s.f_seed.0 as u128;
            assert!(line.cum_end - line.block_size.unwrap() <= f && f < line.cum_end);
            assert_eq!(ns.decode_fullname(s.f_seed, s.l_seed).unwrap(), ("作广".into(), "王".into()));
        }
    }

    #[test]
    fn rare_name_appends_incremental_block() {
        let ns = names();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let before_f = ns.first.seed_num();
        let lines_before = ns.first.store().line_count();
        let s = ns.encode_fullname("龘", "欧阳", &mut rng).unwrap();
        assert!((before_f..before_f + MIN_SEED_UNIT).contains(&(s.f_seed.0 as u128)));
        assert_eq!(ns.first.store().line_count(), lines_before + 1);
        assert_eq!(s.f_seed_num, before_f + MIN_SEED_UNIT);
        assert_eq!(ns.decode_fullname(s.f_seed, s.l_seed).unwrap(), ("龘".into(), "欧阳".into()));
        // Still sorted main part is unaffected.
        assert!(ns.first.find_main("龘").unwrap().is_none());
    }

    #[test]
    fn name_validation() {
        let ns = names();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        assert!(ns.encode_fullname("大卫作", "王", &mut rng).is_err());
        assert!(ns.encode_fullname("", "王", &mut rng).is_err());
        assert!(ns.encode_fullname("大卫", "", &mut rng).is_err());
        assert!(ns.encode_fullname("大,", "王", &mut rng).is_err());
    }

    #[test]
    fn boundary_seed_gives_last_message() {
        let ns = names();
        let total = ns.last.seed_num();
        assert_eq!(ns.last.decode(Seed((total - 1) as u64)).unwrap(), "王");
    }
}
