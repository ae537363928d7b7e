//! Chunked mapping files.
//!
//! A message space is persisted as a sequence of small text files
//! `<space><i>.txt`, each holding at most `f_unit` lines of the form
//! `message,cum_end[,block_size]`. `cum_end` is the exclusive upper bound of
//! the message's seed block and is strictly increasing across the whole
//! space. A sidecar `<space>.idx` records `f_unit,total_end,chunk_count`
//! followed by the final `cum_end` of each chunk, which lets a seed be
//! located with a binary search over chunks followed by a binary search
//! within one chunk.
//!
//! Readers work on immutable [`IndexSnapshot`]s. Appends write the chunk
//! data first and publish the new index afterwards, so a reader never sees
//! an index that points past data it cannot load.

use std::collections::HashMap;
use std::fmt;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use lru::LruCache;

use crate::error::{Error, Result};

pub const DEFAULT_F_UNIT: usize = 100_000;
pub const DEFAULT_CACHE_CHUNKS: usize = 8;

/// Byte-level backing for chunk and index files.
pub trait Storage: Send + Sync + fmt::Debug {
    fn read(&self, name: &str) -> io::Result<Option<Vec<u8>>>;
    /// Replaces `name` atomically.
    fn write(&self, name: &str, data: &[u8]) -> io::Result<()>;
    fn append(&self, name: &str, data: &[u8]) -> io::Result<()>;
}

/// Files in a directory.
#[derive(Debug, Clone)]
pub struct DirStorage {
    root: PathBuf,
}

impl DirStorage {
    pub fn new(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(DirStorage { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

impl Storage for DirStorage {
    fn read(&self, name: &str) -> io::Result<Option<Vec<u8>>> {
        match fs::read(self.root.join(name)) {
            Ok(data) => Ok(Some(data)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn write(&self, name: &str, data: &[u8]) -> io::Result<()> {
        let target = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        fs::write(&tmp, data)?;
        fs::rename(tmp, target)
    }

    fn append(&self, name: &str, data: &[u8]) -> io::Result<()> {
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.root.join(name))?;
        f.write_all(data)
    }
}

/// In-memory storage, used by tests and the browser demo.
#[derive(Debug, Default)]
pub struct MemStorage {
    files: RwLock<HashMap<String, Vec<u8>>>,
}

impl MemStorage {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every stored file, sorted by name.
    pub fn dump(&self) -> Vec<(String, Vec<u8>)> {
        let files = self.files.read().unwrap();
        let mut out: Vec<_> = files.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        out.sort();
        out
    }
}

impl Storage for MemStorage {
    fn read(&self, name: &str) -> io::Result<Option<Vec<u8>>> {
        Ok(self.files.read().unwrap().get(name).cloned())
    }

    fn write(&self, name: &str, data: &[u8]) -> io::Result<()> {
        self.files.write().unwrap().insert(name.to_owned(), data.to_vec());
        Ok(())
    }

    fn append(&self, name: &str, data: &[u8]) -> io::Result<()> {
        self.files
            .write()
            .unwrap()
            .entry(name.to_owned())
            .or_default()
            .extend_from_slice(data);
        Ok(())
    }
}

/// One line of a mapping file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapLine {
    pub message: String,
    pub cum_end: u128,
    pub block_size: Option<u128>,
}

impl MapLine {
    pub fn new(message: impl Into<String>, cum_end: u128) -> Self {
        MapLine { message: message.into(), cum_end, block_size: None }
    }

    pub fn with_block(message: impl Into<String>, cum_end: u128, block_size: u128) -> Self {
        MapLine { message: message.into(), cum_end, block_size: Some(block_size) }
    }

    pub fn parse(line: &str) -> Result<MapLine> {
        let mut fields = line.split(',');
        let message = fields.next().unwrap_or_default();
        let cum_end = fields
            .next()
            .and_then(|f| f.parse::<u128>().ok())
            .ok_or_else(|| Error::Corrupt(format!("bad mapping line {line:?}")))?;
        let block_size = match fields.next() {
            Some(f) => Some(
                f.parse::<u128>()
                    .map_err(|_| Error::Corrupt(format!("bad block size in {line:?}")))?,
            ),
            None => None,
        };
        if fields.next().is_some() || message.is_empty() {
            return Err(Error::Corrupt(format!("bad mapping line {line:?}")));
        }
        Ok(MapLine { message: message.to_owned(), cum_end, block_size })
    }

    pub fn write_to(&self, out: &mut String) {
        use std::fmt::Write as _;
        out.push_str(&self.message);
        let _ = write!(out, ",{}", self.cum_end);
        if let Some(b) = self.block_size {
            let _ = write!(out, ",{b}");
        }
        out.push('\n');
    }
}

/// Rejects messages that would break the line format.
pub fn check_message_text(message: &str) -> Result<()> {
    if message.is_empty() || message.contains([',', '\n', '\r']) {
        return Err(Error::invalid(format!("message {message:?} cannot be stored in a mapping file")));
    }
    Ok(())
}

/// Running validation of the strict `cum_end` ordering.
struct OrderCheck {
    previous: u128,
    index: u64,
}

impl OrderCheck {
    fn new(previous: u128, index: u64) -> Self {
        OrderCheck { previous, index }
    }

    fn check(&mut self, line: &MapLine) -> Result<()> {
        check_message_text(&line.message)?;
        if line.cum_end <= self.previous {
            return Err(Error::NonMonotone { index: self.index, previous: self.previous, found: line.cum_end });
        }
        if let Some(b) = line.block_size {
            let expected = line.cum_end - self.previous;
            if b != expected {
                return Err(Error::BlockSizeMismatch { index: self.index, expected, found: b });
            }
        }
        self.previous = line.cum_end;
        self.index += 1;
        Ok(())
    }
}

/// Immutable view of a store's index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSnapshot {
    pub f_unit: usize,
    /// Final `cum_end` of each chunk.
    pub chunk_ends: Vec<u128>,
    pub total_end: u128,
    pub line_count: u64,
}

impl IndexSnapshot {
    fn empty(f_unit: usize) -> Self {
        IndexSnapshot { f_unit, chunk_ends: Vec::new(), total_end: 0, line_count: 0 }
    }

    pub fn chunk_count(&self) -> usize {
        self.chunk_ends.len()
    }

    /// Number of lines chunk `i` holds under this snapshot.
    pub fn chunk_len(&self, i: usize) -> usize {
        let n = self.chunk_ends.len();
        if i + 1 < n {
            self.f_unit
        } else if i + 1 == n {
            (self.line_count - (n as u64 - 1) * self.f_unit as u64) as usize
        } else {
            0
        }
    }

    fn to_text(&self) -> String {
        let mut s = format!("{},{},{}\n", self.f_unit, self.total_end, self.chunk_ends.len());
        for e in &self.chunk_ends {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }

    fn parse_header(text: &str) -> Result<(usize, u128, Vec<u128>)> {
        let bad = |what: &str| Error::Corrupt(format!("index sidecar: {what}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        let parts: Vec<&str> = header.split(',').collect();
        if parts.len() != 3 {
            return Err(bad("header must be f_unit,total_end,chunk_count"));
        }
        let f_unit: usize = parts[0].parse().map_err(|_| bad("f_unit"))?;
        let total_end: u128 = parts[1].parse().map_err(|_| bad("total_end"))?;
        let count: usize = parts[2].parse().map_err(|_| bad("chunk_count"))?;
        if f_unit == 0 {
            return Err(bad("f_unit is zero"));
        }
        let ends = lines
            .take(count)
            .map(|l| l.trim().parse::<u128>().map_err(|_| bad("chunk end")))
            .collect::<Result<Vec<_>>>()?;
        if ends.len() != count {
            return Err(bad("fewer chunk ends than chunk_count"));
        }
        if ends.windows(2).any(|w| w[0] >= w[1]) || ends.last().copied().unwrap_or(0) != total_end {
            return Err(bad("chunk ends inconsistent"));
        }
        Ok((f_unit, total_end, ends))
    }
}

/// A located mapping line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    pub chunk: usize,
    /// 1-based line number within the chunk.
    pub line_no: usize,
    /// 0-based position within the whole space.
    pub position: u64,
    pub line: MapLine,
}

/// Converts a global 0-based position to `(chunk, 1-based line)`.
pub fn position_to_address(position: u64, f_unit: usize) -> (usize, usize) {
    let f = f_unit as u64;
    ((position / f) as usize, (position % f) as usize + 1)
}

/// Access counters for instrumentation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AccessStats {
    /// Chunk files read from storage (cache misses).
    pub chunk_loads: u64,
    /// Key comparisons made by binary searches.
    pub probes: u64,
}

type Chunk = Arc<Vec<MapLine>>;

pub struct ChunkedMapStore {
    name: String,
    storage: Arc<dyn Storage>,
    index: RwLock<Arc<IndexSnapshot>>,
    cache: Mutex<LruCache<usize, Chunk>>,
    writer: Mutex<()>,
    chunk_loads: AtomicU64,
    probes: AtomicU64,
}

impl fmt::Debug for ChunkedMapStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChunkedMapStore")
            .field("name", &self.name)
            .field("index", &self.snapshot())
            .finish()
    }
}

impl ChunkedMapStore {
    pub fn chunk_file_name(space: &str, i: usize) -> String {
        format!("{space}{i}.txt")
    }

    pub fn index_file_name(space: &str) -> String {
        format!("{space}.idx")
    }

    fn with_index(name: &str, storage: Arc<dyn Storage>, index: IndexSnapshot, cache_chunks: usize) -> Self {
        let cap = NonZeroUsize::new(cache_chunks.max(1)).unwrap();
        ChunkedMapStore {
            name: name.to_owned(),
            storage,
            index: RwLock::new(Arc::new(index)),
            cache: Mutex::new(LruCache::new(cap)),
            writer: Mutex::new(()),
            chunk_loads: AtomicU64::new(0),
            probes: AtomicU64::new(0),
        }
    }

    /// Streams `lines` into chunk files of at most `f_unit` lines and writes
    /// the index sidecar. Lines must have strictly increasing `cum_end`.
    pub fn write_chunks<I>(storage: Arc<dyn Storage>, name: &str, lines: I, f_unit: usize) -> Result<Self>
    where
        I: IntoIterator<Item = MapLine>,
    {
        if f_unit == 0 {
            return Err(Error::Config("f_unit must be positive".into()));
        }
        let mut order = OrderCheck::new(0, 0);
        let mut index = IndexSnapshot::empty(f_unit);
        let mut buf = String::new();
        let mut in_chunk = 0usize;
        let mut last_end = 0u128;
        for line in lines {
            order.check(&line)?;
            line.write_to(&mut buf);
            last_end = line.cum_end;
            in_chunk += 1;
            index.line_count += 1;
            if in_chunk == f_unit {
                let i = index.chunk_ends.len();
                storage.write(&Self::chunk_file_name(name, i), buf.as_bytes())?;
                index.chunk_ends.push(last_end);
                buf.clear();
                in_chunk = 0;
            }
        }
        if in_chunk > 0 {
            let i = index.chunk_ends.len();
            storage.write(&Self::chunk_file_name(name, i), buf.as_bytes())?;
            index.chunk_ends.push(last_end);
        }
        index.total_end = last_end;
        storage.write(&Self::index_file_name(name), index.to_text().as_bytes())?;
        Ok(Self::with_index(name, storage, index, DEFAULT_CACHE_CHUNKS))
    }

    /// Creates an empty store (zero chunks, `total_end = 0`).
    pub fn create_empty(storage: Arc<dyn Storage>, name: &str, f_unit: usize) -> Result<Self> {
        Self::write_chunks(storage, name, std::iter::empty(), f_unit)
    }

    /// Opens a store from its sidecar, recovering lines that were appended
    /// to chunk files but not yet recorded in the index.
    pub fn open(storage: Arc<dyn Storage>, name: &str) -> Result<Self> {
        let raw = storage
            .read(&Self::index_file_name(name))?
            .ok_or_else(|| Error::Config(format!("mapping store `{name}` not found")))?;
        let text = String::from_utf8(raw).map_err(|_| Error::Corrupt("index is not UTF-8".into()))?;
        let (f_unit, total_end, chunk_ends) = IndexSnapshot::parse_header(&text)?;
        let mut index = IndexSnapshot { f_unit, chunk_ends, total_end, line_count: 0 };

        let mut repaired = false;
        if let Some(last) = index.chunk_ends.len().checked_sub(1) {
            let lines = load_chunk(storage.as_ref(), name, last)?;
            let indexed = lines
                .iter()
                .position(|l| l.cum_end == index.total_end)
                .ok_or_else(|| Error::Corrupt(format!("chunk {last} does not end at total_end")))?
                + 1;
            index.line_count = last as u64 * f_unit as u64 + indexed as u64;
            if lines.len() > indexed {
                repaired = true;
            }
        }
        // Scan for unindexed tail lines in the last chunk and any chunk files
        // created after it.
        let mut next_chunk = index.chunk_ends.len().saturating_sub(1);
        let mut order = OrderCheck::new(index.total_end, index.line_count);
        loop {
            let Some(raw) = storage.read(&Self::chunk_file_name(name, next_chunk))? else { break };
            let text = String::from_utf8(raw).map_err(|_| Error::Corrupt("chunk is not UTF-8".into()))?;
            let lines: Vec<MapLine> = text.lines().map(MapLine::parse).collect::<Result<_>>()?;
            let skip = if next_chunk < index.chunk_ends.len() { index.chunk_len(next_chunk) } else { 0 };
            if lines.len() > f_unit || (lines.len() == skip && next_chunk >= index.chunk_ends.len()) {
                return Err(Error::Corrupt(format!("chunk {next_chunk} has unexpected length")));
            }
            if lines.len() > skip {
                for line in &lines[skip..] {
                    order.check(line)?;
                }
                repaired = true;
                index.line_count += (lines.len() - skip) as u64;
                let end = lines.last().unwrap().cum_end;
                if next_chunk < index.chunk_ends.len() {
                    index.chunk_ends[next_chunk] = end;
                } else {
                    index.chunk_ends.push(end);
                }
                index.total_end = end;
            }
            if lines.len() < f_unit {
                break;
            }
            next_chunk += 1;
        }
        if repaired {
            storage.write(&Self::index_file_name(name), index.to_text().as_bytes())?;
        }
        Ok(Self::with_index(name, storage, index, DEFAULT_CACHE_CHUNKS))
    }

    /// Opens the store if its sidecar exists, otherwise creates it empty.
    pub fn open_or_create(storage: Arc<dyn Storage>, name: &str, f_unit: usize) -> Result<Self> {
        if storage.read(&Self::index_file_name(name))?.is_some() {
            Self::open(storage, name)
        } else {
            Self::create_empty(storage, name, f_unit)
        }
    }

    /// Replaces the chunk cache with one holding `chunks` entries.
    pub fn set_cache_size(&self, chunks: usize) {
        let cap = NonZeroUsize::new(chunks.max(1)).unwrap();
        *self.cache.lock().unwrap() = LruCache::new(cap);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn storage(&self) -> &Arc<dyn Storage> {
        &self.storage
    }

    pub fn snapshot(&self) -> Arc<IndexSnapshot> {
        self.index.read().unwrap().clone()
    }

    pub fn total_end(&self) -> u128 {
        self.snapshot().total_end
    }

    pub fn line_count(&self) -> u64 {
        self.snapshot().line_count
    }

    pub fn f_unit(&self) -> usize {
        self.snapshot().f_unit
    }

    pub fn access_stats(&self) -> AccessStats {
        AccessStats {
            chunk_loads: self.chunk_loads.load(Ordering::Relaxed),
            probes: self.probes.load(Ordering::Relaxed),
        }
    }

    pub fn reset_access_stats(&self) {
        self.chunk_loads.store(0, Ordering::Relaxed);
        self.probes.store(0, Ordering::Relaxed);
    }

    fn chunk(&self, snap: &IndexSnapshot, i: usize) -> Result<Chunk> {
        let expected = snap.chunk_len(i);
        if expected == 0 {
            return Err(Error::Corrupt(format!("chunk {i} of `{}` does not exist", self.name)));
        }
        if let Some(c) = self.cache.lock().unwrap().get(&i) {
            if c.len() >= expected {
                return Ok(c.clone());
            }
        }
        self.chunk_loads.fetch_add(1, Ordering::Relaxed);
        let lines = load_chunk(self.storage.as_ref(), &self.name, i)?;
        if lines.len() < expected {
            return Err(Error::Corrupt(format!(
                "chunk {i} of `{}` has {} lines, index expects {expected}",
                self.name,
                lines.len()
            )));
        }
        let chunk = Arc::new(lines);
        let mut cache = self.cache.lock().unwrap();
        let newer = cache.peek(&i).is_some_and(|c| c.len() > chunk.len());
        if !newer {
            cache.put(i, chunk.clone());
        }
        Ok(chunk)
    }

    /// Finds the line whose block contains `seed`.
    pub fn locate_by_seed(&self, seed: u128) -> Result<Located> {
        let snap = self.snapshot();
        self.locate_in(&snap, seed)
    }

    /// [`locate_by_seed`](Self::locate_by_seed) against a fixed snapshot.
    pub fn locate_in(&self, snap: &IndexSnapshot, seed: u128) -> Result<Located> {
        if seed >= snap.total_end {
            return Err(Error::SeedOutOfRange { seed, total_end: snap.total_end });
        }
        let mut probes = 0u64;
        let chunk_i = snap.chunk_ends.partition_point(|&e| {
            probes += 1;
            e <= seed
        });
        let chunk = self.chunk(snap, chunk_i)?;
        let len = snap.chunk_len(chunk_i);
        let idx = chunk[..len].partition_point(|l| {
            probes += 1;
            l.cum_end <= seed
        });
        self.probes.fetch_add(probes, Ordering::Relaxed);
        let line = chunk
            .get(idx)
            .filter(|_| idx < len)
            .ok_or_else(|| Error::Corrupt(format!("chunk {chunk_i} does not cover seed {seed}")))?;
        Ok(Located {
            chunk: chunk_i,
            line_no: idx + 1,
            position: chunk_i as u64 * snap.f_unit as u64 + idx as u64,
            line: line.clone(),
        })
    }

    /// Fetches line `line_no` (1-based) of chunk `chunk`.
    pub fn read_line(&self, chunk: usize, line_no: usize) -> Result<MapLine> {
        let snap = self.snapshot();
        if line_no == 0 || line_no > snap.chunk_len(chunk) {
            return Err(Error::Corrupt(format!("`{}` has no line {line_no} in chunk {chunk}", self.name)));
        }
        Ok(self.chunk(&snap, chunk)?[line_no - 1].clone())
    }

    /// Fetches the line at a 0-based global position.
    pub fn read_position(&self, position: u64) -> Result<MapLine> {
        let (chunk, line_no) = position_to_address(position, self.f_unit());
        self.read_line(chunk, line_no)
    }

    /// Binary search for `message` among the first `sorted_prefix` lines,
    /// which must be sorted by message.
    pub fn find_message(&self, message: &str, sorted_prefix: u64) -> Result<Option<Located>> {
        let snap = self.snapshot();
        let limit = sorted_prefix.min(snap.line_count);
        if limit == 0 {
            return Ok(None);
        }
        let f = snap.f_unit as u64;
        let chunks = limit.div_ceil(f) as usize;
        let mut probes = 0u64;
        // Last chunk whose first message is <= `message`.
        let (mut lo, mut hi) = (0usize, chunks);
        while lo < hi {
            let mid = (lo + hi) / 2;
            probes += 1;
            if self.chunk(&snap, mid)?[0].message.as_str() <= message {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if lo == 0 {
            self.probes.fetch_add(probes, Ordering::Relaxed);
            return Ok(None);
        }
        let chunk_i = lo - 1;
        let chunk = self.chunk(&snap, chunk_i)?;
        let in_range = ((limit - chunk_i as u64 * f) as usize).min(chunk.len());
        let found = chunk[..in_range].binary_search_by(|l| {
            probes += 1;
            l.message.as_str().cmp(message)
        });
        self.probes.fetch_add(probes, Ordering::Relaxed);
        Ok(found.ok().map(|idx| Located {
            chunk: chunk_i,
            line_no: idx + 1,
            position: chunk_i as u64 * f + idx as u64,
            line: chunk[idx].clone(),
        }))
    }

    /// Appends lines that continue the `cum_end` ordering. The last chunk is
    /// filled up to `f_unit` lines before a new chunk is started. On an
    /// ordering violation nothing is written.
    pub fn append_block(&self, lines: &[MapLine]) -> Result<Arc<IndexSnapshot>> {
        let _guard = self.writer.lock().unwrap();
        let old = self.snapshot();
        let mut order = OrderCheck::new(old.total_end, old.line_count);
        for l in lines {
            order.check(l)?;
        }
        if lines.is_empty() {
            return Ok(old);
        }
        let f_unit = old.f_unit;
        let mut index = (*old).clone();
        // Group the new lines by target chunk.
        let mut groups: Vec<(usize, &[MapLine])> = Vec::new();
        let mut rest = lines;
        let mut pos = old.line_count;
        while !rest.is_empty() {
            let (chunk, line_no) = position_to_address(pos, f_unit);
            let room = f_unit - (line_no - 1);
            let take = room.min(rest.len());
            groups.push((chunk, &rest[..take]));
            rest = &rest[take..];
            pos += take as u64;
        }
        for (chunk, group) in &groups {
            let mut buf = String::new();
            for l in *group {
                l.write_to(&mut buf);
            }
            self.storage.append(&Self::chunk_file_name(&self.name, *chunk), buf.as_bytes())?;
            let end = group.last().unwrap().cum_end;
            if *chunk < index.chunk_ends.len() {
                index.chunk_ends[*chunk] = end;
            } else {
                index.chunk_ends.push(end);
            }
        }
        index.line_count = pos;
        index.total_end = lines.last().unwrap().cum_end;
        {
            let mut cache = self.cache.lock().unwrap();
            for (chunk, group) in &groups {
                if let Some(c) = cache.pop(chunk) {
                    // Grow in place unless a reader still holds the chunk.
                    let mut grown = Arc::try_unwrap(c).unwrap_or_else(|c| (*c).clone());
                    grown.truncate(old.chunk_len(*chunk));
                    grown.extend(group.iter().cloned());
                    cache.put(*chunk, Arc::new(grown));
                }
            }
        }
        self.storage.write(&Self::index_file_name(&self.name), index.to_text().as_bytes())?;
        let index = Arc::new(index);
        *self.index.write().unwrap() = index.clone();
        Ok(index)
    }

    /// Every line in order. Test and tooling helper; loads all chunks.
    pub fn all_lines(&self) -> Result<Vec<MapLine>> {
        let snap = self.snapshot();
        let mut out = Vec::with_capacity(snap.line_count as usize);
        for i in 0..snap.chunk_count() {
            let len = snap.chunk_len(i);
            let lines = load_chunk(self.storage.as_ref(), &self.name, i)?;
            if lines.len() < len {
                return Err(Error::Corrupt(format!("chunk {i} is short")));
            }
            out.extend(lines.into_iter().take(len));
        }
        Ok(out)
    }

    /// Line count of every chunk file on storage.
    pub fn chunk_sizes(&self) -> Result<Vec<usize>> {
        let snap = self.snapshot();
        (0..snap.chunk_count())
            .map(|i| load_chunk(self.storage.as_ref(), &self.name, i).map(|l| l.len()))
            .collect()
    }
}

fn load_chunk(storage: &dyn Storage, name: &str, i: usize) -> Result<Vec<MapLine>> {
    let file = ChunkedMapStore::chunk_file_name(name, i);
    let raw = storage
        .read(&file)?
        .ok_or_else(|| Error::Corrupt(format!("missing chunk file {file}")))?;
    let text = String::from_utf8(raw).map_err(|_| Error::Corrupt(format!("{file} is not UTF-8")))?;
    text.lines().map(MapLine::parse).collect()
}
