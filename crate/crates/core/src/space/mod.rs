//! Message-space codecs.

pub mod email;
pub mod idnum;
pub mod name;
pub mod uniform;

pub use email::{EmailSpace, HoneyDataset, IncrementalParams};
pub use idnum::{BirthWindow, IdBodySpace, IdNumberSpace};
pub use name::{FirstnameCorpus, NamePart, NameSeeds, NameSpace, SurnameTable, WeightModel};
pub use uniform::{Enumeration, MessageList, PrefixEntry, PrefixTable, UniformSpace};

use crate::error::{Error, Result};
use crate::keycrypt::Seed;
use crate::mapstore::{ChunkedMapStore, MapLine};
use crate::SEED_SPACE;

/// Appends `messages` with `unit` seeds each, continuing from the store's
/// assigned total. Returns the total before the append.
pub(crate) fn append_messages<'a>(
    store: &ChunkedMapStore,
    messages: impl IntoIterator<Item = &'a str>,
    unit: u128,
    record_block: bool,
) -> Result<u128> {
    let start = store.total_end();
    let mut end = start;
    let mut lines = Vec::new();
    for m in messages {
        end += unit;
        lines.push(if record_block { MapLine::with_block(m, end, unit) } else { MapLine::new(m, end) });
    }
    if end > SEED_SPACE {
        return Err(Error::Capacity(format!("`{}` would need {end} seeds", store.name())));
    }
    store.append_block(&lines)?;
    Ok(start)
}

/// Reduces `seed` modulo the assigned total of one consistent snapshot and
/// returns the message owning it.
pub(crate) fn decode_modulo(store: &ChunkedMapStore, seed: Seed) -> Result<String> {
    let snap = store.snapshot();
    if snap.total_end == 0 {
        return Err(Error::EmptySpace(store.name().to_owned()));
    }
    let reduced = seed.0 as u128 % snap.total_end;
    Ok(store.locate_in(&snap, reduced)?.line.message)
}
