use std::path::Path;
use std::sync::Arc;

use rand::rngs::OsRng;
use seiguard_core::{build_space, BuildSummary, DirStorage, SpaceConfig};

use crate::error::Result;

/// Builds the mapping files of one space config into `out`.
pub fn build_maps(space_config: &Path, out: &Path) -> Result<BuildSummary> {
    let cfg = SpaceConfig::load(space_config)?;
    let storage = Arc::new(DirStorage::new(out)?);
    Ok(build_space(&cfg, storage, &mut OsRng)?)
}
