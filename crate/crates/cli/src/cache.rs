//! Content-addressed store for W-algebra generators.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use brylinski_core::cartan::RootSystem;
use brylinski_core::walg::{choose_generators, WGenerators, WGeneratorsJson};
use brylinski_core::{Error, Result};

pub fn entry_path(dir: &Path, rs: &RootSystem, cutoff: u32) -> PathBuf {
    dir.join(format!("wgens-{}.json", WGenerators::cache_key(rs.family, rs.rank, cutoff)))
}

fn load(path: &Path, rs: &RootSystem, cutoff: u32) -> Option<WGenerators> {
    let text = std::fs::read_to_string(path).ok()?;
    let json: WGeneratorsJson = serde_json::from_str(&text).ok()?;
    let g = WGenerators::from_json(&json).ok()?;
    (g.family == rs.family && g.rank == rs.rank && g.cutoff == cutoff).then_some(g)
}

/// Loads the generators from `dir` or computes and stores them. Unreadable or
/// mismatched entries are recomputed and overwritten.
pub fn generators(rs: Arc<RootSystem>, cutoff: u32, dir: Option<&Path>) -> Result<WGenerators> {
    let top = *rs.degrees.iter().max().expect("rank >= 1");
    let cutoff = cutoff.max(top);
    let Some(dir) = dir else {
        return choose_generators(rs, cutoff);
    };
    let path = entry_path(dir, &rs, cutoff);
    if let Some(g) = load(&path, &rs, cutoff) {
        return Ok(g);
    }
    let g = choose_generators(rs, cutoff)?;
    std::fs::create_dir_all(dir)?;
    let text = serde_json::to_string_pretty(&g.to_json()).map_err(Error::Json)?;
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, &path)?;
    Ok(g)
}
