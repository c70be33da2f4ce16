//! Run configuration: a flat TOML file mirroring the flags, overridden by flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

pub const CACHE_ENV: &str = "BRYLINSKI_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

/// Keys accepted in the config file; every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<String>,
    pub rank: Option<usize>,
    pub n: Option<u32>,
    pub q: Option<u32>,
    pub t: Option<u32>,
    pub cutoff: Option<u32>,
    pub k: Option<String>,
    pub weight: Option<String>,
    pub basis: Option<String>,
    pub format: Option<Format>,
    pub cache_dir: Option<PathBuf>,
    pub max_dim: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// `flag`, else the config value, else the default.
pub fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>, default: Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone()).or(default)
}

/// Cache directory: flag, environment, config file, then `$HOME/.cache/brylinski`.
pub fn cache_dir(flag: &Option<PathBuf>, file: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone()
        .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| file.clone())
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("brylinski")))
}
