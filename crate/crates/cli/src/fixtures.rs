//! Shipped example configurations.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::parse;

/// Directory of the fixtures shipped with the crate.
pub fn default_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))
}

/// One fixture: its name (file stem), experiment kind and description, or the
/// validation error.
#[derive(Clone, Debug, PartialEq)]
pub struct FixtureEntry {
    pub name: String,
    pub path: PathBuf,
    pub outcome: Result<(String, String), String>,
}

impl FixtureEntry {
    pub fn line(&self) -> String {
        match &self.outcome {
            Ok((kind, desc)) if desc.is_empty() => format!("  {:<32} {kind}", self.name),
            Ok((kind, desc)) => format!("  {:<32} {:<17} {desc}", self.name, kind),
            Err(msg) => format!("! {:<32} INVALID: {msg}", self.name),
        }
    }
}

/// Every `*.json` in `dir`, sorted by name, each validated.
pub fn list(dir: &Path) -> std::io::Result<Vec<FixtureEntry>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|path| {
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let outcome = match fs::read_to_string(&path) {
                Ok(text) => parse(&text, &[])
                    .map(|e| (e.kind().name().to_string(), e.description().to_string()))
                    .map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            };
            FixtureEntry { name, path, outcome }
        })
        .collect())
}
