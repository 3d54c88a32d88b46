//! Optional on-disk copy of the Bernoulli table, kept in the directory
//! named by `BFZETA_CACHE_DIR`.

use std::path::PathBuf;
use std::str::FromStr;

use bfzeta::lfunction::bernoulli::{cached_even, seed_cache};
use bfzeta::lfunction::Rational;

pub const CACHE_ENV: &str = "BFZETA_CACHE_DIR";
const FILE: &str = "bernoulli-even.json";

fn path() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(|d| PathBuf::from(d).join(FILE))
}

/// Seed the in-memory table; returns the number of entries loaded. A
/// missing or corrupt file is ignored with a warning.
pub fn load() -> usize {
    let Some(path) = path() else { return 0 };
    let Ok(text) = std::fs::read_to_string(&path) else { return 0 };
    let parsed: Result<Vec<Rational>, String> = serde_json::from_str::<Vec<String>>(&text)
        .map_err(|e| e.to_string())
        .and_then(|v| v.iter().map(|s| Rational::from_str(s).map_err(|e| e.to_string())).collect());
    match parsed.map(seed_cache) {
        Ok(Ok(n)) => n,
        Ok(Err(e)) => {
            eprintln!("warning: ignoring {}: {}", path.display(), e);
            0
        }
        Err(e) => {
            eprintln!("warning: ignoring {}: {}", path.display(), e);
            0
        }
    }
}

/// Write the table back if it grew past `loaded` entries.
pub fn store(loaded: usize) {
    let Some(path) = path() else { return };
    let table = cached_even();
    if table.len() <= loaded {
        return;
    }
    let text: Vec<String> = table.iter().map(|b| b.to_string()).collect();
    let write = || -> std::io::Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string(&text)?)?;
        std::fs::rename(&tmp, &path)
    };
    if let Err(e) = write() {
        eprintln!("warning: could not write {}: {}", path.display(), e);
    }
}
