use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

/// Optional defaults read from a TOML file. Command-line flags win.
///
/// ```toml
/// p = 37
/// k = 5
/// n = 1
/// prec = 12
/// trunc = 8
/// seed = 7
/// fixtures = "fixtures.json"
/// bound = 4096
/// ```
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<u64>,
    pub k: Option<i64>,
    pub n: Option<u32>,
    pub prec: Option<u32>,
    pub trunc: Option<usize>,
    pub seed: Option<u64>,
    pub fixtures: Option<PathBuf>,
    /// Largest Bernoulli index the interpolation may use.
    pub bound: Option<usize>,
    /// Brute-force enumeration cap for Gauss sums.
    pub enumeration_bound: Option<u128>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| bfzeta::Error::Schema(format!("config {}: {}", path.display(), e)))?;
        // relative fixture paths resolve against the config file
        if let (Some(f), Some(dir)) = (cfg.fixtures.as_mut(), path.parent()) {
            if f.is_relative() {
                *f = dir.join(&*f);
            }
        }
        Ok(cfg)
    }
}

/// Flag value, else config value, else default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        assert_eq!(pick(Some(3), Some(5), 7), 3);
        assert_eq!(pick(None, Some(5), 7), 5);
        assert_eq!(pick::<u32>(None, None, 7), 7);
    }

    #[test]
    fn unknown_keys_are_schema_errors() {
        let err = toml::from_str::<FileConfig>("q = 3").unwrap_err();
        assert!(err.to_string().contains("unknown field"));
        let ok: FileConfig = toml::from_str("p = 5\nk = 3").unwrap();
        assert_eq!((ok.p, ok.k), (Some(5), Some(3)));
    }
}
