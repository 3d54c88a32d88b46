pub mod branch;
pub mod gauss;
pub mod growth;
pub mod interp;
pub mod theorem;

use std::path::Path;

use anyhow::{Context, Result};
use bfzeta::theorem::ClassFixture;

use crate::config::FileConfig;
use crate::Common;

pub const BUNDLED_FIXTURES: &str = include_str!("../../data/fixtures.json");
pub const EXAMPLE_INSTANCE: &str = include_str!("../../data/example_instance.json");

pub struct Env {
    pub file: FileConfig,
    pub json: bool,
}

impl Env {
    pub fn p(&self, c: &Common) -> Result<u64> {
        c.p.or(self.file.p).ok_or_else(|| missing("--p"))
    }

    pub fn k(&self, c: &Common) -> Result<i64> {
        c.k.or(self.file.k).ok_or_else(|| missing("--k"))
    }

    pub fn n(&self, c: &Common, default: u32) -> u32 {
        crate::config::pick(c.n, self.file.n, default)
    }

    pub fn prec(&self, c: &Common, default: u32) -> u32 {
        crate::config::pick(c.prec, self.file.prec, default)
    }

    pub fn trunc(&self, c: &Common, default: usize) -> usize {
        crate::config::pick(c.trunc, self.file.trunc, default)
    }

    pub fn seed(&self, c: &Common) -> u64 {
        crate::config::pick(c.seed, self.file.seed, 0)
    }

    /// Bundled fixtures, overridden entry by entry by the user's file.
    pub fn fixtures(&self, c: &Common) -> Result<Vec<ClassFixture>> {
        let mut all = parse_fixtures(BUNDLED_FIXTURES).context("bundled fixtures")?;
        if let Some(path) = c.fixtures.as_ref().or(self.file.fixtures.as_ref()) {
            all.extend(read_fixtures(path)?);
        }
        Ok(all)
    }
}

fn missing(flag: &str) -> anyhow::Error {
    bfzeta::Error::Schema(format!("{} is required (flag or config file)", flag)).into()
}

pub fn parse_fixtures(text: &str) -> Result<Vec<ClassFixture>> {
    serde_json::from_str(text).map_err(|e| bfzeta::Error::Schema(format!("fixtures: {}", e)).into())
}

fn read_fixtures(path: &Path) -> Result<Vec<ClassFixture>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading fixtures {}", path.display()))?;
    parse_fixtures(&text).with_context(|| format!("in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_files_parse() {
        let fx = parse_fixtures(BUNDLED_FIXTURES).unwrap();
        assert!(fx.iter().any(|f| f.p == 37 && f.class_type == [1]));
        bfzeta::bf::schema::parse_instance(EXAMPLE_INSTANCE).unwrap();
    }
}
