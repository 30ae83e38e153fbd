//! Bundle cache keyed by the SHA-256 of the canonical scenario text and the
//! artifact version.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::bundle::{ReportBundle, ARTIFACT_VERSION};
use crate::error::{CliError, Result};
use crate::scenario::Scenario;

pub const CACHE_ENV: &str = "ALEMASS_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct Cache {
    pub dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$ALEMASS_CACHE_DIR`, else `$XDG_CACHE_HOME/alemass`, else
    /// `~/.cache/alemass`, else `.alemass-cache`.
    pub fn from_env() -> Self {
        if let Some(d) = std::env::var_os(CACHE_ENV) {
            return Self::new(d);
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
            return Self::new(Path::new(&d).join("alemass"));
        }
        if let Some(h) = std::env::var_os("HOME") {
            return Self::new(Path::new(&h).join(".cache").join("alemass"));
        }
        Self::new(".alemass-cache")
    }

    pub fn key(s: &Scenario) -> String {
        let mut h = Sha256::new();
        h.update(ARTIFACT_VERSION.as_bytes());
        h.update(b"\n");
        h.update(s.canonical().as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A corrupt or mismatched entry is treated as a miss.
    pub fn load(&self, key: &str) -> Result<Option<ReportBundle>> {
        let path = self.path(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(CliError::io(path, e)),
        };
        Ok(serde_json::from_slice::<ReportBundle>(&bytes)
            .ok()
            .filter(|b| b.provenance.cache_key == key))
    }

    /// Write to a temporary file in the cache directory, then rename.
    pub fn store(&self, key: &str, bundle: &ReportBundle) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let json = serde_json::to_vec_pretty(bundle).expect("bundle serialises");
        let mut tmp =
            tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        tmp.write_all(&json)
            .map_err(|e| CliError::io(tmp.path(), e))?;
        let path = self.path(key);
        tmp.persist(&path)
            .map_err(|e| CliError::io(path, e.error))?;
        Ok(())
    }
}
