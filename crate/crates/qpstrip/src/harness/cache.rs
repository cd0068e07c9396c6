use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::tasks::Computed;
use crate::error::{Error, Result};

/// Cached payload plus wall-clock metadata (kept out of the result record).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheEnvelope {
    pub key: String,
    pub code_version: String,
    pub created_unix_ms: u128,
    pub elapsed_ms: u128,
    pub computed: Computed,
}

impl CacheEnvelope {
    pub fn new(key: &str, computed: Computed, elapsed_ms: u128) -> Self {
        let created_unix_ms = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
        Self { key: key.to_string(), code_version: super::CODE_VERSION.to_string(), created_unix_ms, elapsed_ms, computed }
    }
}

/// Directory of `<hash>.json` envelopes written atomically.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        std::fs::create_dir_all(dir.as_ref())?;
        Ok(Self { dir: dir.as_ref().to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Result<Option<CacheEnvelope>> {
        let p = self.path(key);
        if !p.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(p)?;
        let env: CacheEnvelope = serde_json::from_str(&text)?;
        Ok((env.key == key).then_some(env))
    }

    pub fn put(&self, env: &CacheEnvelope) -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(env)?.as_bytes())?;
        tmp.flush()?;
        tmp.persist(self.path(&env.key)).map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }
}
