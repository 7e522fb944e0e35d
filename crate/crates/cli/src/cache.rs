//! On-disk cache of command payloads keyed by a hash of (model, command, order, version).

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Bumped whenever a payload format changes; stale entries are recomputed.
pub const FORMAT_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+1");

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
    version: String,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into(), version: FORMAT_VERSION.to_string() }
    }

    /// Same directory, different version tag.
    #[cfg(test)]
    pub fn with_version(mut self, version: &str) -> Self {
        self.version = version.to_string();
        self
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(&self, model_fingerprint: &str, command: &str, order: u32) -> String {
        let mut h = Sha256::new();
        for part in [model_fingerprint, command, &order.to_string(), &self.version] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        format!("{:x}", h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Stored payload, or `None` when absent, unreadable or written by another version.
    pub fn load(&self, key: &str) -> Option<Value> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let entry: Value = serde_json::from_str(&text).ok()?;
        if entry["version"] != self.version.as_str() || entry["key"] != key {
            return None;
        }
        entry.get("payload").cloned()
    }

    pub fn store(&self, key: &str, payload: &Value) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = json!({ "key": key, "version": self.version, "payload": payload });
        let tmp = self.dir.join(format!("{key}.tmp"));
        fs::write(&tmp, entry.to_string())?;
        fs::rename(tmp, self.path(key))
    }
}

/// `--cache-dir`, else `LMSB_CACHE_DIR`, else a directory under the user cache root.
pub fn resolve_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os("LMSB_CACHE_DIR") {
        return PathBuf::from(p);
    }
    let root = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .unwrap_or_else(std::env::temp_dir);
    root.join("lmsb")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_invalidation() {
        let dir = std::env::temp_dir().join(format!("lmsb-cache-unit-{}", std::process::id()));
        let cache = Cache::new(&dir);
        let key = cache.key("p2", "yukawa", 12);
        let payload = json!({"(z,z;z)": "-1/(3*(1+27*z))"});
        cache.store(&key, &payload).unwrap();
        assert_eq!(cache.load(&key), Some(payload));
        let bumped = Cache::new(&dir).with_version("0.0.0+stale");
        assert_ne!(bumped.key("p2", "yukawa", 12), key);
        // An entry whose recorded version differs is ignored even under the same file name.
        let stale = Cache::new(&dir).with_version("other");
        assert_eq!(stale.load(&key), None);
        fs::write(dir.join(format!("{key}.json")), "{not json").unwrap();
        assert_eq!(cache.load(&key), None);
        fs::remove_dir_all(dir).unwrap();
    }
}
