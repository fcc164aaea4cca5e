//! Content-addressed completion cache.
//!
//! Entries live in a directory, one file per key, named by the hex digest
//! of (backend id, prompt, canonical decode params). Each file holds a
//! one-line JSON header followed by the raw completion text. Writes go
//! through a temp file and rename so a concurrent reader never sees a
//! partial entry.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{BackendError, DecodeParams};

/// Stable digest over the full completion request.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    digest: String,
}

impl CacheKey {
    pub fn compute(backend_id: &str, prompt: &str, params: &DecodeParams) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(backend_id.as_bytes());
        hasher.update([0]);
        hasher.update(prompt.as_bytes());
        hasher.update([0]);
        hasher.update(params.canonical().as_bytes());
        Self {
            digest: hex(&hasher.finalize()),
        }
    }

    /// Digest of a bare prompt; the mock scripting key.
    pub fn prompt_digest(prompt: &str) -> String {
        let mut hasher = Sha256::new();
        hasher.update(prompt.as_bytes());
        hex(&hasher.finalize())
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }
}

fn hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryHeader {
    backend_id: String,
    params: DecodeParams,
    unix_time: u64,
}

/// Directory-backed cache store.
pub struct CacheStore {
    dir: PathBuf,
    tmp_seq: AtomicU64,
}

impl CacheStore {
    pub fn open(dir: &Path) -> Result<Self, BackendError> {
        fs::create_dir_all(dir)
            .map_err(|e| BackendError::CacheIo(format!("create {dir:?}: {e}")))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            tmp_seq: AtomicU64::new(0),
        })
    }

    fn entry_path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.digest())
    }

    pub fn get(&self, key: &CacheKey) -> Result<Option<String>, BackendError> {
        let path = self.entry_path(key);
        let raw = match fs::read_to_string(&path) {
            Ok(raw) => raw,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(BackendError::CacheIo(format!("read {path:?}: {e}"))),
        };
        let Some((header, text)) = raw.split_once('\n') else {
            return Err(BackendError::CacheIo(format!("{path:?}: missing header line")));
        };
        serde_json::from_str::<EntryHeader>(header)
            .map_err(|e| BackendError::CacheIo(format!("{path:?}: bad header: {e}")))?;
        Ok(Some(text.to_string()))
    }

    pub fn put(
        &self,
        key: &CacheKey,
        backend_id: &str,
        params: &DecodeParams,
        text: &str,
    ) -> Result<(), BackendError> {
        let header = EntryHeader {
            backend_id: backend_id.to_string(),
            params: params.clone(),
            unix_time: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let mut body = serde_json::to_string(&header)
            .map_err(|e| BackendError::CacheIo(e.to_string()))?;
        body.push('\n');
        body.push_str(text);

        let seq = self.tmp_seq.fetch_add(1, Ordering::Relaxed);
        let tmp = self
            .dir
            .join(format!(".tmp-{}-{seq}-{}", std::process::id(), key.digest()));
        fs::write(&tmp, body).map_err(|e| BackendError::CacheIo(format!("write {tmp:?}: {e}")))?;
        fs::rename(&tmp, self.entry_path(key))
            .map_err(|e| BackendError::CacheIo(format!("rename {tmp:?}: {e}")))?;
        Ok(())
    }

    pub fn len(&self) -> Result<usize, BackendError> {
        let mut n = 0usize;
        let entries = fs::read_dir(&self.dir)
            .map_err(|e| BackendError::CacheIo(format!("read_dir {:?}: {e}", self.dir)))?;
        for entry in entries {
            let entry = entry.map_err(|e| BackendError::CacheIo(e.to_string()))?;
            if !entry.file_name().to_string_lossy().starts_with(".tmp-") {
                n += 1;
            }
        }
        Ok(n)
    }

    pub fn is_empty(&self) -> Result<bool, BackendError> {
        Ok(self.len()? == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{BackendRegistry, MockBackend, RetryPolicy};
    use std::sync::Arc;

    fn setup(dir: &Path) -> (BackendRegistry, crate::backend::mock::CallCounter, CacheStore) {
        let mock = MockBackend::new("m");
        mock.script_exact("p", "completion");
        mock.script_exact("q", "other");
        let counter = mock.call_counter();
        let mut reg = BackendRegistry::new().with_retry(RetryPolicy::immediate(3));
        reg.register(Arc::new(mock));
        (reg, counter, CacheStore::open(dir).unwrap())
    }

    #[test]
    fn second_identical_call_hits_cache() {
        let dir = tempfile::tempdir().unwrap();
        let (reg, counter, cache) = setup(dir.path());
        let first = reg
            .cached_complete("m", "p", &DecodeParams::greedy(), &cache)
            .unwrap();
        assert!(!first.cached);
        let second = reg
            .cached_complete("m", "p", &DecodeParams::greedy(), &cache)
            .unwrap();
        assert!(second.cached);
        assert_eq!(second.text, first.text);
        assert_eq!(counter.count(), 1);
    }

    #[test]
    fn differing_params_use_distinct_entries() {
        let a = CacheKey::compute("m", "p", &DecodeParams::greedy());
        let mut warm = DecodeParams::greedy();
        warm.max_output_tokens = 128;
        let b = CacheKey::compute("m", "p", &warm);
        assert_ne!(a.digest(), b.digest());
        let c = CacheKey::compute("m2", "p", &DecodeParams::greedy());
        assert_ne!(a.digest(), c.digest());
        let d = CacheKey::compute("m", "p2", &DecodeParams::greedy());
        assert_ne!(a.digest(), d.digest());
    }

    #[test]
    fn sampled_calls_bypass_the_cache() {
        let dir = tempfile::tempdir().unwrap();
        let (reg, counter, cache) = setup(dir.path());
        let params = DecodeParams::sampling();
        reg.cached_complete("m", "p", &params, &cache).unwrap();
        reg.cached_complete("m", "p", &params, &cache).unwrap();
        assert_eq!(counter.count(), 2);
        assert!(cache.is_empty().unwrap());
    }

    #[test]
    fn cache_soundness_matches_direct_completion() {
        let dir = tempfile::tempdir().unwrap();
        let (reg, _counter, cache) = setup(dir.path());
        for prompt in ["p", "q"] {
            let direct = reg.complete("m", prompt, &DecodeParams::greedy()).unwrap();
            let via_cache = reg
                .cached_complete("m", prompt, &DecodeParams::greedy(), &cache)
                .unwrap();
            assert_eq!(direct.text, via_cache.text);
            let warm = reg
                .cached_complete("m", prompt, &DecodeParams::greedy(), &cache)
                .unwrap();
            assert_eq!(warm.text, direct.text);
        }
    }

    #[test]
    fn entries_survive_reopen() {
        let dir = tempfile::tempdir().unwrap();
        {
            let (reg, _c, cache) = setup(dir.path());
            reg.cached_complete("m", "p", &DecodeParams::greedy(), &cache)
                .unwrap();
        }
        // fresh registry with an unscripted mock: a cache hit means no provider call
        let mock = MockBackend::new("m");
        let counter = mock.call_counter();
        let mut reg = BackendRegistry::new();
        reg.register(Arc::new(mock));
        let cache = CacheStore::open(dir.path()).unwrap();
        let resp = reg
            .cached_complete("m", "p", &DecodeParams::greedy(), &cache)
            .unwrap();
        assert!(resp.cached);
        assert_eq!(resp.text, "completion");
        assert_eq!(counter.count(), 0);
    }

    #[test]
    fn no_digest_collisions_over_distinct_inputs() {
        let mut seen = std::collections::HashSet::new();
        for backend in ["m1", "m2"] {
            for prompt_idx in 0..50 {
                for max_tokens in [64u32, 4096] {
                    for temperature in [0.0, 1.0] {
                        let params = DecodeParams {
                            temperature,
                            max_output_tokens: max_tokens,
                            stop_sequences: Vec::new(),
                        };
                        let key = CacheKey::compute(
                            backend,
                            &format!("prompt number {prompt_idx}"),
                            &params,
                        );
                        assert!(seen.insert(key.digest().to_string()));
                    }
                }
            }
        }
        assert_eq!(seen.len(), 2 * 50 * 2 * 2);
    }

    #[test]
    fn digest_is_stable_and_hex_shaped() {
        let key = CacheKey::compute("m", "prompt", &DecodeParams::greedy());
        assert_eq!(key.digest().len(), 64);
        assert!(key.digest().chars().all(|c| c.is_ascii_hexdigit()));
        let again = CacheKey::compute("m", "prompt", &DecodeParams::greedy());
        assert_eq!(key.digest(), again.digest());
    }
}
