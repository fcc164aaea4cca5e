//! Scripted mock provider for offline runs and tests.
//!
//! Scripts map exact prompt digests to completions; optional fallback rules
//! match on a substring of the prompt, first match wins in insertion order.
//! Every provider call lands in a transcript so tests can assert call
//! counts and replay prompts.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{Backend, BackendError, CacheKey, DecodeParams};

/// One recorded provider call.
#[derive(Debug, Clone)]
pub struct MockCall {
    pub prompt: String,
    pub params: DecodeParams,
    pub ok: bool,
}

/// Shared view over the mock's call count.
#[derive(Clone)]
pub struct CallCounter {
    calls: Arc<Mutex<Vec<MockCall>>>,
}

impl CallCounter {
    pub fn count(&self) -> usize {
        self.calls.lock().unwrap().len()
    }

    pub fn calls(&self) -> Vec<MockCall> {
        self.calls.lock().unwrap().clone()
    }
}

/// One scripting rule in the on-disk mock script format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockRule {
    /// Exact full prompt text to match.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    /// Exact prompt digest (hex) to match; useful when the prompt is long.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
    /// Fallback substring match, applied in file order after exact rules.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substring: Option<String>,
    pub completion: String,
}

struct Failure {
    substring: String,
    remaining: u32,
    transient: bool,
}

struct InflightDecrement<'a>(&'a AtomicU32);

impl Drop for InflightDecrement<'_> {
    fn drop(&mut self) {
        self.0.fetch_sub(1, Ordering::SeqCst);
    }
}

#[derive(Default)]
struct MockState {
    exact: HashMap<String, String>,
    substrings: Vec<(String, String)>,
    failures: Vec<Failure>,
}

pub struct MockBackend {
    id: String,
    state: Mutex<MockState>,
    calls: Arc<Mutex<Vec<MockCall>>>,
    work_factor: AtomicU32,
    inflight: AtomicU32,
    max_inflight: AtomicU32,
}

impl MockBackend {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            state: Mutex::new(MockState::default()),
            calls: Arc::new(Mutex::new(Vec::new())),
            work_factor: AtomicU32::new(0),
            inflight: AtomicU32::new(0),
            max_inflight: AtomicU32::new(0),
        }
    }

    /// Highest number of concurrent in-flight calls observed so far.
    pub fn max_inflight(&self) -> u32 {
        self.max_inflight.load(Ordering::Relaxed)
    }

    /// Makes each call burn `iterations` rounds of hashing, simulating
    /// provider-side latency as CPU work. Used by benches.
    pub fn set_work_factor(&self, iterations: u32) {
        self.work_factor.store(iterations, Ordering::Relaxed);
    }

    /// Scripts an exact-prompt completion (keyed internally by digest).
    pub fn script_exact(&self, prompt: &str, completion: &str) {
        let digest = CacheKey::prompt_digest(prompt);
        self.state
            .lock()
            .unwrap()
            .exact
            .insert(digest, completion.to_string());
    }

    /// Scripts a completion keyed by a precomputed prompt digest.
    pub fn script_digest(&self, digest: &str, completion: &str) {
        self.state
            .lock()
            .unwrap()
            .exact
            .insert(digest.to_string(), completion.to_string());
    }

    /// Fallback rule: any prompt containing `needle` gets `completion`.
    /// Rules are tried in insertion order after the exact table.
    pub fn script_substring(&self, needle: &str, completion: &str) {
        self.state
            .lock()
            .unwrap()
            .substrings
            .push((needle.to_string(), completion.to_string()));
    }

    /// Injects `n` failures for prompts containing `needle` (empty matches
    /// everything). Transient failures are retryable.
    pub fn fail_next(&self, needle: &str, n: u32, transient: bool) {
        self.state.lock().unwrap().failures.push(Failure {
            substring: needle.to_string(),
            remaining: n,
            transient,
        });
    }

    pub fn load_rules(&self, rules: &[MockRule]) {
        for rule in rules {
            if let Some(exact) = &rule.exact {
                self.script_exact(exact, &rule.completion);
            }
            if let Some(digest) = &rule.digest {
                self.script_digest(digest, &rule.completion);
            }
            if let Some(substring) = &rule.substring {
                self.script_substring(substring, &rule.completion);
            }
        }
    }

    /// Loads a JSONL script file of [`MockRule`]s.
    pub fn load_script(&self, path: &Path) -> Result<usize, BackendError> {
        let file =
            File::open(path).map_err(|e| BackendError::CacheIo(format!("{path:?}: {e}")))?;
        let mut n = 0usize;
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| BackendError::CacheIo(format!("{path:?}: {e}")))?;
            if line.trim().is_empty() {
                continue;
            }
            let rule: MockRule = serde_json::from_str(&line).map_err(|e| {
                BackendError::CacheIo(format!("{path:?} line {}: {e}", idx + 1))
            })?;
            self.load_rules(std::slice::from_ref(&rule));
            n += 1;
        }
        Ok(n)
    }

    pub fn call_counter(&self) -> CallCounter {
        CallCounter {
            calls: Arc::clone(&self.calls),
        }
    }

    /// True when at least one rule is loaded.
    pub fn has_rules(&self) -> bool {
        let state = self.state.lock().unwrap();
        !state.exact.is_empty() || !state.substrings.is_empty()
    }

    fn lookup(&self, prompt: &str) -> Option<String> {
        let state = self.state.lock().unwrap();
        let digest = CacheKey::prompt_digest(prompt);
        if let Some(completion) = state.exact.get(&digest) {
            return Some(completion.clone());
        }
        state
            .substrings
            .iter()
            .find(|(needle, _)| prompt.contains(needle))
            .map(|(_, completion)| completion.clone())
    }
}

impl Backend for MockBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, prompt: &str, params: &DecodeParams) -> Result<String, BackendError> {
        let now = self.inflight.fetch_add(1, Ordering::SeqCst) + 1;
        self.max_inflight.fetch_max(now, Ordering::SeqCst);
        let _inflight = InflightDecrement(&self.inflight);
        let work = self.work_factor.load(Ordering::Relaxed);
        if work > 0 {
            let mut digest = CacheKey::prompt_digest(prompt);
            for _ in 0..work {
                digest = CacheKey::prompt_digest(&digest);
            }
            std::hint::black_box(&digest);
        }
        // consume a pending injected failure first
        {
            let mut state = self.state.lock().unwrap();
            if let Some(failure) = state
                .failures
                .iter_mut()
                .find(|f| f.remaining > 0 && prompt.contains(&f.substring))
            {
                failure.remaining -= 1;
                let transient = failure.transient;
                drop(state);
                self.calls.lock().unwrap().push(MockCall {
                    prompt: prompt.to_string(),
                    params: params.clone(),
                    ok: false,
                });
                return Err(BackendError::Provider {
                    status: None,
                    message: "injected mock failure".into(),
                    transient,
                });
            }
        }
        let result = self.lookup(prompt);
        self.calls.lock().unwrap().push(MockCall {
            prompt: prompt.to_string(),
            params: params.clone(),
            ok: result.is_some(),
        });
        result.ok_or_else(|| BackendError::MissingScript {
            digest: CacheKey::prompt_digest(prompt),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rules_win_over_substrings() {
        let mock = MockBackend::new("m");
        mock.script_substring("hello", "fallback");
        mock.script_exact("hello world", "exact");
        assert_eq!(
            mock.complete("hello world", &DecodeParams::greedy()).unwrap(),
            "exact"
        );
        assert_eq!(
            mock.complete("hello there", &DecodeParams::greedy()).unwrap(),
            "fallback"
        );
    }

    #[test]
    fn substring_rules_apply_in_insertion_order() {
        let mock = MockBackend::new("m");
        mock.script_substring("alpha beta", "specific");
        mock.script_substring("alpha", "general");
        assert_eq!(
            mock.complete("x alpha beta y", &DecodeParams::greedy()).unwrap(),
            "specific"
        );
        assert_eq!(
            mock.complete("x alpha y", &DecodeParams::greedy()).unwrap(),
            "general"
        );
    }

    #[test]
    fn transcript_records_every_call() {
        let mock = MockBackend::new("m");
        mock.script_exact("p", "c");
        let counter = mock.call_counter();
        mock.complete("p", &DecodeParams::greedy()).unwrap();
        let _ = mock.complete("unscripted", &DecodeParams::greedy());
        let calls = counter.calls();
        assert_eq!(calls.len(), 2);
        assert!(calls[0].ok);
        assert!(!calls[1].ok);
    }

    #[test]
    fn script_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rules.jsonl");
        let rules = vec![
            MockRule {
                exact: Some("p1".into()),
                digest: None,
                substring: None,
                completion: "c1".into(),
            },
            MockRule {
                exact: None,
                digest: None,
                substring: Some("needle".into()),
                completion: "c2".into(),
            },
        ];
        let mut text = String::new();
        for r in &rules {
            text.push_str(&serde_json::to_string(r).unwrap());
            text.push('\n');
        }
        std::fs::write(&path, text).unwrap();
        let mock = MockBackend::new("m");
        assert_eq!(mock.load_script(&path).unwrap(), 2);
        assert_eq!(mock.complete("p1", &DecodeParams::greedy()).unwrap(), "c1");
        assert_eq!(
            mock.complete("has needle inside", &DecodeParams::greedy()).unwrap(),
            "c2"
        );
    }
}
