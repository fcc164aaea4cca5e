//! Text-completion providers behind a uniform trait.
//!
//! Every provider is text-in/text-out. The registry adds bounded-retry
//! semantics and, through [`cache::CacheStore`], content-addressed caching
//! of greedy completions. Sampled completions (temperature > 0) are never
//! cached so run-to-run variance stays real.

pub mod cache;
pub mod http;
pub mod mock;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use cache::{CacheKey, CacheStore};
pub use http::HttpBackend;
pub use mock::MockBackend;

/// Decoding parameters for one completion call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeParams {
    pub temperature: f64,
    pub max_output_tokens: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stop_sequences: Vec<String>,
}

impl DecodeParams {
    /// Greedy decoding with the default output budget.
    pub fn greedy() -> Self {
        Self {
            temperature: 0.0,
            max_output_tokens: 4096,
            stop_sequences: Vec::new(),
        }
    }

    /// Sampling at temperature 1, as the judge runs.
    pub fn sampling() -> Self {
        Self {
            temperature: 1.0,
            ..Self::greedy()
        }
    }

    pub fn is_greedy(&self) -> bool {
        self.temperature == 0.0
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(BackendError::InvalidParams(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        if self.max_output_tokens == 0 {
            return Err(BackendError::InvalidParams(
                "max_output_tokens must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Canonical byte form used for cache keys: stable across runs and
    /// platforms for equal values.
    pub fn canonical(&self) -> String {
        let mut out = format!(
            "temperature={};max_output_tokens={}",
            self.temperature, self.max_output_tokens
        );
        for stop in &self.stop_sequences {
            out.push_str(";stop=");
            out.push_str(stop);
        }
        out
    }
}

impl Default for DecodeParams {
    fn default() -> Self {
        Self::greedy()
    }
}

/// A provider completion plus bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResponse {
    pub text: String,
    pub backend_id: String,
    pub cached: bool,
    pub latency_ms: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("unknown backend: {0}")]
    UnknownBackend(String),
    #[error("prompt is empty")]
    EmptyPrompt,
    #[error("invalid decode params: {0}")]
    InvalidParams(String),
    #[error("provider error{}: {message}", status.map(|s| format!(" (status {s})")).unwrap_or_default())]
    Provider {
        status: Option<u16>,
        message: String,
        transient: bool,
    },
    #[error("provider timed out after {0:?}")]
    Timeout(Duration),
    #[error("mock backend has no script for prompt digest {digest}")]
    MissingScript { digest: String },
    #[error("credential env var {0} is not set")]
    MissingCredential(String),
    #[error("cache io: {0}")]
    CacheIo(String),
}

impl BackendError {
    fn is_transient(&self) -> bool {
        match self {
            BackendError::Provider { transient, .. } => *transient,
            BackendError::Timeout(_) => true,
            _ => false,
        }
    }
}

/// A text-completion provider. Implementations must be safe to call from
/// multiple threads.
pub trait Backend: Send + Sync {
    fn id(&self) -> &str;
    fn complete(&self, prompt: &str, params: &DecodeParams) -> Result<String, BackendError>;
}

/// Bounded exponential backoff for transient provider failures.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    /// Total attempts per call, including the first.
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_delay: Duration::from_millis(100),
        }
    }
}

impl RetryPolicy {
    /// No waiting between attempts; used by tests.
    pub fn immediate(max_attempts: u32) -> Self {
        Self {
            max_attempts,
            base_delay: Duration::ZERO,
        }
    }
}

/// Counting semaphore bounding in-flight requests per backend.
struct Inflight {
    permits: std::sync::Mutex<usize>,
    available: std::sync::Condvar,
}

impl Inflight {
    fn new(limit: usize) -> Self {
        Self {
            permits: std::sync::Mutex::new(limit),
            available: std::sync::Condvar::new(),
        }
    }

    fn acquire(&self) -> InflightGuard<'_> {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.available.wait(permits).unwrap();
        }
        *permits -= 1;
        InflightGuard { inflight: self }
    }
}

struct InflightGuard<'a> {
    inflight: &'a Inflight,
}

impl Drop for InflightGuard<'_> {
    fn drop(&mut self) {
        *self.inflight.permits.lock().unwrap() += 1;
        self.inflight.available.notify_one();
    }
}

/// Registered providers keyed by id.
#[derive(Default)]
pub struct BackendRegistry {
    backends: BTreeMap<String, Arc<dyn Backend>>,
    retry: RetryPolicy,
    inflight: BTreeMap<String, Arc<Inflight>>,
}

impl BackendRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn register(&mut self, backend: Arc<dyn Backend>) {
        self.backends.insert(backend.id().to_string(), backend);
    }

    /// Caps concurrent requests to `backend_id` at `limit`. Callers past
    /// the limit block until a slot frees up.
    pub fn set_inflight_limit(&mut self, backend_id: &str, limit: usize) {
        self.inflight
            .insert(backend_id.to_string(), Arc::new(Inflight::new(limit.max(1))));
    }

    pub fn get(&self, backend_id: &str) -> Result<&Arc<dyn Backend>, BackendError> {
        self.backends
            .get(backend_id)
            .ok_or_else(|| BackendError::UnknownBackend(backend_id.to_string()))
    }

    /// One completion with bounded retries on transient failures.
    pub fn complete(
        &self,
        backend_id: &str,
        prompt: &str,
        params: &DecodeParams,
    ) -> Result<ModelResponse, BackendError> {
        if prompt.is_empty() {
            return Err(BackendError::EmptyPrompt);
        }
        params.validate()?;
        let backend = self.get(backend_id)?;
        let _slot = self.inflight.get(backend_id).map(|s| s.acquire());
        let start = Instant::now();
        let mut last_err = None;
        for attempt in 0..self.retry.max_attempts {
            if attempt > 0 {
                let delay = self.retry.base_delay * 2u32.pow(attempt - 1);
                if !delay.is_zero() {
                    std::thread::sleep(delay);
                }
            }
            match backend.complete(prompt, params) {
                Ok(text) => {
                    return Ok(ModelResponse {
                        text,
                        backend_id: backend_id.to_string(),
                        cached: false,
                        latency_ms: start.elapsed().as_millis() as u64,
                    });
                }
                Err(err) if err.is_transient() && attempt + 1 < self.retry.max_attempts => {
                    last_err = Some(err);
                }
                Err(err) => return Err(err),
            }
        }
        Err(last_err.expect("at least one attempt"))
    }

    /// Cache-aware completion. Greedy calls are served from (and written
    /// to) the store; sampled calls always go to the provider.
    pub fn cached_complete(
        &self,
        backend_id: &str,
        prompt: &str,
        params: &DecodeParams,
        cache: &CacheStore,
    ) -> Result<ModelResponse, BackendError> {
        if prompt.is_empty() {
            return Err(BackendError::EmptyPrompt);
        }
        params.validate()?;
        if !params.is_greedy() {
            return self.complete(backend_id, prompt, params);
        }
        let key = CacheKey::compute(backend_id, prompt, params);
        if let Some(text) = cache.get(&key)? {
            return Ok(ModelResponse {
                text,
                backend_id: backend_id.to_string(),
                cached: true,
                latency_ms: 0,
            });
        }
        let response = self.complete(backend_id, prompt, params)?;
        cache.put(&key, backend_id, params, &response.text)?;
        Ok(response)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.backends.keys().map(String::as_str).collect()
    }
}
