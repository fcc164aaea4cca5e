//! Builds the runtime pieces a command needs from a loaded config.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, Context, Result};

use stepback::backend::{Backend, BackendError, BackendRegistry, DecodeParams, HttpBackend, MockBackend};
use stepback::dataset::{load_dataset, DatasetManifest, QuestionRecord};
use stepback::pipeline::StrategySpec;
use stepback::prompt::{ExemplarBank, TemplateRegistry};
use stepback::retrieval::{build_index, load_corpus, RetrievalIndex};

use crate::config::{resolve, BackendEntry, BackendKind, LoadedConfig};

/// Counts provider calls that actually reach the backend (cache hits never
/// get here).
struct CountingBackend {
    inner: Box<dyn Backend>,
    calls: Arc<AtomicUsize>,
}

impl Backend for CountingBackend {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn complete(&self, prompt: &str, params: &DecodeParams) -> Result<String, BackendError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.complete(prompt, params)
    }
}

pub struct RunContext {
    pub templates: TemplateRegistry,
    pub bank: ExemplarBank,
    pub backends: BackendRegistry,
    pub call_counts: BTreeMap<String, Arc<AtomicUsize>>,
    pub index: Option<RetrievalIndex>,
    pub datasets: Vec<(DatasetManifest, Vec<QuestionRecord>)>,
    pub specs: Vec<StrategySpec>,
}

impl RunContext {
    pub fn provider_calls(&self, backend_id: &str) -> usize {
        self.call_counts
            .get(backend_id)
            .map(|c| c.load(Ordering::Relaxed))
            .unwrap_or(0)
    }
}

fn build_backend(entry: &BackendEntry, base: &Path, seed: u64) -> Result<Box<dyn Backend>> {
    match entry.kind {
        BackendKind::Mock => {
            let mock = MockBackend::new(&entry.id);
            if let Some(script) = &entry.script {
                let path = resolve(base, script);
                mock.load_script(&path)
                    .with_context(|| format!("loading mock script for backend {}", entry.id))?;
            }
            Ok(Box::new(mock))
        }
        BackendKind::Http => {
            let endpoint = entry
                .endpoint
                .clone()
                .ok_or_else(|| anyhow!("backend {} (http) needs an endpoint", entry.id))?;
            Ok(Box::new(HttpBackend::new(
                &entry.id,
                endpoint,
                entry.credential_env.clone(),
                entry.model.clone(),
                Some(seed),
                Duration::from_secs(entry.timeout_secs.unwrap_or(120)),
            )))
        }
    }
}

pub fn build_context(loaded: &LoadedConfig) -> Result<RunContext> {
    let config = &loaded.config;
    let base = &loaded.base_dir;

    let mut templates = TemplateRegistry::builtin();
    if let Some(dir) = &config.template_dir {
        templates = templates
            .with_overrides_from_dir(&resolve(base, dir))
            .context("loading template overrides")?;
    }
    let bank = match &config.exemplar_bank {
        Some(path) => ExemplarBank::load_jsonl(&resolve(base, path))
            .context("loading exemplar bank")?,
        None => ExemplarBank::builtin(),
    };

    let mut backends = BackendRegistry::new();
    let mut call_counts = BTreeMap::new();
    for entry in &config.backends {
        let inner = build_backend(entry, base, config.seed)?;
        let calls = Arc::new(AtomicUsize::new(0));
        call_counts.insert(entry.id.clone(), Arc::clone(&calls));
        backends.register(Arc::new(CountingBackend { inner, calls }));
        if let Some(limit) = entry.inflight_limit {
            backends.set_inflight_limit(&entry.id, limit);
        }
    }

    let index = match &config.corpus_path {
        Some(path) => {
            let corpus = load_corpus(&resolve(base, path)).context("loading corpus")?;
            Some(build_index(corpus).context("building retrieval index")?)
        }
        None => None,
    };

    let mut datasets = Vec::new();
    for entry in &config.manifests {
        let manifest = entry.to_manifest(base);
        let records = load_dataset(&manifest)
            .with_context(|| format!("loading dataset {:?}", manifest.path))?;
        datasets.push((manifest, records));
    }

    let specs: Vec<StrategySpec> = config.strategies.iter().map(|s| s.to_spec()).collect();

    Ok(RunContext {
        templates,
        bank,
        backends,
        call_counts,
        index,
        datasets,
        specs,
    })
}
