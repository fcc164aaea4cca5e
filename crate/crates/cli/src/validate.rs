//! Config validation: list every problem without executing anything.

use std::collections::BTreeSet;
use std::path::Path;

use stepback::backend::MockBackend;
use stepback::dataset::load_dataset;
use stepback::retrieval::{build_index, load_corpus};

use crate::config::{resolve, BackendKind, LoadedConfig};

#[derive(Debug, Default)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn clean(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn print(&self) {
        for w in &self.warnings {
            println!("WARNING: {w}");
        }
        for e in &self.errors {
            println!("ERROR: {e}");
        }
        if self.clean() && self.warnings.is_empty() {
            println!("config OK");
        } else if self.clean() {
            println!("config OK ({} warnings)", self.warnings.len());
        }
    }
}

pub fn validate(loaded: &LoadedConfig) -> ValidationReport {
    let config = &loaded.config;
    let base = &loaded.base_dir;
    let mut report = ValidationReport::default();

    if config.runs == 0 {
        report.errors.push("runs must be >= 1".into());
    }
    if config.manifests.is_empty() {
        report.errors.push("no manifests configured".into());
    }
    if config.strategies.is_empty() {
        report.errors.push("no strategies configured".into());
    }

    // backends must parse and their scripts exist
    let mut backend_ids = BTreeSet::new();
    for entry in &config.backends {
        if !backend_ids.insert(entry.id.clone()) {
            report
                .errors
                .push(format!("duplicate backend id {}", entry.id));
        }
        match entry.kind {
            BackendKind::Mock => match &entry.script {
                Some(script) => {
                    let path = resolve(base, script);
                    if !path.exists() {
                        report
                            .errors
                            .push(format!("backend {}: script {path:?} missing", entry.id));
                    } else {
                        let mock = MockBackend::new(&entry.id);
                        match mock.load_script(&path) {
                            Ok(_) => {
                                if !mock.has_rules() {
                                    report.warnings.push(format!(
                                        "backend {}: mock script has no rules; every call will fail",
                                        entry.id
                                    ));
                                }
                            }
                            Err(e) => report
                                .errors
                                .push(format!("backend {}: bad script: {e}", entry.id)),
                        }
                    }
                }
                None => report.warnings.push(format!(
                    "backend {}: unscripted mock; every call will fail",
                    entry.id
                )),
            },
            BackendKind::Http => {
                if entry.endpoint.is_none() {
                    report
                        .errors
                        .push(format!("backend {}: http backend needs an endpoint", entry.id));
                }
                if let Some(var) = &entry.credential_env {
                    if std::env::var(var).is_err() {
                        report.warnings.push(format!(
                            "backend {}: credential env var {var} is not set",
                            entry.id
                        ));
                    }
                }
            }
        }
    }

    if !backend_ids.contains(&config.judge_backend) {
        report.errors.push(format!(
            "judge_backend {} is not a configured backend",
            config.judge_backend
        ));
    }

    // strategies: invariants plus backend references
    let mut uses_retrieval = false;
    for entry in &config.strategies {
        let spec = entry.to_spec();
        if let Err(e) = spec.validate() {
            report.errors.push(format!("strategy {}: {e}", spec.name));
        }
        if !backend_ids.contains(&spec.backend_id) {
            report.errors.push(format!(
                "strategy {}: backend {} is not configured",
                spec.name, spec.backend_id
            ));
        }
        if !spec.decode.is_greedy() {
            report.warnings.push(format!(
                "strategy {}: generation decode is not greedy; completions will not be cached and runs will not be reproducible",
                spec.name
            ));
        }
        uses_retrieval |= spec.name.uses_retrieval();

        for manifest in &config.manifests {
            if spec.name.uses_retrieval() && manifest.task.is_stem() {
                report.errors.push(format!(
                    "strategy {} cannot run on task {} ({} manifest)",
                    spec.name, manifest.task, manifest.split
                ));
            }
        }
    }

    if uses_retrieval {
        match &config.corpus_path {
            None => report
                .errors
                .push("retrieval strategies configured but corpus_path is unset".into()),
            Some(path) => {
                let path = resolve(base, path);
                if !path.exists() {
                    report.errors.push(format!("corpus {path:?} missing"));
                } else {
                    match load_corpus(&path).and_then(build_index) {
                        Ok(_) => {}
                        Err(e) => report.errors.push(format!("corpus {path:?}: {e}")),
                    }
                }
            }
        }
    }

    // manifests: dry load (catches malformed records, invariant violations,
    // duplicate ids, and count mismatches)
    for entry in &config.manifests {
        let manifest = entry.to_manifest(base);
        if let Err(e) = load_dataset(&manifest) {
            report.errors.push(format!("manifest {}: {e}", manifest.task));
        }
    }

    if let Some(dir) = &config.template_dir {
        let dir = resolve(base, dir);
        if !dir.is_dir() {
            report
                .errors
                .push(format!("template_dir {dir:?} is not a directory"));
        }
    }
    if let Some(bank) = &config.exemplar_bank {
        let path = resolve(base, bank);
        if !path.exists() {
            report.errors.push(format!("exemplar_bank {path:?} missing"));
        } else if let Err(e) = stepback::prompt::ExemplarBank::load_jsonl(&path) {
            report.errors.push(format!("exemplar_bank: {e}"));
        }
    }

    report
}

/// True when `dir` looks like a finalized run output directory.
pub fn results_finalized(dir: &Path) -> bool {
    !dir.join("INCOMPLETE").exists() && dir.join("run_meta.json").exists()
}
