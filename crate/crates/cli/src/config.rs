//! Experiment configuration: a single declarative TOML file.
//!
//! Defaults mirror the evaluation protocol: 5 runs, 1 exemplar per
//! demonstration stage, greedy generation, judge sampling at temperature 1.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use stepback::backend::DecodeParams;
use stepback::dataset::{DatasetManifest, Split, Task};
use stepback::pipeline::{StrategyName, StrategySpec};

fn default_runs() -> u32 {
    5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub task: Task,
    pub split: Split,
    pub path: PathBuf,
    #[serde(default)]
    pub expected_count: Option<usize>,
    #[serde(default)]
    pub source_version: Option<String>,
}

impl ManifestEntry {
    pub fn to_manifest(&self, base: &Path) -> DatasetManifest {
        DatasetManifest {
            task: self.task,
            split: self.split,
            path: resolve(base, &self.path),
            expected_count: self.expected_count,
            source_version: self.source_version.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyEntry {
    pub name: StrategyName,
    #[serde(default)]
    pub shots: Option<u32>,
    #[serde(default)]
    pub retrieval_k_original: Option<usize>,
    #[serde(default)]
    pub retrieval_k_stepback: Option<usize>,
    pub backend_id: String,
    #[serde(default)]
    pub decode: Option<DecodeParams>,
}

impl StrategyEntry {
    pub fn to_spec(&self) -> StrategySpec {
        let mut spec = StrategySpec::with_defaults(self.name, &self.backend_id);
        if let Some(shots) = self.shots {
            spec.shots = shots;
        }
        if let Some(k) = self.retrieval_k_original {
            spec.retrieval_k_original = k;
        }
        if let Some(k) = self.retrieval_k_stepback {
            spec.retrieval_k_stepback = k;
        }
        if let Some(decode) = &self.decode {
            spec.decode = decode.clone();
        }
        spec
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum BackendKind {
    Mock,
    Http,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendEntry {
    pub id: String,
    pub kind: BackendKind,
    /// Mock: JSONL script of completion rules.
    #[serde(default)]
    pub script: Option<PathBuf>,
    /// Http: completion endpoint URL.
    #[serde(default)]
    pub endpoint: Option<String>,
    /// Http: env var holding the bearer credential.
    #[serde(default)]
    pub credential_env: Option<String>,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub timeout_secs: Option<u64>,
    /// Cap on concurrent requests to this backend.
    #[serde(default)]
    pub inflight_limit: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_runs")]
    pub runs: u32,
    pub judge_backend: String,
    pub output_dir: PathBuf,
    /// 0 means the default thread-pool size.
    #[serde(default)]
    pub parallelism: usize,
    /// Forwarded to providers that support seeding; judge sampling only.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub corpus_path: Option<PathBuf>,
    /// Optional directory of `<template_id>.txt` overrides.
    #[serde(default)]
    pub template_dir: Option<PathBuf>,
    /// Optional exemplar bank replacing the built-in one.
    #[serde(default)]
    pub exemplar_bank: Option<PathBuf>,
    pub manifests: Vec<ManifestEntry>,
    pub strategies: Vec<StrategyEntry>,
    pub backends: Vec<BackendEntry>,
}

/// A parsed config plus the digest of its raw bytes. The digest is embedded
/// in every artifact the run produces.
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub digest: String,
    /// Directory the config file lives in; relative paths resolve from it.
    pub base_dir: PathBuf,
}

pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let raw = std::fs::read(path).with_context(|| format!("reading config {path:?}"))?;
    let mut hasher = Sha256::new();
    hasher.update(&raw);
    let digest = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();
    let text = String::from_utf8(raw).context("config is not UTF-8")?;
    let config: ExperimentConfig =
        toml::from_str(&text).with_context(|| format!("parsing config {path:?}"))?;
    let base_dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(LoadedConfig {
        config,
        digest,
        base_dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    const MINIMAL: &str = r#"
judge_backend = "judge"
output_dir = "out"

[[manifests]]
task = "timeqa"
split = "test"
path = "data/timeqa.jsonl"

[[strategies]]
name = "stepback"
backend_id = "gen"

[[backends]]
id = "gen"
kind = "mock"
script = "gen.jsonl"

[[backends]]
id = "judge"
kind = "mock"
script = "judge.jsonl"
"#;

    #[test]
    fn minimal_config_parses_with_protocol_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.toml");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(MINIMAL.as_bytes()).unwrap();
        let loaded = load_config(&path).unwrap();
        assert_eq!(loaded.config.runs, 5);
        assert_eq!(loaded.config.parallelism, 0);
        let spec = loaded.config.strategies[0].to_spec();
        assert_eq!(spec.shots, 1);
        assert!(spec.decode.is_greedy());
        assert_eq!(loaded.digest.len(), 64);
        // identical bytes, identical digest
        let again = load_config(&path).unwrap();
        assert_eq!(loaded.digest, again.digest);
    }

    #[test]
    fn unknown_fields_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.toml");
        std::fs::write(&path, format!("{MINIMAL}\nmystery = 1\n")).unwrap();
        assert!(load_config(&path).is_err());
    }
}
