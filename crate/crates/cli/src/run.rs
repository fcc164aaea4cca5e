//! `run`: execute the configured experiment and write every artifact under
//! the output directory.
//!
//! Layout:
//!
//! ```text
//! output_dir/
//!   INCOMPLETE                       marker, removed on success
//!   cache/                           completion cache (greedy calls only)
//!   records/<task>_<split>.jsonl     the records as loaded
//!   predictions/<task>_<split>.jsonl tagged prediction lines + footer
//!   judged/<task>_<split>.jsonl      one line per judged prediction
//!   aggregates.json                  machine-readable scores
//!   table.txt                        aligned per-task tables
//!   run_meta.json                    digest, timestamps, call counts
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use stepback::backend::CacheStore;
use stepback::dataset::{write_dataset, Split, Task};
use stepback::judge::{aggregate, judge_decode_params, score_run, AggregateScore, JudgedPrediction};
use stepback::pipeline::{
    run_experiment, store, ExecMode, PipelineDeps, Prediction,
};
use stepback::report::aggregate_table;

use crate::config::LoadedConfig;
use crate::context::{build_context, RunContext};
use crate::validate::validate;

#[derive(Debug, Serialize, Deserialize)]
pub struct AggregateRow {
    pub task: Task,
    pub split: Split,
    pub strategy: String,
    pub mean_accuracy: f64,
    pub std_dev: f64,
    pub n_runs: u32,
    pub n_records: usize,
    pub display: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AggregatesFile {
    pub config_digest: String,
    /// Standard deviation over runs is the population form.
    pub std_kind: String,
    pub rows: Vec<AggregateRow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunMeta {
    pub config_digest: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub runs: u32,
    pub seed: u64,
    pub parallelism: usize,
    pub backend_calls: BTreeMap<String, usize>,
    pub failure_summary: BTreeMap<String, usize>,
    /// Passages shared by the original and step-back retrievals are kept,
    /// not deduplicated.
    pub dedup_passages_between_retrievals: bool,
    pub resumed_predictions: bool,
}

pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub generation_calls: usize,
    pub judge_calls: usize,
    pub failures: usize,
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn dataset_stem(task: Task, split: Split) -> String {
    format!("{}_{}", task.name(), split.name())
}

pub fn cmd_run(
    loaded: &LoadedConfig,
    parallelism_override: Option<usize>,
    resume: bool,
) -> Result<RunOutcome> {
    let report = validate(loaded);
    if !report.clean() {
        report.print();
        bail!("validation failed with {} errors", report.errors.len());
    }

    let config = &loaded.config;
    let parallelism = parallelism_override.unwrap_or(config.parallelism);
    let started_unix = now_unix();

    let context = build_context(loaded)?;
    let output_dir = crate::config::resolve(&loaded.base_dir, &config.output_dir);
    fs::create_dir_all(&output_dir)?;
    for sub in ["records", "predictions", "judged"] {
        fs::create_dir_all(output_dir.join(sub))?;
    }
    let marker = output_dir.join("INCOMPLETE");
    fs::write(&marker, "run in progress\n")?;

    let cache = CacheStore::open(&output_dir.join("cache"))?;
    // the bounded pool built below covers both loops; 0 keeps the default
    let mode = ExecMode::auto(0);
    let mut failure_summary: BTreeMap<String, usize> = BTreeMap::new();
    let mut all_rows: Vec<(Task, AggregateScore)> = Vec::new();
    let mut rows_for_file: Vec<AggregateRow> = Vec::new();
    let mut resumed = false;

    for (manifest, records) in &context.datasets {
        let stem = dataset_stem(manifest.task, manifest.split);
        write_dataset(&output_dir.join("records").join(format!("{stem}.jsonl")), records)?;

        let predictions_path = output_dir.join("predictions").join(format!("{stem}.jsonl"));
        let worked = stepback::pipeline::with_parallelism(parallelism, || -> Result<_> {
            let (counts, predictions, was_resumed) =
                if resume && reusable(&predictions_path, &loaded.digest) {
                    let (predictions, footer) = store::read_predictions(&predictions_path)?;
                    (footer.failure_counts, predictions, true)
                } else {
                    let deps = PipelineDeps {
                        templates: &context.templates,
                        bank: &context.bank,
                        backends: &context.backends,
                        index: context.index.as_ref(),
                        cache: Some(&cache),
                    };
                    let result =
                        run_experiment(&context.specs, records, config.runs, &deps, mode)
                            .with_context(|| format!("running {stem}"))?;
                    let footer = store::RunFooter {
                        config_digest: loaded.digest.clone(),
                        prediction_count: result.predictions.len(),
                        failure_counts: result.failure_counts.clone(),
                        complete: true,
                    };
                    store::write_predictions(&predictions_path, &result.predictions, &footer)?;
                    (result.failure_counts, result.predictions, false)
                };
            let judged = judge_all(config.runs, &predictions, records, &context, config)?;
            Ok((counts, judged, was_resumed))
        })?;
        let (counts, judged, was_resumed) = worked?;
        resumed |= was_resumed;
        for (stage, count) in counts {
            *failure_summary.entry(stage).or_insert(0) += count;
        }

        write_judged(&output_dir.join("judged").join(format!("{stem}.jsonl")), &judged)?;

        let scores = aggregate(&judged, config.runs)
            .with_context(|| format!("aggregating {stem}"))?;
        for score in scores {
            rows_for_file.push(AggregateRow {
                task: manifest.task,
                split: manifest.split,
                strategy: score.strategy.name().to_string(),
                mean_accuracy: score.mean_accuracy,
                std_dev: score.std_dev,
                n_runs: score.n_runs,
                n_records: score.n_records,
                display: score.display(),
            });
            all_rows.push((manifest.task, score));
        }
    }

    let aggregates = AggregatesFile {
        config_digest: loaded.digest.clone(),
        std_kind: "population".into(),
        rows: rows_for_file,
    };
    fs::write(
        output_dir.join("aggregates.json"),
        serde_json::to_string_pretty(&aggregates)?,
    )?;
    let table = aggregate_table(&all_rows);
    fs::write(output_dir.join("table.txt"), &table)?;
    println!("{table}");

    let backend_calls: BTreeMap<String, usize> = context
        .call_counts
        .keys()
        .map(|id| (id.clone(), context.provider_calls(id)))
        .collect();
    let generation_calls = backend_calls
        .iter()
        .filter(|(id, _)| {
            context.specs.iter().any(|s| &s.backend_id == *id)
        })
        .map(|(_, n)| *n)
        .sum();
    let judge_calls = context.provider_calls(&config.judge_backend);

    let meta = RunMeta {
        config_digest: loaded.digest.clone(),
        started_unix,
        finished_unix: now_unix(),
        runs: config.runs,
        seed: config.seed,
        parallelism,
        backend_calls,
        failure_summary: failure_summary.clone(),
        dedup_passages_between_retrievals: false,
        resumed_predictions: resumed,
    };
    fs::write(
        output_dir.join("run_meta.json"),
        serde_json::to_string_pretty(&meta)?,
    )?;
    fs::remove_file(&marker)?;

    Ok(RunOutcome {
        output_dir,
        generation_calls,
        judge_calls,
        failures: failure_summary.values().sum(),
    })
}

fn reusable(predictions_path: &Path, digest: &str) -> bool {
    match store::read_predictions(predictions_path) {
        Ok((_, footer)) => footer.complete && footer.config_digest == digest,
        Err(_) => false,
    }
}

fn judge_all(
    runs: u32,
    predictions: &[Prediction],
    records: &[stepback::dataset::QuestionRecord],
    context: &RunContext,
    config: &crate::config::ExperimentConfig,
) -> Result<Vec<JudgedPrediction>> {
    let pairs = context.bank.judge_pairs();
    let mut judged = Vec::with_capacity(predictions.len());
    for run in 0..runs {
        let slice: Vec<Prediction> = predictions
            .iter()
            .filter(|p| p.run_index == run)
            .cloned()
            .collect();
        judged.extend(score_run(
            &slice,
            records,
            &context.templates,
            &pairs,
            &context.backends,
            &config.judge_backend,
            &judge_decode_params(),
            run,
        )?);
    }
    Ok(judged)
}

fn write_judged(path: &Path, judged: &[JudgedPrediction]) -> Result<()> {
    let mut out = String::new();
    for j in judged {
        out.push_str(&serde_json::to_string(j)?);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_judged(path: &Path) -> Result<Vec<JudgedPrediction>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    let mut judged = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        judged.push(
            serde_json::from_str(line)
                .with_context(|| format!("{path:?} line {}", idx + 1))?,
        );
    }
    Ok(judged)
}
