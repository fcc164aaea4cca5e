//! Win/loss comparison, error-category bookkeeping, and shot ablations.
//!
//! Error categories are human-assigned: the harness ingests annotation
//! files and tabulates them, it never classifies errors itself.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::QuestionRecord;
use crate::judge::{aggregate, score_run, AggregateScore, JudgeError};
use crate::pipeline::{run_experiment, ExecMode, PipelineDeps, PipelineError, StrategySpec};
use crate::prompt::Exemplar;

/// Per-record comparison of two strategies' correctness bits.
///
/// `fixed_pct` and `broken_pct` are fractions of all records, matching the
/// headline usage; the `*_of_*` variants use the errors-only and
/// correct-only denominators, since both conventions appear in practice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinLossMatrix {
    pub strategy_a: String,
    pub strategy_b: String,
    pub both_correct: usize,
    pub a_only: usize,
    pub b_only: usize,
    pub both_wrong: usize,
    /// a correct where b was wrong, as % of all records.
    pub fixed_pct: f64,
    /// b correct where a was wrong, as % of all records.
    pub broken_pct: f64,
    /// a correct where b was wrong, as % of b's errors.
    pub fixed_pct_of_b_errors: Option<f64>,
    /// b correct where a was wrong, as % of b's correct records.
    pub broken_pct_of_b_correct: Option<f64>,
}

impl WinLossMatrix {
    pub fn n_records(&self) -> usize {
        self.both_correct + self.a_only + self.b_only + self.both_wrong
    }

    pub fn accuracy_a(&self) -> f64 {
        (self.both_correct + self.a_only) as f64 / self.n_records() as f64
    }

    pub fn accuracy_b(&self) -> f64 {
        (self.both_correct + self.b_only) as f64 / self.n_records() as f64
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("record id sets differ: {only_a} ids only in a, {only_b} only in b")]
    IdSetMismatch { only_a: usize, only_b: usize },
    #[error("no records to compare")]
    Empty,
    #[error("annotation for record {record_id} uses {category:?}, outside the {family:?} family")]
    MixedFamilies {
        record_id: String,
        category: ErrorCategory,
        family: TaskFamily,
    },
    #[error("annotation file {path}: {message}")]
    AnnotationIo { path: PathBuf, message: String },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Judge(#[from] JudgeError),
}

/// Exact-id join of two per-record correctness maps.
pub fn win_loss(
    strategy_a: &str,
    judged_a: &BTreeMap<String, bool>,
    strategy_b: &str,
    judged_b: &BTreeMap<String, bool>,
) -> Result<WinLossMatrix, AnalysisError> {
    let ids_a: BTreeSet<&String> = judged_a.keys().collect();
    let ids_b: BTreeSet<&String> = judged_b.keys().collect();
    if ids_a != ids_b {
        return Err(AnalysisError::IdSetMismatch {
            only_a: ids_a.difference(&ids_b).count(),
            only_b: ids_b.difference(&ids_a).count(),
        });
    }
    if ids_a.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let (mut both_correct, mut a_only, mut b_only, mut both_wrong) = (0usize, 0usize, 0usize, 0usize);
    for (id, &a) in judged_a {
        let b = judged_b[id];
        match (a, b) {
            (true, true) => both_correct += 1,
            (true, false) => a_only += 1,
            (false, true) => b_only += 1,
            (false, false) => both_wrong += 1,
        }
    }
    let n = (both_correct + a_only + b_only + both_wrong) as f64;
    let b_errors = a_only + both_wrong;
    let b_correct = b_only + both_correct;
    Ok(WinLossMatrix {
        strategy_a: strategy_a.to_string(),
        strategy_b: strategy_b.to_string(),
        both_correct,
        a_only,
        b_only,
        both_wrong,
        fixed_pct: a_only as f64 / n * 100.0,
        broken_pct: b_only as f64 / n * 100.0,
        fixed_pct_of_b_errors: (b_errors > 0).then(|| a_only as f64 / b_errors as f64 * 100.0),
        broken_pct_of_b_correct: (b_correct > 0).then(|| b_only as f64 / b_correct as f64 * 100.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskFamily {
    Stem,
    Knowledge,
}

/// Human-assigned error category. STEM predictions use the five-class
/// taxonomy {principle, factual, math, context_loss, reasoning};
/// knowledge/multi-hop predictions the four-class one {stepback, rag,
/// scoring, reasoning}. Reasoning belongs to both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    Principle,
    Factual,
    Math,
    ContextLoss,
    Reasoning,
    Stepback,
    Rag,
    Scoring,
}

impl ErrorCategory {
    pub fn in_family(&self, family: TaskFamily) -> bool {
        match self {
            ErrorCategory::Reasoning => true,
            ErrorCategory::Principle
            | ErrorCategory::Factual
            | ErrorCategory::Math
            | ErrorCategory::ContextLoss => family == TaskFamily::Stem,
            ErrorCategory::Stepback | ErrorCategory::Rag | ErrorCategory::Scoring => {
                family == TaskFamily::Knowledge
            }
        }
    }

    pub fn of_family(family: TaskFamily) -> &'static [ErrorCategory] {
        match family {
            TaskFamily::Stem => &[
                ErrorCategory::Principle,
                ErrorCategory::Factual,
                ErrorCategory::Math,
                ErrorCategory::ContextLoss,
                ErrorCategory::Reasoning,
            ],
            TaskFamily::Knowledge => &[
                ErrorCategory::Stepback,
                ErrorCategory::Rag,
                ErrorCategory::Scoring,
                ErrorCategory::Reasoning,
            ],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ErrorCategory::Principle => "principle",
            ErrorCategory::Factual => "factual",
            ErrorCategory::Math => "math",
            ErrorCategory::ContextLoss => "context_loss",
            ErrorCategory::Reasoning => "reasoning",
            ErrorCategory::Stepback => "stepback",
            ErrorCategory::Rag => "rag",
            ErrorCategory::Scoring => "scoring",
        }
    }
}

/// One human annotation of a wrong prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorAnnotation {
    pub record_id: String,
    pub strategy: String,
    pub category: ErrorCategory,
    pub annotator: String,
    #[serde(default)]
    pub note: String,
}

pub fn load_annotations(path: &Path) -> Result<Vec<ErrorAnnotation>, AnalysisError> {
    let file = File::open(path).map_err(|e| AnalysisError::AnnotationIo {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut annotations = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| AnalysisError::AnnotationIo {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let annotation: ErrorAnnotation =
            serde_json::from_str(&line).map_err(|e| AnalysisError::AnnotationIo {
                path: path.to_path_buf(),
                message: format!("line {}: {e}", idx + 1),
            })?;
        annotations.push(annotation);
    }
    Ok(annotations)
}

pub fn write_annotations(
    path: &Path,
    annotations: &[ErrorAnnotation],
) -> Result<(), AnalysisError> {
    let mut file = File::create(path).map_err(|e| AnalysisError::AnnotationIo {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    for annotation in annotations {
        let line = serde_json::to_string(annotation).expect("annotation serializes");
        writeln!(file, "{line}").map_err(|e| AnalysisError::AnnotationIo {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub category: ErrorCategory,
    pub count: usize,
    /// None when the annotation set is empty (percentage undefined).
    pub percentage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    pub family: TaskFamily,
    pub total: usize,
    pub rows: Vec<CategoryRow>,
}

/// Tabulates annotations from one (strategy, task-family) slice: one row
/// per category of the family, zero-count categories included.
pub fn error_breakdown(
    family: TaskFamily,
    annotations: &[ErrorAnnotation],
) -> Result<ErrorBreakdown, AnalysisError> {
    for annotation in annotations {
        if !annotation.category.in_family(family) {
            return Err(AnalysisError::MixedFamilies {
                record_id: annotation.record_id.clone(),
                category: annotation.category,
                family,
            });
        }
    }
    let total = annotations.len();
    let mut counts: BTreeMap<ErrorCategory, usize> = BTreeMap::new();
    for annotation in annotations {
        *counts.entry(annotation.category).or_insert(0) += 1;
    }
    let rows = ErrorCategory::of_family(family)
        .iter()
        .map(|&category| {
            let count = counts.get(&category).copied().unwrap_or(0);
            CategoryRow {
                category,
                count,
                percentage: (total > 0).then(|| count as f64 / total as f64 * 100.0),
            }
        })
        .collect();
    Ok(ErrorBreakdown {
        family,
        total,
        rows,
    })
}

/// One cell of a shot-ablation sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShotPoint {
    pub shots: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<AggregateScore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Runs one full experiment per shot value with everything else held
/// fixed. A failing shot value marks its cell and the sweep continues.
#[allow(clippy::too_many_arguments)]
pub fn shot_ablation(
    base_spec: &StrategySpec,
    shot_values: &[u32],
    records: &[QuestionRecord],
    runs: u32,
    deps: &PipelineDeps<'_>,
    judge_pairs: &[&Exemplar],
    judge_backend_id: &str,
    mode: ExecMode,
) -> Vec<ShotPoint> {
    shot_values
        .iter()
        .map(|&shots| {
            let mut spec = base_spec.clone();
            spec.shots = shots;
            let outcome = (|| -> Result<AggregateScore, AnalysisError> {
                let result = run_experiment(&[spec.clone()], records, runs, deps, mode)?;
                let mut judged = Vec::new();
                for run in 0..runs {
                    let slice: Vec<_> = result
                        .predictions
                        .iter()
                        .filter(|p| p.run_index == run)
                        .cloned()
                        .collect();
                    judged.extend(score_run(
                        &slice,
                        records,
                        deps.templates,
                        judge_pairs,
                        deps.backends,
                        judge_backend_id,
                        &crate::judge::judge_decode_params(),
                        run,
                    )?);
                }
                // a shot value that failed every prediction is a failed cell
                if result.failed() == result.predictions.len() {
                    let stage = result
                        .failure_counts
                        .keys()
                        .next()
                        .cloned()
                        .unwrap_or_else(|| "unknown".into());
                    return Err(AnalysisError::Pipeline(PipelineError::Stage {
                        stage,
                        message: "every prediction failed at this shot count".into(),
                    }));
                }
                Ok(aggregate(&judged, runs)?.remove(0))
            })();
            match outcome {
                Ok(score) => ShotPoint {
                    shots,
                    score: Some(score),
                    failure: None,
                },
                Err(e) => ShotPoint {
                    shots,
                    score: None,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect()
}
