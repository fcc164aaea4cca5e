//! Strategy execution: compose prompt, retrieval, and backend calls per
//! strategy and emit traced predictions.
//!
//! Two stage kinds count as generation: abstraction and reasoning. The
//! pure step-back strategy on knowledge tasks additionally makes one
//! grounding call that answers the step-back question in place of a
//! retriever; it is recorded in the trace like every other provider call
//! but classified as grounding, not generation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::backend::{BackendRegistry, CacheStore, DecodeParams, ModelResponse};
use crate::dataset::{QuestionRecord, Task};
use crate::prompt::{
    parse_stepback_question, ContextBlock, ExemplarBank, ExemplarRole, PromptBundle,
    StemSubject, TemplateRegistry,
};
use crate::retrieval::{retrieve, RetrievalIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    Baseline,
    #[serde(rename = "baseline_1shot")]
    Baseline1Shot,
    Cot,
    #[serde(rename = "cot_1shot")]
    Cot1Shot,
    Tdb,
    Rag,
    Stepback,
    StepbackRag,
}

impl StrategyName {
    pub const ALL: [StrategyName; 8] = [
        StrategyName::Baseline,
        StrategyName::Baseline1Shot,
        StrategyName::Cot,
        StrategyName::Cot1Shot,
        StrategyName::Tdb,
        StrategyName::Rag,
        StrategyName::Stepback,
        StrategyName::StepbackRag,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StrategyName::Baseline => "baseline",
            StrategyName::Baseline1Shot => "baseline_1shot",
            StrategyName::Cot => "cot",
            StrategyName::Cot1Shot => "cot_1shot",
            StrategyName::Tdb => "tdb",
            StrategyName::Rag => "rag",
            StrategyName::Stepback => "stepback",
            StrategyName::StepbackRag => "stepback_rag",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.name() == s)
    }

    pub fn uses_retrieval(&self) -> bool {
        matches!(self, StrategyName::Rag | StrategyName::StepbackRag)
    }

    /// Expected provider calls per prediction: (generation, grounding).
    pub fn call_profile(&self, task: Task) -> (usize, usize) {
        match self {
            StrategyName::Stepback => match task {
                Task::Gsm8k => (1, 0),
                Task::MmluPhysics | Task::MmluChemistry => (2, 0),
                _ => (2, 1),
            },
            StrategyName::StepbackRag => (2, 0),
            _ => (1, 0),
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A named strategy plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub name: StrategyName,
    pub shots: u32,
    #[serde(default)]
    pub retrieval_k_original: usize,
    #[serde(default)]
    pub retrieval_k_stepback: usize,
    pub backend_id: String,
    pub decode: DecodeParams,
}

impl StrategySpec {
    /// Spec with the protocol defaults for `name`: one exemplar per
    /// demonstration stage, k = 3 per retrieval, greedy decoding.
    pub fn with_defaults(name: StrategyName, backend_id: impl Into<String>) -> Self {
        let shots = match name {
            StrategyName::Baseline | StrategyName::Cot | StrategyName::Tdb | StrategyName::Rag => 0,
            _ => 1,
        };
        let (k_orig, k_sb) = match name {
            StrategyName::Rag => (3, 0),
            StrategyName::StepbackRag => (3, 3),
            _ => (0, 0),
        };
        Self {
            name,
            shots,
            retrieval_k_original: k_orig,
            retrieval_k_stepback: k_sb,
            backend_id: backend_id.into(),
            decode: DecodeParams::greedy(),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |message: String| Err(PipelineError::InvalidSpec(message));
        match self.name {
            StrategyName::Baseline | StrategyName::Cot | StrategyName::Tdb => {
                if self.shots != 0 {
                    return bad(format!("{} must have shots=0, got {}", self.name, self.shots));
                }
            }
            StrategyName::Baseline1Shot | StrategyName::Cot1Shot => {
                if self.shots != 1 {
                    return bad(format!("{} must have shots=1, got {}", self.name, self.shots));
                }
            }
            StrategyName::Rag => {
                if self.shots != 0 {
                    return bad(format!("rag must have shots=0, got {}", self.shots));
                }
                if self.retrieval_k_original == 0 {
                    return bad("rag requires retrieval_k_original >= 1".into());
                }
            }
            StrategyName::Stepback => {
                if !(1..=5).contains(&self.shots) {
                    return bad(format!("stepback requires shots in 1..=5, got {}", self.shots));
                }
            }
            StrategyName::StepbackRag => {
                if !(1..=5).contains(&self.shots) {
                    return bad(format!(
                        "stepback_rag requires shots in 1..=5, got {}",
                        self.shots
                    ));
                }
                if self.retrieval_k_original == 0 || self.retrieval_k_stepback == 0 {
                    return bad("stepback_rag requires both retrieval k values >= 1".into());
                }
            }
        }
        if !self.name.uses_retrieval()
            && (self.retrieval_k_original != 0 || self.retrieval_k_stepback != 0)
        {
            return bad(format!(
                "{} does not use retrieval; k values must be 0",
                self.name
            ));
        }
        self.decode
            .validate()
            .map_err(|e| PipelineError::InvalidSpec(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    Abstraction,
    Grounding,
    Reasoning,
}

impl StageKind {
    pub fn is_generation(&self) -> bool {
        matches!(self, StageKind::Abstraction | StageKind::Reasoning)
    }
}

/// One provider call made while executing a strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub kind: StageKind,
    pub name: String,
    pub template_id: String,
    pub prompt: String,
    pub completion: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exemplar_ids: Vec<String>,
    /// Whether this call was served from the completion cache. Not
    /// persisted: prediction files must stay byte-identical across
    /// cache-warm reruns.
    #[serde(skip)]
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievedPassage {
    pub id: String,
    pub score: f64,
}

/// Everything observable about one prediction's execution.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trace {
    pub stages: Vec<StageRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stepback_question: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principles: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stepback_answer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_passages: Option<Vec<RetrievedPassage>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stepback_passages: Option<Vec<RetrievedPassage>>,
}

impl Trace {
    pub fn generation_calls(&self) -> usize {
        self.stages.iter().filter(|s| s.kind.is_generation()).count()
    }

    pub fn grounding_calls(&self) -> usize {
        self.stages
            .iter()
            .filter(|s| s.kind == StageKind::Grounding)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: String,
    pub message: String,
}

/// Model output for one record under one strategy. A failed prediction
/// carries the failing stage and scores as incorrect downstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub record_id: String,
    pub strategy: StrategyName,
    pub run_index: u32,
    pub answer: String,
    pub trace: Trace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<StageFailure>,
}

impl Prediction {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("stage {stage}: {message}")]
    Stage { stage: String, message: String },
    #[error("strategy {0} requires a retrieval index")]
    MissingIndex(StrategyName),
    #[error("strategy {strategy} is not supported for task {task}")]
    UnsupportedStrategy { strategy: StrategyName, task: Task },
    #[error("bank has {available} exemplars with role {role:?} for task {task}, need {needed}")]
    MissingExemplars {
        task: Task,
        role: ExemplarRole,
        needed: usize,
        available: usize,
    },
    #[error("invalid strategy spec: {0}")]
    InvalidSpec(String),
    #[error("runs must be >= 1")]
    ZeroRuns,
}

impl PipelineError {
    fn stage(stage: &str, err: impl fmt::Display) -> Self {
        PipelineError::Stage {
            stage: stage.to_string(),
            message: err.to_string(),
        }
    }

    /// Stage label used in failure summaries.
    pub fn stage_label(&self) -> String {
        match self {
            PipelineError::Stage { stage, .. } => stage.clone(),
            PipelineError::MissingIndex(_) => "setup".into(),
            PipelineError::UnsupportedStrategy { .. } => "setup".into(),
            PipelineError::MissingExemplars { .. } => "setup".into(),
            PipelineError::InvalidSpec(_) => "setup".into(),
            PipelineError::ZeroRuns => "setup".into(),
        }
    }
}

/// Shared dependencies for strategy execution.
pub struct PipelineDeps<'a> {
    pub templates: &'a TemplateRegistry,
    pub bank: &'a ExemplarBank,
    pub backends: &'a BackendRegistry,
    pub index: Option<&'a RetrievalIndex>,
    pub cache: Option<&'a CacheStore>,
}

impl PipelineDeps<'_> {
    fn generate(
        &self,
        backend_id: &str,
        prompt: &str,
        params: &DecodeParams,
    ) -> Result<ModelResponse, crate::backend::BackendError> {
        match self.cache {
            Some(cache) => self.backends.cached_complete(backend_id, prompt, params, cache),
            None => self.backends.complete(backend_id, prompt, params),
        }
    }
}

fn exemplars_for<'a>(
    deps: &PipelineDeps<'a>,
    task: Task,
    role: ExemplarRole,
    needed: usize,
) -> Result<Vec<&'a crate::prompt::Exemplar>, PipelineError> {
    let all = deps.bank.get(task, role);
    if all.len() < needed {
        return Err(PipelineError::MissingExemplars {
            task,
            role,
            needed,
            available: all.len(),
        });
    }
    Ok(all.into_iter().take(needed).collect())
}

fn subject_for(task: Task) -> Option<StemSubject> {
    match task {
        Task::MmluPhysics => Some(StemSubject::Physics),
        Task::MmluChemistry => Some(StemSubject::Chemistry),
        _ => None,
    }
}

struct Execution<'a, 'd> {
    spec: &'a StrategySpec,
    deps: &'a PipelineDeps<'d>,
    trace: Trace,
}

impl Execution<'_, '_> {
    fn call(
        &mut self,
        kind: StageKind,
        name: &str,
        bundle: &PromptBundle,
    ) -> Result<String, PipelineError> {
        let response = self
            .deps
            .generate(&self.spec.backend_id, &bundle.text, &self.spec.decode)
            .map_err(|e| PipelineError::stage(name, e))?;
        self.trace.stages.push(StageRecord {
            kind,
            name: name.to_string(),
            template_id: bundle.template_id.clone(),
            prompt: bundle.text.clone(),
            completion: response.text.clone(),
            exemplar_ids: bundle.exemplar_ids.clone(),
            cached: response.cached,
        });
        Ok(response.text)
    }

    fn retrieve_blocks(
        &self,
        query: &str,
        k: usize,
    ) -> (Vec<ContextBlock>, Vec<RetrievedPassage>) {
        let index = self.deps.index.expect("caller checked index presence");
        let hits = retrieve(index, query, k);
        let blocks = hits
            .iter()
            .map(|(p, _)| ContextBlock {
                id: p.id.clone(),
                text: p.context_text(),
            })
            .collect();
        let meta = hits
            .iter()
            .map(|(p, score)| RetrievedPassage {
                id: p.id.clone(),
                score: *score,
            })
            .collect();
        (blocks, meta)
    }
}

/// Executes one strategy over one record, recording every intermediate
/// text in the trace.
pub fn run_strategy(
    spec: &StrategySpec,
    record: &QuestionRecord,
    deps: &PipelineDeps<'_>,
    run_index: u32,
) -> Result<Prediction, PipelineError> {
    spec.validate()?;
    if spec.name.uses_retrieval() {
        if record.task.is_stem() {
            return Err(PipelineError::UnsupportedStrategy {
                strategy: spec.name,
                task: record.task,
            });
        }
        if deps.index.is_none() {
            return Err(PipelineError::MissingIndex(spec.name));
        }
    }

    let question = record.prompt_question();
    let tag = spec.name.name();
    let mut exec = Execution {
        spec,
        deps,
        trace: Trace::default(),
    };

    let answer = match spec.name {
        StrategyName::Baseline => {
            let bundle = deps
                .templates
                .render_baseline(&question, &[])
                .map_err(|e| PipelineError::stage("render", e))?
                .with_strategy_tag(tag);
            exec.call(StageKind::Reasoning, "answer", &bundle)?
        }
        StrategyName::Baseline1Shot => {
            let exs = exemplars_for(deps, record.task, ExemplarRole::Qa, 1)?;
            let bundle = deps
                .templates
                .render_baseline(&question, &exs)
                .map_err(|e| PipelineError::stage("render", e))?
                .with_strategy_tag(tag);
            exec.call(StageKind::Reasoning, "answer", &bundle)?
        }
        StrategyName::Cot => {
            let bundle = deps
                .templates
                .render_cot_zero_shot(&question)
                .map_err(|e| PipelineError::stage("render", e))?
                .with_strategy_tag(tag);
            exec.call(StageKind::Reasoning, "answer", &bundle)?
        }
        StrategyName::Cot1Shot => {
            let exs = exemplars_for(deps, record.task, ExemplarRole::Cot, 1)?;
            let bundle = deps
                .templates
                .render_baseline(&question, &exs)
                .map_err(|e| PipelineError::stage("render", e))?
                .with_strategy_tag(tag);
            exec.call(StageKind::Reasoning, "answer", &bundle)?
        }
        StrategyName::Tdb => {
            let bundle = deps
                .templates
                .render_tdb(&question)
                .map_err(|e| PipelineError::stage("render", e))?
                .with_strategy_tag(tag);
            exec.call(StageKind::Reasoning, "answer", &bundle)?
        }
        StrategyName::Rag => {
            let (blocks, meta) = exec.retrieve_blocks(&question, spec.retrieval_k_original);
            exec.trace.original_passages = Some(meta);
            let bundle = deps
                .templates
                .render_knowledge_final_prompt(&question, &blocks, &[])
                .map_err(|e| PipelineError::stage("render", e))?
                .with_strategy_tag(tag);
            exec.call(StageKind::Reasoning, "final_answer", &bundle)?
        }
        StrategyName::Stepback => match record.task {
            Task::MmluPhysics | Task::MmluChemistry => {
                let subject = subject_for(record.task).expect("stem subject");
                let exs = exemplars_for(
                    deps,
                    record.task,
                    ExemplarRole::PrincipleTriplet,
                    spec.shots as usize,
                )?;
                let bundle = deps
                    .templates
                    .render_principle_prompt(&question, subject, &exs)
                    .map_err(|e| PipelineError::stage("abstraction", e))?
                    .with_strategy_tag(tag);
                let principles = exec.call(StageKind::Abstraction, "principles", &bundle)?;
                exec.trace.principles = Some(principles.clone());
                let bundle = deps
                    .templates
                    .render_stem_final_prompt(&question, &principles, subject, &exs)
                    .map_err(|e| PipelineError::stage("reasoning", e))?
                    .with_strategy_tag(tag);
                exec.call(StageKind::Reasoning, "final_answer", &bundle)?
            }
            Task::Gsm8k => {
                // principles are fused into the demonstration answer; a
                // single call with the standard prompt shape
                let combined = deps.bank.stepback_combined(Task::Gsm8k).ok_or(
                    PipelineError::MissingExemplars {
                        task: Task::Gsm8k,
                        role: ExemplarRole::Qa,
                        needed: 1,
                        available: 0,
                    },
                )?;
                let bundle = deps
                    .templates
                    .render_baseline(&question, &[combined])
                    .map_err(|e| PipelineError::stage("render", e))?
                    .with_strategy_tag(tag);
                exec.call(StageKind::Reasoning, "final_answer", &bundle)?
            }
            _ => {
                let exs = exemplars_for(
                    deps,
                    record.task,
                    ExemplarRole::StepbackPair,
                    spec.shots as usize,
                )?;
                let bundle = deps
                    .templates
                    .render_stepback_question_prompt(&question, &exs)
                    .map_err(|e| PipelineError::stage("abstraction", e))?
                    .with_strategy_tag(tag);
                let raw = exec.call(StageKind::Abstraction, "stepback_question", &bundle)?;
                let stepback_question = parse_stepback_question(&raw)
                    .map_err(|e| PipelineError::stage("abstraction", e))?;
                exec.trace.stepback_question = Some(stepback_question.clone());
                // no retriever here: answer the step-back question directly
                // and feed that answer in as the step-back context
                let bundle = deps
                    .templates
                    .render_baseline(&stepback_question, &[])
                    .map_err(|e| PipelineError::stage("grounding", e))?
                    .with_strategy_tag(tag);
                let stepback_answer = exec.call(StageKind::Grounding, "stepback_answer", &bundle)?;
                exec.trace.stepback_answer = Some(stepback_answer.clone());
                let context = [ContextBlock {
                    id: "stepback_answer".to_string(),
                    text: stepback_answer,
                }];
                let bundle = deps
                    .templates
                    .render_knowledge_final_prompt(&question, &[], &context)
                    .map_err(|e| PipelineError::stage("reasoning", e))?
                    .with_strategy_tag(tag);
                exec.call(StageKind::Reasoning, "final_answer", &bundle)?
            }
        },
        StrategyName::StepbackRag => {
            let exs = exemplars_for(
                deps,
                record.task,
                ExemplarRole::StepbackPair,
                spec.shots as usize,
            )?;
            let bundle = deps
                .templates
                .render_stepback_question_prompt(&question, &exs)
                .map_err(|e| PipelineError::stage("abstraction", e))?
                .with_strategy_tag(tag);
            let raw = exec.call(StageKind::Abstraction, "stepback_question", &bundle)?;
            let stepback_question = parse_stepback_question(&raw)
                .map_err(|e| PipelineError::stage("abstraction", e))?;
            exec.trace.stepback_question = Some(stepback_question.clone());
            let (orig_blocks, orig_meta) =
                exec.retrieve_blocks(&question, spec.retrieval_k_original);
            let (sb_blocks, sb_meta) =
                exec.retrieve_blocks(&stepback_question, spec.retrieval_k_stepback);
            exec.trace.original_passages = Some(orig_meta);
            exec.trace.stepback_passages = Some(sb_meta);
            let bundle = deps
                .templates
                .render_knowledge_final_prompt(&question, &orig_blocks, &sb_blocks)
                .map_err(|e| PipelineError::stage("reasoning", e))?
                .with_strategy_tag(tag);
            exec.call(StageKind::Reasoning, "final_answer", &bundle)?
        }
    };

    Ok(Prediction {
        record_id: record.id.clone(),
        strategy: spec.name,
        run_index,
        answer,
        trace: exec.trace,
        error: None,
    })
}

/// How [`run_experiment`] executes its prediction jobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Data-parallel over predictions; 0 threads means the default pool
    /// size.
    #[cfg(feature = "parallel")]
    Parallel { threads: usize },
}

impl ExecMode {
    /// Parallel when built with the `parallel` feature, sequential
    /// otherwise. `threads` = 0 picks the default pool size.
    #[allow(unused_variables)]
    pub fn auto(threads: usize) -> Self {
        #[cfg(feature = "parallel")]
        {
            ExecMode::Parallel { threads }
        }
        #[cfg(not(feature = "parallel"))]
        {
            ExecMode::Sequential
        }
    }
}

/// Runs `f` inside a thread pool of `threads` workers (when the `parallel`
/// feature is on and `threads` > 0), so every data-parallel loop inside it
/// shares one bounded pool. Otherwise `f` runs in place.
pub fn with_parallelism<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, PipelineError> {
    #[cfg(feature = "parallel")]
    {
        if threads > 0 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| PipelineError::InvalidSpec(e.to_string()))?;
            return Ok(pool.install(f));
        }
    }
    let _ = threads;
    Ok(f())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub predictions: Vec<Prediction>,
    /// Failed predictions per stage label.
    pub failure_counts: BTreeMap<String, usize>,
}

impl ExperimentResult {
    pub fn failed(&self) -> usize {
        self.failure_counts.values().sum()
    }
}

/// Runs every (spec, record, run) combination. Per-prediction failures
/// become failed predictions, never global aborts, and the output order is
/// (spec, record, run) lexicographic regardless of execution order.
pub fn run_experiment(
    specs: &[StrategySpec],
    records: &[QuestionRecord],
    runs: u32,
    deps: &PipelineDeps<'_>,
    mode: ExecMode,
) -> Result<ExperimentResult, PipelineError> {
    if runs == 0 {
        return Err(PipelineError::ZeroRuns);
    }
    for spec in specs {
        spec.validate()?;
    }

    let jobs: Vec<(usize, usize, u32)> = specs
        .iter()
        .enumerate()
        .flat_map(|(si, _)| {
            records.iter().enumerate().flat_map(move |(ri, _)| {
                (0..runs).map(move |run| (si, ri, run))
            })
        })
        .collect();

    let run_one = |&(si, ri, run): &(usize, usize, u32)| -> Prediction {
        let spec = &specs[si];
        let record = &records[ri];
        match run_strategy(spec, record, deps, run) {
            Ok(prediction) => prediction,
            Err(err) => Prediction {
                record_id: record.id.clone(),
                strategy: spec.name,
                run_index: run,
                answer: String::new(),
                trace: Trace::default(),
                error: Some(StageFailure {
                    stage: err.stage_label(),
                    message: err.to_string(),
                }),
            },
        }
    };

    let predictions: Vec<Prediction> = match mode {
        ExecMode::Sequential => jobs.iter().map(run_one).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel { threads } => {
            use rayon::prelude::*;
            let work = || jobs.par_iter().map(run_one).collect();
            if threads == 0 {
                work()
            } else {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| PipelineError::InvalidSpec(e.to_string()))?;
                pool.install(work)
            }
        }
    };

    let mut failure_counts = BTreeMap::new();
    for prediction in &predictions {
        if let Some(failure) = &prediction.error {
            *failure_counts.entry(failure.stage.clone()).or_insert(0) += 1;
        }
    }
    Ok(ExperimentResult {
        predictions,
        failure_counts,
    })
}

/// Writers/readers for the prediction file format: one tagged JSON line
/// per prediction, finalized by a footer line.
pub mod store {
    use super::*;
    use std::fs::File;
    use std::io::{BufRead, BufReader, Write};
    use std::path::{Path, PathBuf};

    /// Run metadata carried by the footer line. Wall-clock timestamps live
    /// in the sidecar run metadata so prediction files stay byte-identical
    /// across cache-warm reruns.
    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct RunFooter {
        pub config_digest: String,
        pub prediction_count: usize,
        pub failure_counts: BTreeMap<String, usize>,
        pub complete: bool,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    #[serde(tag = "kind", rename_all = "snake_case")]
    pub enum PredictionLine {
        Prediction(Prediction),
        Footer(RunFooter),
    }

    #[derive(Debug, thiserror::Error)]
    pub enum StoreError {
        #[error("prediction file {path}: {message}")]
        Io { path: PathBuf, message: String },
        #[error("prediction file {0}: missing footer (run incomplete?)")]
        MissingFooter(PathBuf),
    }

    pub fn write_predictions(
        path: &Path,
        predictions: &[Prediction],
        footer: &RunFooter,
    ) -> Result<(), StoreError> {
        let io = |e: std::io::Error| StoreError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        let mut file = File::create(path).map_err(io)?;
        for prediction in predictions {
            let line = serde_json::to_string(&PredictionLine::Prediction(prediction.clone()))
                .expect("prediction serializes");
            writeln!(file, "{line}").map_err(io)?;
        }
        let line = serde_json::to_string(&PredictionLine::Footer(footer.clone()))
            .expect("footer serializes");
        writeln!(file, "{line}").map_err(io)?;
        Ok(())
    }

    pub fn read_predictions(path: &Path) -> Result<(Vec<Prediction>, RunFooter), StoreError> {
        let io = |e: std::io::Error| StoreError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        let file = File::open(path).map_err(io)?;
        let mut predictions = Vec::new();
        let mut footer = None;
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: PredictionLine =
                serde_json::from_str(&line).map_err(|e| StoreError::Io {
                    path: path.to_path_buf(),
                    message: format!("line {}: {e}", idx + 1),
                })?;
            match parsed {
                PredictionLine::Prediction(p) => predictions.push(p),
                PredictionLine::Footer(f) => footer = Some(f),
            }
        }
        let footer = footer.ok_or_else(|| StoreError::MissingFooter(path.to_path_buf()))?;
        Ok((predictions, footer))
    }
}
