//! Benchmark records: the canonical on-disk format, loaders, and filters.
//!
//! The canonical format is UTF-8 line-delimited JSON, one record per line,
//! snake_case field names, unknown fields rejected. Converters for the
//! upstream public distributions live in [`convert`] and emit this format;
//! nothing else in the crate parses upstream files.

pub mod convert;

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Benchmark task a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    MmluPhysics,
    MmluChemistry,
    Gsm8k,
    Timeqa,
    Situatedqa,
    Musique,
    Strategyqa,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::MmluPhysics,
        Task::MmluChemistry,
        Task::Gsm8k,
        Task::Timeqa,
        Task::Situatedqa,
        Task::Musique,
        Task::Strategyqa,
    ];

    /// Snake_case name as used in the canonical file format.
    pub fn name(&self) -> &'static str {
        match self {
            Task::MmluPhysics => "mmlu_physics",
            Task::MmluChemistry => "mmlu_chemistry",
            Task::Gsm8k => "gsm8k",
            Task::Timeqa => "timeqa",
            Task::Situatedqa => "situatedqa",
            Task::Musique => "musique",
            Task::Strategyqa => "strategyqa",
        }
    }

    /// Multiple-choice tasks carry a `choices` list.
    pub fn is_multiple_choice(&self) -> bool {
        matches!(self, Task::MmluPhysics | Task::MmluChemistry)
    }

    /// STEM tasks follow the principle-extraction flow; the rest follow the
    /// step-back-question flow.
    pub fn is_stem(&self) -> bool {
        matches!(self, Task::MmluPhysics | Task::MmluChemistry | Task::Gsm8k)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub fn name(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// TimeQA difficulty partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Easy,
    Hard,
}

impl Difficulty {
    pub fn name(&self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Hard => "hard",
        }
    }
}

/// One benchmark item in the canonical model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionRecord {
    pub id: String,
    pub task: Task,
    pub question: String,
    /// Present for multiple-choice tasks only, in display order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choices: Option<Vec<String>>,
    /// Acceptable answer strings; the judge treats any of them as correct.
    pub gold: Vec<String>,
    pub split: Split,
    /// Present for TimeQA only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub difficulty: Option<Difficulty>,
}

impl QuestionRecord {
    /// Checks the per-record invariants (everything except id uniqueness,
    /// which is a dataset-level property).
    pub fn validate(&self) -> Result<(), DatasetError> {
        let fail = |message: String| {
            Err(DatasetError::InvariantViolation {
                id: self.id.clone(),
                message,
            })
        };
        if self.id.trim().is_empty() {
            return fail("id is empty".into());
        }
        if self.gold.is_empty() {
            return fail("gold answer list is empty".into());
        }
        if self.task.is_multiple_choice() != self.choices.is_some() {
            return fail(format!(
                "choices must be present iff the task is multiple-choice (task = {})",
                self.task
            ));
        }
        if let Some(choices) = &self.choices {
            if choices.is_empty() {
                return fail("choices list is empty".into());
            }
        }
        if (self.task == Task::Timeqa) != self.difficulty.is_some() {
            return fail(format!(
                "difficulty must be present iff task is timeqa (task = {})",
                self.task
            ));
        }
        Ok(())
    }

    /// Question text as it appears in prompts: multiple-choice tasks get the
    /// numbered options appended, everything else is the bare question.
    pub fn prompt_question(&self) -> String {
        match &self.choices {
            None => self.question.clone(),
            Some(choices) => {
                let mut text = self.question.clone();
                for (i, choice) in choices.iter().enumerate() {
                    text.push('\n');
                    text.push_str(&format!("{i}) {choice}"));
                }
                text
            }
        }
    }
}

/// Record counts of the evaluation sets as published: (task, split,
/// difficulty slice, count). The difficulty slices are filters over the
/// full TimeQA test set.
pub const PUBLISHED_EVAL_COUNTS: &[(Task, Split, Option<Difficulty>, usize)] = &[
    (Task::MmluPhysics, Split::Test, None, 151),
    (Task::MmluChemistry, Split::Test, None, 203),
    (Task::Gsm8k, Split::Test, None, 1319),
    (Task::Timeqa, Split::Test, None, 5226),
    (Task::Timeqa, Split::Test, Some(Difficulty::Easy), 2613),
    (Task::Timeqa, Split::Test, Some(Difficulty::Hard), 2613),
    (Task::Situatedqa, Split::Test, None, 2901),
    (Task::Musique, Split::Dev, None, 2417),
    (Task::Strategyqa, Split::Dev, None, 229),
];

/// Where a dataset file lives and what it should contain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub task: Task,
    pub split: Split,
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_count: Option<usize>,
    /// Upstream snapshot identifier recorded by the converter that produced
    /// the file. The harness never guesses dataset versions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_version: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("dataset file missing: {0}")]
    FileMissing(PathBuf),
    #[error("{path}:{line}: malformed record: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: expected {expected} records, found {actual}")]
    CountMismatch {
        path: PathBuf,
        expected: usize,
        actual: usize,
    },
    #[error("duplicate record id: {0}")]
    DuplicateId(String),
    #[error("record {id}: {message}")]
    InvariantViolation { id: String, message: String },
    #[error("predicate references unknown field: {0}")]
    UnknownField(String),
    #[error("invalid predicate {0:?}: expected field=value")]
    InvalidPredicate(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Loads and validates a canonical record file.
///
/// Records come back in file order. Every record must pass its invariants,
/// ids must be unique, and when the manifest pins `expected_count` the file
/// must contain exactly that many records.
pub fn load_dataset(manifest: &DatasetManifest) -> Result<Vec<QuestionRecord>, DatasetError> {
    if !manifest.path.exists() {
        return Err(DatasetError::FileMissing(manifest.path.clone()));
    }
    let file = File::open(&manifest.path).map_err(|source| DatasetError::Io {
        path: manifest.path.clone(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| DatasetError::Io {
            path: manifest.path.clone(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: QuestionRecord =
            serde_json::from_str(&line).map_err(|e| DatasetError::MalformedLine {
                path: manifest.path.clone(),
                line: line_no,
                message: e.to_string(),
            })?;
        record.validate()?;
        if !seen.insert(record.id.clone()) {
            return Err(DatasetError::DuplicateId(record.id.clone()));
        }
        records.push(record);
    }

    if let Some(expected) = manifest.expected_count {
        if records.len() != expected {
            return Err(DatasetError::CountMismatch {
                path: manifest.path.clone(),
                expected,
                actual: records.len(),
            });
        }
    }
    Ok(records)
}

/// Writes records in the canonical line-delimited format.
pub fn write_dataset(path: &Path, records: &[QuestionRecord]) -> Result<(), DatasetError> {
    let mut file = File::create(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    for record in records {
        let line = serde_json::to_string(record).expect("record serialization cannot fail");
        writeln!(file, "{line}").map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(())
}

/// An exact-match predicate over one declared scalar field.
///
/// Parsed from `field=value` strings; the declared fields are `id`, `task`,
/// `question`, `split`, and `difficulty`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldPredicate {
    pub field: String,
    pub value: String,
}

impl FieldPredicate {
    pub fn new(field: impl Into<String>, value: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            value: value.into(),
        }
    }

    pub fn parse(spec: &str) -> Result<Self, DatasetError> {
        match spec.split_once('=') {
            Some((field, value)) if !field.trim().is_empty() => {
                Ok(Self::new(field.trim(), value.trim()))
            }
            _ => Err(DatasetError::InvalidPredicate(spec.to_string())),
        }
    }

    fn matches(&self, record: &QuestionRecord) -> Result<bool, DatasetError> {
        let hit = match self.field.as_str() {
            "id" => record.id == self.value,
            "task" => record.task.name() == self.value,
            "question" => record.question == self.value,
            "split" => record.split.name() == self.value,
            "difficulty" => record
                .difficulty
                .map(|d| d.name() == self.value)
                .unwrap_or(false),
            other => return Err(DatasetError::UnknownField(other.to_string())),
        };
        Ok(hit)
    }
}

/// Keeps the records matching the predicate, in input order.
pub fn filter_records(
    records: &[QuestionRecord],
    predicate: &FieldPredicate,
) -> Result<Vec<QuestionRecord>, DatasetError> {
    // Surface unknown-field errors even for an empty input.
    if records.is_empty() {
        let probe = QuestionRecord {
            id: "probe".into(),
            task: Task::Gsm8k,
            question: String::new(),
            choices: None,
            gold: vec![String::new()],
            split: Split::Test,
            difficulty: None,
        };
        predicate.matches(&probe)?;
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for record in records {
        if predicate.matches(record)? {
            out.push(record.clone());
        }
    }
    Ok(out)
}
