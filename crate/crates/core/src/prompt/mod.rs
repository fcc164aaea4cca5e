//! Prompt templates and deterministic rendering.
//!
//! Composite prompts are built from instruction, exemplar, passage, and
//! target blocks joined by exactly one blank line, LF only. Rendering is
//! pure string substitution over `{{slot}}` markers in a single pass, so
//! question text containing markers or label strings is inserted verbatim
//! and never re-expanded.

mod exemplars;
mod templates;

pub use exemplars::{BankEntry, ExemplarBank};

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExemplarRole {
    Qa,
    Cot,
    StepbackPair,
    PrincipleTriplet,
    JudgePair,
}

impl ExemplarRole {
    /// Slot names the role requires, exactly.
    pub fn required_slots(&self) -> &'static [&'static str] {
        match self {
            ExemplarRole::Qa | ExemplarRole::Cot => &["question", "answer"],
            ExemplarRole::StepbackPair => &["original_question", "stepback_question"],
            ExemplarRole::PrincipleTriplet => &["question", "principles", "answer"],
            ExemplarRole::JudgePair => &[
                "question",
                "answer_1",
                "answer_2",
                "answer_1_short",
                "answer_2_short",
                "verdict",
            ],
        }
    }
}

/// A demonstration instance embedded in a few-shot prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    pub id: String,
    pub role: ExemplarRole,
    pub slots: BTreeMap<String, String>,
}

impl Exemplar {
    /// Slots must contain exactly the names the role requires.
    pub fn validate(&self) -> Result<(), PromptError> {
        let required = self.role.required_slots();
        for name in required {
            if !self.slots.contains_key(*name) {
                return Err(PromptError::BadExemplarSlots {
                    id: self.id.clone(),
                    message: format!("missing slot {name:?}"),
                });
            }
        }
        if self.slots.len() != required.len() {
            let extra: Vec<&str> = self
                .slots
                .keys()
                .map(String::as_str)
                .filter(|k| !required.contains(k))
                .collect();
            return Err(PromptError::BadExemplarSlots {
                id: self.id.clone(),
                message: format!("unexpected slots {extra:?}"),
            });
        }
        Ok(())
    }

    fn slot(&self, name: &str) -> &str {
        self.slots.get(name).map(String::as_str).unwrap_or("")
    }
}

/// A fully rendered prompt plus provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub template_id: String,
    pub text: String,
    pub exemplar_ids: Vec<String>,
    pub passage_ids: Vec<String>,
    pub strategy_tag: String,
}

impl PromptBundle {
    fn new(template_id: &str, text: String, exemplar_ids: Vec<String>) -> Self {
        Self {
            template_id: template_id.to_string(),
            text,
            exemplar_ids,
            passage_ids: Vec::new(),
            strategy_tag: template_id.to_string(),
        }
    }

    pub fn with_strategy_tag(mut self, tag: impl Into<String>) -> Self {
        self.strategy_tag = tag.into();
        self
    }
}

/// A retrieved (or recited) context block for the knowledge final prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextBlock {
    pub id: String,
    pub text: String,
}

/// Subject filled into the STEM templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StemSubject {
    Physics,
    Chemistry,
}

impl fmt::Display for StemSubject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StemSubject::Physics => "Physics",
            StemSubject::Chemistry => "Chemistry",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PromptError {
    #[error("unknown template: {0}")]
    UnknownTemplate(String),
    #[error("template {template}: no value for slot {slot:?}")]
    MissingSlot { template: String, slot: String },
    #[error("empty question")]
    EmptyQuestion,
    #[error("empty principles")]
    EmptyPrinciples,
    #[error("empty {0}")]
    EmptyInput(&'static str),
    #[error("expected {min}..={max} exemplars, got {got}")]
    ExemplarCount { min: usize, max: usize, got: usize },
    #[error("exemplar {id} has role {got:?}, expected one of {expected:?}")]
    RoleMismatch {
        id: String,
        got: ExemplarRole,
        expected: Vec<ExemplarRole>,
    },
    #[error("exemplar {id}: {message}")]
    BadExemplarSlots { id: String, message: String },
    #[error("duplicate exemplar id: {0}")]
    DuplicateExemplar(String),
    #[error("model output contains no step-back question")]
    EmptyOutput,
    #[error("exemplar bank {path}: {message}")]
    BankIo { path: PathBuf, message: String },
    #[error("template dir {path}: {message}")]
    TemplateIo { path: PathBuf, message: String },
}

/// Immutable registry of template texts keyed by id.
#[derive(Debug, Clone)]
pub struct TemplateRegistry {
    templates: BTreeMap<String, String>,
}

impl TemplateRegistry {
    /// Registry with the built-in template set.
    pub fn builtin() -> Self {
        let templates = templates::BUILTIN
            .iter()
            .map(|(id, text)| (id.to_string(), text.to_string()))
            .collect();
        Self { templates }
    }

    /// Overlays templates from `dir`: each `<id>.txt` file replaces (or
    /// adds) the template with that id. A trailing newline added by text
    /// editors is stripped.
    pub fn with_overrides_from_dir(mut self, dir: &Path) -> Result<Self, PromptError> {
        let entries = std::fs::read_dir(dir).map_err(|e| PromptError::TemplateIo {
            path: dir.to_path_buf(),
            message: e.to_string(),
        })?;
        for entry in entries {
            let entry = entry.map_err(|e| PromptError::TemplateIo {
                path: dir.to_path_buf(),
                message: e.to_string(),
            })?;
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("txt") {
                continue;
            }
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            let mut text =
                std::fs::read_to_string(&path).map_err(|e| PromptError::TemplateIo {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
            if text.ends_with('\n') {
                text.pop();
                if text.ends_with('\r') {
                    text.pop();
                }
            }
            self.templates.insert(id, text);
        }
        Ok(self)
    }

    pub fn template(&self, id: &str) -> Result<&str, PromptError> {
        self.templates
            .get(id)
            .map(String::as_str)
            .ok_or_else(|| PromptError::UnknownTemplate(id.to_string()))
    }

    /// Single-pass `{{slot}}` substitution; substituted values are never
    /// re-scanned.
    fn fill(&self, id: &str, slots: &[(&str, &str)]) -> Result<String, PromptError> {
        let template = self.template(id)?;
        let mut out = String::with_capacity(template.len());
        let mut rest = template;
        while let Some(start) = rest.find("{{") {
            out.push_str(&rest[..start]);
            let after = &rest[start + 2..];
            let end = after.find("}}").ok_or_else(|| PromptError::MissingSlot {
                template: id.to_string(),
                slot: after.chars().take(24).collect(),
            })?;
            let name = &after[..end];
            let value = slots
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| PromptError::MissingSlot {
                    template: id.to_string(),
                    slot: name.to_string(),
                })?;
            out.push_str(value);
            rest = &after[end + 2..];
        }
        out.push_str(rest);
        Ok(out)
    }

    fn check_roles(
        exemplars: &[&Exemplar],
        expected: &[ExemplarRole],
    ) -> Result<(), PromptError> {
        for ex in exemplars {
            if !expected.contains(&ex.role) {
                return Err(PromptError::RoleMismatch {
                    id: ex.id.clone(),
                    got: ex.role,
                    expected: expected.to_vec(),
                });
            }
        }
        Ok(())
    }

    fn check_count(
        exemplars: &[&Exemplar],
        min: usize,
        max: usize,
    ) -> Result<(), PromptError> {
        if exemplars.len() < min || exemplars.len() > max {
            return Err(PromptError::ExemplarCount {
                min,
                max,
                got: exemplars.len(),
            });
        }
        Ok(())
    }

    fn require_question(question: &str) -> Result<(), PromptError> {
        if question.trim().is_empty() {
            return Err(PromptError::EmptyQuestion);
        }
        Ok(())
    }

    /// Standard prompt: zero exemplars gives the question-only shape, one
    /// exemplar the few-shot shape with the demonstration Q/A filled in.
    pub fn render_baseline(
        &self,
        question: &str,
        exemplars: &[&Exemplar],
    ) -> Result<PromptBundle, PromptError> {
        Self::require_question(question)?;
        Self::check_count(exemplars, 0, 1)?;
        Self::check_roles(exemplars, &[ExemplarRole::Qa, ExemplarRole::Cot])?;
        let mut blocks = Vec::new();
        if exemplars.is_empty() {
            blocks.push(self.fill("baseline.instruction.zero_shot", &[])?);
        } else {
            blocks.push(self.fill("baseline.instruction.few_shot", &[])?);
            for ex in exemplars {
                blocks.push(self.fill(
                    "baseline.exemplar",
                    &[("question", ex.slot("question")), ("answer", ex.slot("answer"))],
                )?);
            }
        }
        blocks.push(self.fill("baseline.target", &[("question", question)])?);
        Ok(PromptBundle::new(
            "baseline",
            blocks.join("\n\n"),
            exemplars.iter().map(|e| e.id.clone()).collect(),
        ))
    }

    /// Zero-shot chain-of-thought: the fixed suffix appended after the
    /// question, nothing else.
    pub fn render_cot_zero_shot(&self, question: &str) -> Result<PromptBundle, PromptError> {
        Self::require_question(question)?;
        let text = self.fill("cot.zero_shot", &[("question", question)])?;
        Ok(PromptBundle::new("cot_zero_shot", text, Vec::new()))
    }

    /// The fixed take-a-deep-breath instruction prepended to the question.
    pub fn render_tdb(&self, question: &str) -> Result<PromptBundle, PromptError> {
        Self::require_question(question)?;
        let text = self.fill("tdb", &[("question", question)])?;
        Ok(PromptBundle::new("tdb", text, Vec::new()))
    }

    /// Step-back question prompt: instruction, 1..=5 original/step-back
    /// pairs, then the target original question.
    pub fn render_stepback_question_prompt(
        &self,
        question: &str,
        exemplars: &[&Exemplar],
    ) -> Result<PromptBundle, PromptError> {
        Self::require_question(question)?;
        Self::check_count(exemplars, 1, 5)?;
        Self::check_roles(exemplars, &[ExemplarRole::StepbackPair])?;
        let mut blocks = vec![self.fill("stepback.instruction", &[])?];
        for ex in exemplars {
            blocks.push(self.fill(
                "stepback.exemplar",
                &[
                    ("original_question", ex.slot("original_question")),
                    ("stepback_question", ex.slot("stepback_question")),
                ],
            )?);
        }
        blocks.push(self.fill("stepback.target", &[("question", question)])?);
        Ok(PromptBundle::new(
            "stepback_question",
            blocks.join("\n\n"),
            exemplars.iter().map(|e| e.id.clone()).collect(),
        ))
    }

    /// First-principles extraction prompt for STEM tasks.
    pub fn render_principle_prompt(
        &self,
        question: &str,
        subject: StemSubject,
        exemplars: &[&Exemplar],
    ) -> Result<PromptBundle, PromptError> {
        Self::require_question(question)?;
        Self::check_count(exemplars, 1, 5)?;
        Self::check_roles(exemplars, &[ExemplarRole::PrincipleTriplet])?;
        let subject = subject.to_string();
        let mut blocks = vec![self.fill("principle.instruction", &[("subject", &subject)])?];
        for ex in exemplars {
            blocks.push(self.fill(
                "principle.exemplar",
                &[
                    ("question", ex.slot("question")),
                    ("principles", ex.slot("principles")),
                ],
            )?);
        }
        blocks.push(self.fill("principle.target", &[("question", question)])?);
        Ok(PromptBundle::new(
            "stem_principle",
            blocks.join("\n\n"),
            exemplars.iter().map(|e| e.id.clone()).collect(),
        ))
    }

    /// STEM final-answer prompt: solve step by step following the
    /// principles produced by the abstraction stage.
    pub fn render_stem_final_prompt(
        &self,
        question: &str,
        principles: &str,
        subject: StemSubject,
        exemplars: &[&Exemplar],
    ) -> Result<PromptBundle, PromptError> {
        Self::require_question(question)?;
        if principles.trim().is_empty() {
            return Err(PromptError::EmptyPrinciples);
        }
        Self::check_count(exemplars, 1, 5)?;
        Self::check_roles(exemplars, &[ExemplarRole::PrincipleTriplet])?;
        let subject = subject.to_string();
        let mut blocks = vec![self.fill("stem_final.instruction", &[("subject", &subject)])?];
        for ex in exemplars {
            blocks.push(self.fill(
                "stem_final.exemplar",
                &[
                    ("question", ex.slot("question")),
                    ("principles", ex.slot("principles")),
                    ("answer", ex.slot("answer")),
                ],
            )?);
        }
        blocks.push(self.fill(
            "stem_final.target",
            &[("question", question), ("principles", principles)],
        )?);
        Ok(PromptBundle::new(
            "stem_final",
            blocks.join("\n\n"),
            exemplars.iter().map(|e| e.id.clone()).collect(),
        ))
    }

    /// Knowledge final-answer prompt: context passages from the original
    /// retrieval first, then the step-back retrieval, then the original
    /// question. Both context lists may be empty.
    pub fn render_knowledge_final_prompt(
        &self,
        question: &str,
        original_passages: &[ContextBlock],
        stepback_passages: &[ContextBlock],
    ) -> Result<PromptBundle, PromptError> {
        Self::require_question(question)?;
        let mut blocks = vec![self.fill("knowledge_final.instruction", &[])?];
        for block in original_passages.iter().chain(stepback_passages) {
            blocks.push(block.text.clone());
        }
        blocks.push(self.fill("knowledge_final.target", &[("question", question)])?);
        let mut bundle = PromptBundle::new("knowledge_final", blocks.join("\n\n"), Vec::new());
        bundle.passage_ids = original_passages
            .iter()
            .chain(stepback_passages)
            .map(|b| b.id.clone())
            .collect();
        Ok(bundle)
    }

    /// Judge equivalence prompt: instruction, the demonstration pairs, then
    /// the target triple with the model output as Answer 1 and the gold
    /// label as Answer 2.
    pub fn render_judge_prompt(
        &self,
        question: &str,
        model_answer: &str,
        gold_answer: &str,
        pairs: &[&Exemplar],
    ) -> Result<PromptBundle, PromptError> {
        if question.trim().is_empty() {
            return Err(PromptError::EmptyInput("question"));
        }
        if model_answer.trim().is_empty() {
            return Err(PromptError::EmptyInput("model answer"));
        }
        if gold_answer.trim().is_empty() {
            return Err(PromptError::EmptyInput("gold answer"));
        }
        Self::check_roles(pairs, &[ExemplarRole::JudgePair])?;
        let mut blocks = vec![self.fill("judge.instruction", &[])?];
        for ex in pairs {
            blocks.push(self.fill(
                "judge.exemplar",
                &[
                    ("question", ex.slot("question")),
                    ("answer_1", ex.slot("answer_1")),
                    ("answer_2", ex.slot("answer_2")),
                    ("answer_1_short", ex.slot("answer_1_short")),
                    ("answer_2_short", ex.slot("answer_2_short")),
                    ("verdict", ex.slot("verdict")),
                ],
            )?);
        }
        blocks.push(self.fill(
            "judge.target",
            &[
                ("question", question),
                ("answer_1", model_answer),
                ("answer_2", gold_answer),
            ],
        )?);
        Ok(PromptBundle::new(
            "judge",
            blocks.join("\n\n"),
            pairs.iter().map(|e| e.id.clone()).collect(),
        ))
    }
}

/// Extracts the step-back question from a model completion: the first
/// non-empty line, with any echoed `Stepback Question:` label and
/// surrounding whitespace stripped.
pub fn parse_stepback_question(model_output: &str) -> Result<String, PromptError> {
    for line in model_output.lines() {
        let mut candidate = line.trim();
        for label in ["Stepback Question:", "stepback question:", "Step-back Question:"] {
            if candidate.len() >= label.len()
                && candidate[..label.len()].eq_ignore_ascii_case(label)
            {
                candidate = candidate[label.len()..].trim();
                break;
            }
        }
        if !candidate.is_empty() {
            return Ok(candidate.to_string());
        }
    }
    Err(PromptError::EmptyOutput)
}
