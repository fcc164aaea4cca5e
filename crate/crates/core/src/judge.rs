//! LLM-as-judge equivalence scoring and multi-run aggregation.
//!
//! One judge call per (prediction, gold alias) until the first equivalent
//! verdict. The judge samples at temperature 1 and is never cached, so
//! run-to-run variance comes from the judge alone; generation stays greedy
//! and cached. Unparseable and not-equivalent verdicts both score as
//! incorrect.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::backend::{BackendRegistry, DecodeParams};
use crate::dataset::QuestionRecord;
use crate::pipeline::{Prediction, StrategyName};
use crate::prompt::{Exemplar, PromptBundle, TemplateRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    Unparseable,
}

impl Verdict {
    pub fn is_correct(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct JudgeFlags {
    /// The prediction failed during generation and was never judged.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub generation_failed: bool,
    /// The judge backend itself errored for this item.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub judge_backend_error: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgedPrediction {
    pub record_id: String,
    pub strategy: StrategyName,
    pub run_index: u32,
    pub verdict: Verdict,
    /// Raw output of the last judge call for this item.
    pub judge_raw: String,
    pub judge_calls: u32,
    #[serde(default, skip_serializing_if = "JudgeFlags::is_default")]
    pub flags: JudgeFlags,
}

impl JudgeFlags {
    fn is_default(&self) -> bool {
        *self == JudgeFlags::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateScore {
    pub strategy: StrategyName,
    pub mean_accuracy: f64,
    pub std_dev: f64,
    pub n_runs: u32,
    pub n_records: usize,
}

impl AggregateScore {
    /// The `73.2% (1.9%)` display convention.
    pub fn display(&self) -> String {
        format_accuracy(self.mean_accuracy, self.std_dev)
    }
}

/// Formats a (mean, std) accuracy pair as percentages with one decimal.
pub fn format_accuracy(mean: f64, std: f64) -> String {
    format!("{:.1}% ({:.1}%)", mean * 100.0, std * 100.0)
}

#[derive(Debug, thiserror::Error)]
pub enum JudgeError {
    #[error("prediction {0} has no gold record")]
    MissingGold(String),
    #[error("empty {0}")]
    EmptyInput(&'static str),
    #[error(
        "strategy {strategy}, record {record_id}: expected {expected} run verdicts, found {found}"
    )]
    MissingRunCoverage {
        strategy: StrategyName,
        record_id: String,
        expected: u32,
        found: usize,
    },
    #[error("no judged predictions to aggregate")]
    Empty,
}

/// Renders the judge prompt with the built-in demonstration pairs, model
/// output as Answer 1 and the gold label as Answer 2.
pub fn render_judge_prompt(
    templates: &TemplateRegistry,
    pairs: &[&Exemplar],
    question: &str,
    model_answer: &str,
    gold_answer: &str,
) -> Result<PromptBundle, crate::prompt::PromptError> {
    templates.render_judge_prompt(question, model_answer, gold_answer, pairs)
}

/// First standalone yes/no token decides, case-insensitive and tolerant of
/// punctuation; anything else is unparseable.
pub fn parse_judge_verdict(judge_output: &str) -> Verdict {
    for token in judge_output.split(|c: char| !c.is_alphanumeric()) {
        if token.is_empty() {
            continue;
        }
        if token.eq_ignore_ascii_case("yes") {
            return Verdict::Equivalent;
        }
        if token.eq_ignore_ascii_case("no") {
            return Verdict::NotEquivalent;
        }
    }
    Verdict::Unparseable
}

/// Judge decode defaults: temperature 1 sampling.
pub fn judge_decode_params() -> DecodeParams {
    DecodeParams {
        max_output_tokens: 64,
        ..DecodeParams::sampling()
    }
}

/// Scores one run's predictions against gold. Every prediction's record
/// must exist in `records`. Failed generations are not judged and score as
/// incorrect; judge backend errors score the item unparseable and flag it.
#[allow(clippy::too_many_arguments)]
pub fn score_run(
    predictions: &[Prediction],
    records: &[QuestionRecord],
    templates: &TemplateRegistry,
    judge_pairs: &[&Exemplar],
    backends: &BackendRegistry,
    judge_backend_id: &str,
    judge_params: &DecodeParams,
    run_index: u32,
) -> Result<Vec<JudgedPrediction>, JudgeError> {
    let gold: BTreeMap<&str, &QuestionRecord> =
        records.iter().map(|r| (r.id.as_str(), r)).collect();
    for prediction in predictions {
        if !gold.contains_key(prediction.record_id.as_str()) {
            return Err(JudgeError::MissingGold(prediction.record_id.clone()));
        }
    }

    let judge_one = |prediction: &Prediction| -> JudgedPrediction {
        let record = gold[prediction.record_id.as_str()];
        if prediction.failed() {
            return JudgedPrediction {
                record_id: prediction.record_id.clone(),
                strategy: prediction.strategy,
                run_index,
                verdict: Verdict::NotEquivalent,
                judge_raw: String::new(),
                judge_calls: 0,
                flags: JudgeFlags {
                    generation_failed: true,
                    judge_backend_error: false,
                },
            };
        }
        let mut verdict = Verdict::Unparseable;
        let mut saw_no = false;
        let mut judge_raw = String::new();
        let mut judge_calls = 0u32;
        let mut backend_error = false;
        for alias in &record.gold {
            let bundle = match templates.render_judge_prompt(
                &record.question,
                &prediction.answer,
                alias,
                judge_pairs,
            ) {
                Ok(bundle) => bundle,
                Err(_) => {
                    // empty model answer or gold alias: nothing to judge
                    continue;
                }
            };
            // temperature-1 sampling, never cached
            match backends.complete(judge_backend_id, &bundle.text, judge_params) {
                Ok(response) => {
                    judge_calls += 1;
                    judge_raw = response.text;
                    match parse_judge_verdict(&judge_raw) {
                        Verdict::Equivalent => {
                            verdict = Verdict::Equivalent;
                            break;
                        }
                        Verdict::NotEquivalent => saw_no = true,
                        Verdict::Unparseable => {}
                    }
                }
                Err(e) => {
                    judge_calls += 1;
                    backend_error = true;
                    judge_raw = e.to_string();
                }
            }
        }
        if verdict != Verdict::Equivalent {
            verdict = if backend_error && !saw_no {
                Verdict::Unparseable
            } else if saw_no {
                Verdict::NotEquivalent
            } else {
                Verdict::Unparseable
            };
        }
        JudgedPrediction {
            record_id: prediction.record_id.clone(),
            strategy: prediction.strategy,
            run_index,
            verdict,
            judge_raw,
            judge_calls,
            flags: JudgeFlags {
                generation_failed: false,
                judge_backend_error: backend_error,
            },
        }
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(predictions.par_iter().map(judge_one).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(predictions.iter().map(judge_one).collect())
    }
}

/// Per-strategy mean and population standard deviation of per-run accuracy.
/// Every (strategy, record) pair must carry exactly `runs` verdicts.
pub fn aggregate(
    judged: &[JudgedPrediction],
    runs: u32,
) -> Result<Vec<AggregateScore>, JudgeError> {
    if judged.is_empty() {
        return Err(JudgeError::Empty);
    }
    if runs == 0 {
        return Err(JudgeError::MissingRunCoverage {
            strategy: judged[0].strategy,
            record_id: String::new(),
            expected: 0,
            found: judged.len(),
        });
    }
    let mut by_strategy: BTreeMap<StrategyName, Vec<&JudgedPrediction>> = BTreeMap::new();
    for j in judged {
        by_strategy.entry(j.strategy).or_default().push(j);
    }

    let mut scores = Vec::new();
    for (strategy, items) in by_strategy {
        let record_ids: BTreeSet<&str> =
            items.iter().map(|j| j.record_id.as_str()).collect();
        // coverage check: exactly `runs` verdicts per record, one per run
        let mut seen: BTreeMap<(&str, u32), usize> = BTreeMap::new();
        for j in &items {
            *seen.entry((j.record_id.as_str(), j.run_index)).or_insert(0) += 1;
        }
        for id in &record_ids {
            let found: usize = (0..runs)
                .map(|run| seen.get(&(*id, run)).copied().unwrap_or(0))
                .sum();
            let complete =
                found == runs as usize && (0..runs).all(|run| seen.get(&(*id, run)) == Some(&1));
            if !complete {
                return Err(JudgeError::MissingRunCoverage {
                    strategy,
                    record_id: id.to_string(),
                    expected: runs,
                    found,
                });
            }
        }
        let n_records = record_ids.len();
        let mut run_accuracies = Vec::with_capacity(runs as usize);
        for run in 0..runs {
            let correct = items
                .iter()
                .filter(|j| j.run_index == run && j.verdict.is_correct())
                .count();
            run_accuracies.push(correct as f64 / n_records as f64);
        }
        let mean = run_accuracies.iter().sum::<f64>() / runs as f64;
        let variance = run_accuracies
            .iter()
            .map(|a| (a - mean) * (a - mean))
            .sum::<f64>()
            / runs as f64;
        scores.push(AggregateScore {
            strategy,
            mean_accuracy: mean,
            std_dev: variance.sqrt(),
            n_runs: runs,
            n_records,
        });
    }
    Ok(scores)
}

/// One row of a judge-calibration sheet: a sampled judged item for a human
/// to rate, plus the rating once filled in.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationItem {
    pub record_id: String,
    pub strategy: StrategyName,
    pub run_index: u32,
    pub question: String,
    pub model_answer: String,
    pub gold: Vec<String>,
    pub judge_verdict: Verdict,
    /// Human rating: true when the human agrees the answers are equivalent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_equivalent: Option<bool>,
}

/// Samples up to `n` judged items for human rating, deterministically for a
/// given seed.
pub fn calibration_sheet(
    judged: &[JudgedPrediction],
    predictions: &[Prediction],
    records: &[QuestionRecord],
    n: usize,
    seed: u64,
) -> Vec<CalibrationItem> {
    let answers: BTreeMap<(&str, StrategyName, u32), &str> = predictions
        .iter()
        .map(|p| ((p.record_id.as_str(), p.strategy, p.run_index), p.answer.as_str()))
        .collect();
    let by_id: BTreeMap<&str, &QuestionRecord> =
        records.iter().map(|r| (r.id.as_str(), r)).collect();

    let mut order: Vec<usize> = (0..judged.len()).collect();
    // xorshift64* shuffle: deterministic, dependency-free
    let mut state = seed | 1;
    let mut next = move || {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        state = state.wrapping_mul(0x2545_F491_4F6C_DD1D);
        state
    };
    for i in (1..order.len()).rev() {
        let j = (next() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }

    order
        .into_iter()
        .filter_map(|idx| {
            let j = &judged[idx];
            let record = by_id.get(j.record_id.as_str())?;
            let answer = answers.get(&(j.record_id.as_str(), j.strategy, j.run_index))?;
            Some(CalibrationItem {
                record_id: j.record_id.clone(),
                strategy: j.strategy,
                run_index: j.run_index,
                question: record.question.clone(),
                model_answer: answer.to_string(),
                gold: record.gold.clone(),
                judge_verdict: j.verdict,
                human_equivalent: None,
            })
        })
        .take(n)
        .collect()
}

/// Fraction of human-rated items where the judge agrees, or None when
/// nothing is rated yet.
pub fn calibration_agreement(items: &[CalibrationItem]) -> Option<f64> {
    let rated: Vec<&CalibrationItem> = items
        .iter()
        .filter(|i| i.human_equivalent.is_some())
        .collect();
    if rated.is_empty() {
        return None;
    }
    let agree = rated
        .iter()
        .filter(|i| {
            let judge_yes = i.judge_verdict == Verdict::Equivalent;
            i.human_equivalent == Some(judge_yes)
        })
        .count();
    Some(agree as f64 / rated.len() as f64)
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equivalent => "equivalent",
            Verdict::NotEquivalent => "not_equivalent",
            Verdict::Unparseable => "unparseable",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{MockBackend, RetryPolicy};
    use crate::dataset::{Split, Task};
    use crate::pipeline::Trace;
    use crate::prompt::ExemplarBank;
    use std::sync::Arc;

    fn record(id: &str, gold: Vec<&str>) -> QuestionRecord {
        QuestionRecord {
            id: id.into(),
            task: Task::Musique,
            question: format!("question {id}?"),
            choices: None,
            gold: gold.into_iter().map(String::from).collect(),
            split: Split::Dev,
            difficulty: None,
        }
    }

    fn prediction(record_id: &str, answer: &str, run: u32) -> Prediction {
        Prediction {
            record_id: record_id.into(),
            strategy: StrategyName::Baseline,
            run_index: run,
            answer: answer.into(),
            trace: Trace::default(),
            error: None,
        }
    }

    fn judged(strategy: StrategyName, record_id: &str, run: u32, verdict: Verdict) -> JudgedPrediction {
        JudgedPrediction {
            record_id: record_id.into(),
            strategy,
            run_index: run,
            verdict,
            judge_raw: String::new(),
            judge_calls: 1,
            flags: JudgeFlags::default(),
        }
    }

    #[test]
    fn verdict_parsing_follows_first_token_rule() {
        assert_eq!(parse_judge_verdict("Yes"), Verdict::Equivalent);
        assert_eq!(parse_judge_verdict("No, they differ."), Verdict::NotEquivalent);
        assert_eq!(parse_judge_verdict("Possibly."), Verdict::Unparseable);
        assert_eq!(parse_judge_verdict("  YES!"), Verdict::Equivalent);
        assert_eq!(parse_judge_verdict("no"), Verdict::NotEquivalent);
        assert_eq!(parse_judge_verdict("I would say yes."), Verdict::Equivalent);
        // embedded substrings never match
        assert_eq!(parse_judge_verdict("yesterday Nothing"), Verdict::Unparseable);
        assert_eq!(parse_judge_verdict("Notably unclear"), Verdict::Unparseable);
        assert_eq!(parse_judge_verdict(""), Verdict::Unparseable);
    }

    #[test]
    fn first_equivalent_gold_alias_wins() {
        let templates = TemplateRegistry::builtin();
        let bank = ExemplarBank::builtin();
        let pairs = bank.judge_pairs();
        let mock = MockBackend::new("judge");
        // alias "A" scores No, alias "B" scores Yes
        mock.script_substring("Answer 2: A", "No");
        mock.script_substring("Answer 2: B", "Yes");
        let counter = mock.call_counter();
        let mut backends = BackendRegistry::new().with_retry(RetryPolicy::immediate(3));
        backends.register(Arc::new(mock));

        let records = vec![record("r1", vec!["A", "B"])];
        let predictions = vec![prediction("r1", "model output", 0)];
        let out = score_run(
            &predictions,
            &records,
            &templates,
            &pairs,
            &backends,
            "judge",
            &judge_decode_params(),
            0,
        )
        .unwrap();
        assert_eq!(out[0].verdict, Verdict::Equivalent);
        assert_eq!(out[0].judge_calls, 2);
        assert_eq!(counter.count(), 2);
    }

    #[test]
    fn failed_generation_scores_incorrect_without_judging() {
        let templates = TemplateRegistry::builtin();
        let bank = ExemplarBank::builtin();
        let pairs = bank.judge_pairs();
        let mock = MockBackend::new("judge");
        let counter = mock.call_counter();
        let mut backends = BackendRegistry::new();
        backends.register(Arc::new(mock));

        let records = vec![record("r1", vec!["A"])];
        let mut failed = prediction("r1", "", 0);
        failed.error = Some(crate::pipeline::StageFailure {
            stage: "answer".into(),
            message: "injected".into(),
        });
        let out = score_run(
            &[failed],
            &records,
            &templates,
            &pairs,
            &backends,
            "judge",
            &judge_decode_params(),
            0,
        )
        .unwrap();
        assert_eq!(out[0].verdict, Verdict::NotEquivalent);
        assert!(out[0].flags.generation_failed);
        assert_eq!(counter.count(), 0);
    }

    #[test]
    fn judge_backend_error_flags_item_unparseable() {
        let templates = TemplateRegistry::builtin();
        let bank = ExemplarBank::builtin();
        let pairs = bank.judge_pairs();
        let mock = MockBackend::new("judge");
        mock.fail_next("", 99, false);
        let mut backends = BackendRegistry::new().with_retry(RetryPolicy::immediate(2));
        backends.register(Arc::new(mock));

        let records = vec![record("r1", vec!["A"])];
        let out = score_run(
            &[prediction("r1", "x", 0)],
            &records,
            &templates,
            &pairs,
            &backends,
            "judge",
            &judge_decode_params(),
            0,
        )
        .unwrap();
        assert_eq!(out[0].verdict, Verdict::Unparseable);
        assert!(out[0].flags.judge_backend_error);
    }

    #[test]
    fn missing_gold_is_an_error() {
        let templates = TemplateRegistry::builtin();
        let bank = ExemplarBank::builtin();
        let pairs = bank.judge_pairs();
        let backends = BackendRegistry::new();
        let err = score_run(
            &[prediction("ghost", "x", 0)],
            &[],
            &templates,
            &pairs,
            &backends,
            "judge",
            &judge_decode_params(),
            0,
        )
        .unwrap_err();
        assert!(matches!(err, JudgeError::MissingGold(id) if id == "ghost"));
    }

    #[test]
    fn all_yes_gives_accuracy_one() {
        let templates = TemplateRegistry::builtin();
        let bank = ExemplarBank::builtin();
        let pairs = bank.judge_pairs();
        let mock = MockBackend::new("judge");
        mock.script_substring("", "Yes");
        let mut backends = BackendRegistry::new();
        backends.register(Arc::new(mock));

        let records: Vec<QuestionRecord> =
            (0..10).map(|i| record(&format!("r{i}"), vec!["A"])).collect();
        let predictions: Vec<Prediction> = (0..10)
            .map(|i| prediction(&format!("r{i}"), "answer", 0))
            .collect();
        let out = score_run(
            &predictions,
            &records,
            &templates,
            &pairs,
            &backends,
            "judge",
            &judge_decode_params(),
            0,
        )
        .unwrap();
        let scores = aggregate(&out, 1).unwrap();
        assert_eq!(scores[0].mean_accuracy, 1.0);
        assert_eq!(scores[0].std_dev, 0.0);
        assert_eq!(scores[0].n_records, 10);
    }

    #[test]
    fn aggregate_constant_runs_has_zero_std() {
        let mut judged_items = Vec::new();
        for run in 0..5 {
            for i in 0..5 {
                let verdict = if i < 4 { Verdict::Equivalent } else { Verdict::NotEquivalent };
                judged_items.push(judged(StrategyName::Baseline, &format!("r{i}"), run, verdict));
            }
        }
        let scores = aggregate(&judged_items, 5).unwrap();
        assert!((scores[0].mean_accuracy - 0.8).abs() < 1e-15);
        assert_eq!(scores[0].std_dev, 0.0);
    }

    #[test]
    fn aggregate_two_runs_population_std() {
        // run accuracies {0.6, 0.8} over 5 records -> mean 0.7, population
        // std 0.1 (hand-computed)
        let mut judged_items = Vec::new();
        for i in 0..5 {
            let v0 = if i < 3 { Verdict::Equivalent } else { Verdict::NotEquivalent };
            let v1 = if i < 4 { Verdict::Equivalent } else { Verdict::NotEquivalent };
            judged_items.push(judged(StrategyName::Cot, &format!("r{i}"), 0, v0));
            judged_items.push(judged(StrategyName::Cot, &format!("r{i}"), 1, v1));
        }
        let scores = aggregate(&judged_items, 2).unwrap();
        assert!((scores[0].mean_accuracy - 0.7).abs() < 1e-12);
        assert!((scores[0].std_dev - 0.1).abs() < 1e-12);
    }

    #[test]
    fn aggregate_rejects_missing_coverage() {
        let items = vec![
            judged(StrategyName::Baseline, "r1", 0, Verdict::Equivalent),
            // r1 run 1 missing
        ];
        assert!(matches!(
            aggregate(&items, 2).unwrap_err(),
            JudgeError::MissingRunCoverage { .. }
        ));
    }

    #[test]
    fn flipping_a_verdict_up_never_decreases_mean() {
        let mut items = Vec::new();
        for run in 0..3 {
            for i in 0..4 {
                let verdict = if (i + run) % 2 == 0 {
                    Verdict::Equivalent
                } else {
                    Verdict::NotEquivalent
                };
                items.push(judged(StrategyName::Tdb, &format!("r{i}"), run, verdict));
            }
        }
        let base = aggregate(&items, 3).unwrap()[0].mean_accuracy;
        for idx in 0..items.len() {
            if items[idx].verdict == Verdict::NotEquivalent {
                let mut flipped = items.clone();
                flipped[idx].verdict = Verdict::Equivalent;
                let new_mean = aggregate(&flipped, 3).unwrap()[0].mean_accuracy;
                assert!(new_mean >= base);
            }
        }
    }

    #[test]
    fn swapping_answer_slots_changes_prompt_not_accept_structure() {
        let templates = TemplateRegistry::builtin();
        let bank = ExemplarBank::builtin();
        let pairs = bank.judge_pairs();
        let forward = templates
            .render_judge_prompt("Q?", "model output", "gold label", &pairs)
            .unwrap();
        let swapped = templates
            .render_judge_prompt("Q?", "gold label", "model output", &pairs)
            .unwrap();
        assert_ne!(forward.text, swapped.text);
        // the scoring loop accepts on any equivalent verdict regardless of
        // slot order: a judge answering Yes yields the same verdict both ways
        let mock = MockBackend::new("judge");
        mock.script_substring("", "Yes");
        let mut backends = BackendRegistry::new();
        backends.register(Arc::new(mock));
        let records = vec![record("r1", vec!["gold label"])];
        for answer in ["model output", "gold label"] {
            let out = score_run(
                &[prediction("r1", answer, 0)],
                &records,
                &templates,
                &pairs,
                &backends,
                "judge",
                &judge_decode_params(),
                0,
            )
            .unwrap();
            assert_eq!(out[0].verdict, Verdict::Equivalent);
        }
    }

    #[test]
    fn accuracy_formatting_matches_display_convention() {
        assert_eq!(format_accuracy(0.732, 0.019), "73.2% (1.9%)");
        assert_eq!(format_accuracy(0.664, 0.008), "66.4% (0.8%)");
        assert_eq!(format_accuracy(0.575, 0.003), "57.5% (0.3%)");
        assert_eq!(format_accuracy(0.818, 0.014), "81.8% (1.4%)");
        assert_eq!(format_accuracy(1.0, 0.0), "100.0% (0.0%)");
    }

    #[test]
    fn calibration_sheet_is_deterministic_and_bounded() {
        let records: Vec<QuestionRecord> =
            (0..8).map(|i| record(&format!("r{i}"), vec!["A"])).collect();
        let predictions: Vec<Prediction> =
            (0..8).map(|i| prediction(&format!("r{i}"), "ans", 0)).collect();
        let judged_items: Vec<JudgedPrediction> = (0..8)
            .map(|i| judged(StrategyName::Baseline, &format!("r{i}"), 0, Verdict::Equivalent))
            .collect();
        let a = calibration_sheet(&judged_items, &predictions, &records, 4, 42);
        let b = calibration_sheet(&judged_items, &predictions, &records, 4, 42);
        assert_eq!(a.len(), 4);
        assert_eq!(
            a.iter().map(|i| i.record_id.clone()).collect::<Vec<_>>(),
            b.iter().map(|i| i.record_id.clone()).collect::<Vec<_>>()
        );
        let different_seed = calibration_sheet(&judged_items, &predictions, &records, 8, 43);
        assert_eq!(different_seed.len(), 8);
        // agreement over a hand-built sheet
        let mut sheet = a;
        sheet[0].human_equivalent = Some(true); // judge said equivalent -> agree
        sheet[1].human_equivalent = Some(false); // disagree
        assert_eq!(calibration_agreement(&sheet), Some(0.5));
        assert_eq!(calibration_agreement(&sheet[2..]), None);
    }
}
