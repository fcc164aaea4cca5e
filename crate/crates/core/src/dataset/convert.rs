//! Converters from the upstream public distributions into the canonical
//! record format.
//!
//! Each converter understands exactly one upstream layout and emits
//! [`QuestionRecord`]s; [`write_converted`] persists them and returns a
//! manifest pinned to the produced count. Callers must supply the upstream
//! snapshot identifier; the version is recorded, never guessed.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::Deserialize;

use super::{
    write_dataset, DatasetError, DatasetManifest, Difficulty, QuestionRecord, Split, Task,
};

#[derive(Debug, thiserror::Error)]
pub enum ConvertError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{0} is not a multiple-choice task")]
    NotMultipleChoice(Task),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

fn malformed(line: usize, message: impl Into<String>) -> ConvertError {
    ConvertError::Malformed {
        line,
        message: message.into(),
    }
}

/// MMLU distribution: headerless CSV rows of
/// `question, choice A, choice B, choice C, choice D, answer letter`.
///
/// Gold keeps two aliases per item: the numbered option (`1) 6.0 J`) and the
/// bare option text, since model answers commonly state either form.
pub fn convert_mmlu_csv<R: Read>(
    reader: R,
    task: Task,
    split: Split,
) -> Result<Vec<QuestionRecord>, ConvertError> {
    if !task.is_multiple_choice() {
        return Err(ConvertError::NotMultipleChoice(task));
    }
    let mut records = Vec::new();
    for (idx, row) in parse_csv(reader)?.into_iter().enumerate() {
        let line = idx + 1;
        if row.len() != 6 {
            return Err(malformed(line, format!("expected 6 fields, got {}", row.len())));
        }
        let question = row[0].trim().to_string();
        let choices: Vec<String> = row[1..5].iter().map(|c| c.trim().to_string()).collect();
        let letter = row[5].trim();
        let answer_idx = match letter {
            "A" => 0usize,
            "B" => 1,
            "C" => 2,
            "D" => 3,
            other => return Err(malformed(line, format!("bad answer letter {other:?}"))),
        };
        let gold = vec![
            format!("{}) {}", answer_idx, choices[answer_idx]),
            choices[answer_idx].clone(),
        ];
        records.push(QuestionRecord {
            id: format!("{}_{}_{:04}", task.name(), split.name(), idx),
            task,
            question,
            choices: Some(choices),
            gold,
            split,
            difficulty: None,
        });
    }
    Ok(records)
}

/// Minimal CSV reader: comma-separated, double-quote quoting with `""`
/// escapes, LF or CRLF record ends. Quoted fields may span lines.
fn parse_csv<R: Read>(reader: R) -> Result<Vec<Vec<String>>, ConvertError> {
    let mut text = String::new();
    BufReader::new(reader).read_to_string(&mut text)?;
    let mut rows = Vec::new();
    let mut row: Vec<String> = Vec::new();
    let mut field = String::new();
    let mut in_quotes = false;
    let mut chars = text.chars().peekable();
    while let Some(ch) = chars.next() {
        if in_quotes {
            match ch {
                '"' => {
                    if chars.peek() == Some(&'"') {
                        chars.next();
                        field.push('"');
                    } else {
                        in_quotes = false;
                    }
                }
                _ => field.push(ch),
            }
            continue;
        }
        match ch {
            '"' => in_quotes = true,
            ',' => {
                row.push(std::mem::take(&mut field));
            }
            '\r' => {}
            '\n' => {
                row.push(std::mem::take(&mut field));
                if !(row.len() == 1 && row[0].is_empty()) {
                    rows.push(std::mem::take(&mut row));
                } else {
                    row.clear();
                }
            }
            _ => field.push(ch),
        }
    }
    if in_quotes {
        return Err(malformed(rows.len() + 1, "unterminated quoted field"));
    }
    if !field.is_empty() || !row.is_empty() {
        row.push(field);
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Deserialize)]
struct Gsm8kRow {
    question: String,
    answer: String,
}

/// GSM8K distribution: JSONL with `question` and a worked `answer` whose
/// final line is `#### <result>`.
pub fn convert_gsm8k_jsonl<R: Read>(
    reader: R,
    split: Split,
) -> Result<Vec<QuestionRecord>, ConvertError> {
    let mut records = Vec::new();
    for (idx, row) in jsonl_rows::<Gsm8kRow, R>(reader)?.into_iter().enumerate() {
        let line = idx + 1;
        let marker = row
            .answer
            .rfind("####")
            .ok_or_else(|| malformed(line, "answer lacks a #### final-result marker"))?;
        let result = row.answer[marker + 4..].trim().to_string();
        if result.is_empty() {
            return Err(malformed(line, "empty final result after ####"));
        }
        let mut gold = vec![result.clone()];
        let without_commas = result.replace(',', "");
        if without_commas != result {
            gold.push(without_commas);
        }
        records.push(QuestionRecord {
            id: format!("gsm8k_{}_{:04}", split.name(), idx),
            task: Task::Gsm8k,
            question: row.question.trim().to_string(),
            choices: None,
            gold,
            split,
            difficulty: None,
        });
    }
    Ok(records)
}

#[derive(Deserialize)]
struct TimeqaRow {
    #[serde(default)]
    idx: Option<String>,
    question: String,
    targets: Vec<String>,
    level: String,
}

/// TimeQA distribution: JSONL with `question`, `targets` aliases, and a
/// `level` of `easy` or `hard` (an optional `idx` is kept when present).
pub fn convert_timeqa_jsonl<R: Read>(
    reader: R,
    split: Split,
) -> Result<Vec<QuestionRecord>, ConvertError> {
    let mut records = Vec::new();
    for (idx, row) in jsonl_rows::<TimeqaRow, R>(reader)?.into_iter().enumerate() {
        let line = idx + 1;
        let difficulty = match row.level.as_str() {
            "easy" => Difficulty::Easy,
            "hard" => Difficulty::Hard,
            other => return Err(malformed(line, format!("bad level {other:?}"))),
        };
        let gold: Vec<String> = row
            .targets
            .iter()
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .collect();
        if gold.is_empty() {
            return Err(malformed(line, "no non-empty targets"));
        }
        records.push(QuestionRecord {
            id: row
                .idx
                .unwrap_or_else(|| format!("timeqa_{}_{:05}", split.name(), idx)),
            task: Task::Timeqa,
            question: row.question.trim().to_string(),
            choices: None,
            gold,
            split,
            difficulty: Some(difficulty),
        });
    }
    Ok(records)
}

#[derive(Deserialize)]
struct SituatedqaRow {
    #[serde(default)]
    id: Option<String>,
    question: String,
    #[serde(alias = "answers")]
    answer: Vec<String>,
}

/// SituatedQA distribution: JSONL with `question` and an `answer` (or
/// `answers`) list of acceptable strings.
pub fn convert_situatedqa_jsonl<R: Read>(
    reader: R,
    split: Split,
) -> Result<Vec<QuestionRecord>, ConvertError> {
    let mut records = Vec::new();
    for (idx, row) in jsonl_rows::<SituatedqaRow, R>(reader)?.into_iter().enumerate() {
        let line = idx + 1;
        let gold: Vec<String> = row
            .answer
            .iter()
            .map(|a| a.trim().to_string())
            .filter(|a| !a.is_empty())
            .collect();
        if gold.is_empty() {
            return Err(malformed(line, "no non-empty answers"));
        }
        records.push(QuestionRecord {
            id: row
                .id
                .unwrap_or_else(|| format!("situatedqa_{}_{:05}", split.name(), idx)),
            task: Task::Situatedqa,
            question: row.question.trim().to_string(),
            choices: None,
            gold,
            split,
            difficulty: None,
        });
    }
    Ok(records)
}

#[derive(Deserialize)]
struct MusiqueRow {
    id: String,
    question: String,
    answer: String,
    #[serde(default)]
    answer_aliases: Vec<String>,
}

/// MuSiQue distribution: JSONL with `id`, `question`, `answer`, and optional
/// `answer_aliases`.
pub fn convert_musique_jsonl<R: Read>(
    reader: R,
    split: Split,
) -> Result<Vec<QuestionRecord>, ConvertError> {
    let mut records = Vec::new();
    for row in jsonl_rows::<MusiqueRow, R>(reader)? {
        let mut gold = vec![row.answer.trim().to_string()];
        for alias in row.answer_aliases {
            let alias = alias.trim().to_string();
            if !alias.is_empty() && !gold.contains(&alias) {
                gold.push(alias);
            }
        }
        records.push(QuestionRecord {
            id: row.id,
            task: Task::Musique,
            question: row.question.trim().to_string(),
            choices: None,
            gold,
            split,
            difficulty: None,
        });
    }
    Ok(records)
}

#[derive(Deserialize)]
struct StrategyqaRow {
    qid: String,
    question: String,
    answer: bool,
}

/// StrategyQA distribution: a JSON array of `{qid, question, answer: bool}`.
pub fn convert_strategyqa_json<R: Read>(
    reader: R,
    split: Split,
) -> Result<Vec<QuestionRecord>, ConvertError> {
    let mut text = String::new();
    BufReader::new(reader).read_to_string(&mut text)?;
    let rows: Vec<StrategyqaRow> =
        serde_json::from_str(&text).map_err(|e| malformed(0, e.to_string()))?;
    Ok(rows
        .into_iter()
        .map(|row| QuestionRecord {
            id: row.qid,
            task: Task::Strategyqa,
            question: row.question.trim().to_string(),
            choices: None,
            gold: vec![if row.answer { "Yes" } else { "No" }.to_string()],
            split,
            difficulty: None,
        })
        .collect())
}

fn jsonl_rows<T: serde::de::DeserializeOwned, R: Read>(reader: R) -> Result<Vec<T>, ConvertError> {
    let mut rows = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| malformed(idx + 1, e.to_string()))?);
    }
    Ok(rows)
}

/// Writes converted records as `<task>_<split>.jsonl` under `dir` and
/// returns a manifest pinned to the written count and snapshot id.
pub fn write_converted(
    dir: &Path,
    task: Task,
    split: Split,
    records: &[QuestionRecord],
    source_version: &str,
) -> Result<DatasetManifest, ConvertError> {
    let path = dir.join(format!("{}_{}.jsonl", task.name(), split.name()));
    write_dataset(&path, records)?;
    Ok(DatasetManifest {
        task,
        split,
        path,
        expected_count: Some(records.len()),
        source_version: Some(source_version.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset;

    #[test]
    fn mmlu_csv_converts_choices_and_gold() {
        let csv = "\"What happens, roughly?\",opt A,opt B,opt C,opt D,B\nsecond question,1,2,3,4,D\n";
        let records = convert_mmlu_csv(csv.as_bytes(), Task::MmluPhysics, Split::Test).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].question, "What happens, roughly?");
        assert_eq!(records[0].choices.as_ref().unwrap().len(), 4);
        assert_eq!(records[0].gold, vec!["1) opt B".to_string(), "opt B".to_string()]);
        assert_eq!(records[1].gold[0], "3) 4");
        for r in &records {
            r.validate().unwrap();
        }
    }

    #[test]
    fn mmlu_csv_rejects_bad_letter_and_wrong_task() {
        let csv = "q,a,b,c,d,E\n";
        assert!(convert_mmlu_csv(csv.as_bytes(), Task::MmluPhysics, Split::Test).is_err());
        assert!(matches!(
            convert_mmlu_csv("".as_bytes(), Task::Gsm8k, Split::Test),
            Err(ConvertError::NotMultipleChoice(Task::Gsm8k))
        ));
    }

    #[test]
    fn gsm8k_extracts_final_answer() {
        let jsonl = concat!(
            "{\"question\": \"How many stamps?\", \"answer\": \"11 + 9 = 20\\n#### 38\"}\n",
            "{\"question\": \"Big sum?\", \"answer\": \"work\\n#### 1,234\"}\n",
        );
        let records = convert_gsm8k_jsonl(jsonl.as_bytes(), Split::Test).unwrap();
        assert_eq!(records[0].gold, vec!["38".to_string()]);
        assert_eq!(records[1].gold, vec!["1,234".to_string(), "1234".to_string()]);
    }

    #[test]
    fn timeqa_maps_levels_and_targets() {
        let jsonl = concat!(
            "{\"idx\": \"q7\", \"question\": \"Who?\", \"targets\": [\"A\", \"B\"], \"level\": \"hard\"}\n",
            "{\"question\": \"When?\", \"targets\": [\"1999\"], \"level\": \"easy\"}\n",
        );
        let records = convert_timeqa_jsonl(jsonl.as_bytes(), Split::Test).unwrap();
        assert_eq!(records[0].id, "q7");
        assert_eq!(records[0].difficulty, Some(Difficulty::Hard));
        assert_eq!(records[0].gold, vec!["A".to_string(), "B".to_string()]);
        assert_eq!(records[1].difficulty, Some(Difficulty::Easy));
    }

    #[test]
    fn strategyqa_booleans_become_yes_no() {
        let json = "[{\"qid\": \"s1\", \"question\": \"Could it?\", \"answer\": true},\
                     {\"qid\": \"s2\", \"question\": \"Would it?\", \"answer\": false}]";
        let records = convert_strategyqa_json(json.as_bytes(), Split::Dev).unwrap();
        assert_eq!(records[0].gold, vec!["Yes".to_string()]);
        assert_eq!(records[1].gold, vec!["No".to_string()]);
    }

    #[test]
    fn musique_dedups_aliases() {
        let jsonl = "{\"id\": \"m1\", \"question\": \"Q?\", \"answer\": \"1994\", \"answer_aliases\": [\"1994\", \"the year 1994\"]}\n";
        let records = convert_musique_jsonl(jsonl.as_bytes(), Split::Dev).unwrap();
        assert_eq!(
            records[0].gold,
            vec!["1994".to_string(), "the year 1994".to_string()]
        );
    }

    #[test]
    fn situatedqa_accepts_answers_alias() {
        let jsonl = "{\"question\": \"q\", \"answers\": [\"x\"]}\n";
        let records = convert_situatedqa_jsonl(jsonl.as_bytes(), Split::Test).unwrap();
        assert_eq!(records[0].gold, vec!["x".to_string()]);
    }

    #[test]
    fn write_converted_round_trips_through_loader() {
        let dir = tempfile::tempdir().unwrap();
        let jsonl = "{\"question\": \"Who?\", \"targets\": [\"A\"], \"level\": \"easy\"}\n";
        let records = convert_timeqa_jsonl(jsonl.as_bytes(), Split::Test).unwrap();
        let manifest = write_converted(
            dir.path(),
            Task::Timeqa,
            Split::Test,
            &records,
            "snapshot-2021-06",
        )
        .unwrap();
        assert_eq!(manifest.expected_count, Some(1));
        assert_eq!(manifest.source_version.as_deref(), Some("snapshot-2021-06"));
        let loaded = load_dataset(&manifest).unwrap();
        assert_eq!(loaded, records);
    }
}
