//! `calibrate`: sample judged items into a rating sheet for humans, then
//! report judge/human agreement once ratings are filled in.
//!
//! First invocation writes `calibration_sheet.jsonl` with
//! `human_equivalent` left null on every line. A human fills the field in
//! (true/false); the next invocation reports the agreement percentage.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use stepback::dataset::QuestionRecord;
use stepback::judge::{calibration_agreement, calibration_sheet, CalibrationItem};
use stepback::pipeline::{store, Prediction};

use crate::run::read_judged;
use crate::validate::results_finalized;

pub fn cmd_calibrate(dir: &Path, sample: usize, seed: u64) -> Result<()> {
    if !results_finalized(dir) {
        bail!("results in {dir:?} are not finalized");
    }
    let sheet_path = dir.join("calibration_sheet.jsonl");
    if sheet_path.exists() {
        let mut items: Vec<CalibrationItem> = Vec::new();
        for (idx, line) in fs::read_to_string(&sheet_path)?.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            items.push(
                serde_json::from_str(line)
                    .with_context(|| format!("sheet line {}", idx + 1))?,
            );
        }
        match calibration_agreement(&items) {
            Some(agreement) => {
                let rated = items.iter().filter(|i| i.human_equivalent.is_some()).count();
                println!(
                    "judge/human agreement: {:.1}% over {rated} rated items ({} total)",
                    agreement * 100.0,
                    items.len()
                );
            }
            None => println!(
                "calibration sheet exists but no human_equivalent ratings are filled in yet ({})",
                sheet_path.display()
            ),
        }
        return Ok(());
    }

    // build a fresh sheet from the run artifacts
    let mut predictions: Vec<Prediction> = Vec::new();
    for entry in fs::read_dir(dir.join("predictions"))? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("jsonl") {
            predictions.extend(store::read_predictions(&path)?.0);
        }
    }
    let mut judged = Vec::new();
    for entry in fs::read_dir(dir.join("judged"))? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("jsonl") {
            judged.extend(read_judged(&path)?);
        }
    }
    let mut records: Vec<QuestionRecord> = Vec::new();
    for entry in fs::read_dir(dir.join("records"))? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("jsonl") {
            // the loader only reads path and expected_count; task and split
            // come from each record
            let manifest = stepback::dataset::DatasetManifest {
                task: stepback::dataset::Task::Timeqa,
                split: stepback::dataset::Split::Test,
                path: path.clone(),
                expected_count: None,
                source_version: None,
            };
            records.extend(stepback::dataset::load_dataset(&manifest)?);
        }
    }

    let items = calibration_sheet(&judged, &predictions, &records, sample, seed);
    if items.is_empty() {
        bail!("nothing to sample: no judged predictions found under {dir:?}");
    }
    let mut out = String::new();
    for item in &items {
        out.push_str(&serde_json::to_string(item)?);
        out.push('\n');
    }
    fs::write(&sheet_path, out)?;
    println!(
        "wrote {} with {} items; fill in human_equivalent (true/false) and rerun",
        sheet_path.display(),
        items.len()
    );
    Ok(())
}
