//! `report`: summary tables and charts, win/loss comparisons, and error
//! breakdowns over a finalized run directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use stepback::analysis::{
    error_breakdown, load_annotations, win_loss, ErrorAnnotation, TaskFamily, WinLossMatrix,
};
use stepback::judge::JudgedPrediction;
use stepback::pipeline::StrategyName;
use stepback::report::{bar_chart_svg, error_breakdown_tsv, win_loss_text};

use crate::run::{read_judged, AggregatesFile};
use crate::validate::results_finalized;

pub struct ReportOptions {
    pub compare: Vec<(String, String)>,
    pub annotations: Option<PathBuf>,
    pub annotation_family: Option<TaskFamily>,
    /// Majority-over-runs correctness instead of run-0 verdicts.
    pub majority: bool,
}

#[derive(Serialize)]
struct WinLossFile {
    dataset: String,
    config_digest: String,
    verdict_source: &'static str,
    #[serde(flatten)]
    matrix: WinLossMatrix,
}

pub fn cmd_report(dir: &Path, options: &ReportOptions) -> Result<()> {
    if !results_finalized(dir) {
        bail!("results in {dir:?} are not finalized (INCOMPLETE marker present or run_meta.json missing)");
    }
    let report_dir = dir.join("report");
    fs::create_dir_all(&report_dir)?;

    // summary: per-task per-strategy means as data and as a static chart
    let aggregates: AggregatesFile =
        serde_json::from_str(&fs::read_to_string(dir.join("aggregates.json"))?)
            .context("reading aggregates.json")?;
    let digest = aggregates.config_digest.clone();
    let provenance = format!("# config_digest: {digest}\n");
    let mut tsv = format!("{provenance}task\tstrategy\tmean_accuracy\tstd_dev\tdisplay\n");
    let mut bars = Vec::new();
    for row in &aggregates.rows {
        tsv.push_str(&format!(
            "{}\t{}\t{:.6}\t{:.6}\t{}\n",
            row.task, row.strategy, row.mean_accuracy, row.std_dev, row.display
        ));
        bars.push((format!("{}/{}", row.task, row.strategy), row.mean_accuracy));
    }
    fs::write(report_dir.join("summary.tsv"), &tsv)?;
    fs::write(
        report_dir.join("summary.svg"),
        format!(
            "<!-- config_digest: {digest} -->\n{}",
            bar_chart_svg("mean accuracy per task and strategy", &bars)
        ),
    )?;
    println!("wrote {}", report_dir.join("summary.tsv").display());

    // win/loss matrices for requested strategy pairs, per dataset
    if !options.compare.is_empty() {
        let judged_dir = dir.join("judged");
        for entry in fs::read_dir(&judged_dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
                continue;
            }
            let stem = path.file_stem().unwrap().to_string_lossy().to_string();
            let judged = read_judged(&path)?;
            for (a, b) in &options.compare {
                let matrix = compare_pair(&judged, a, b, options.majority)
                    .with_context(|| format!("comparing {a} vs {b} on {stem}"))?;
                let base = report_dir.join(format!("winloss_{stem}_{a}_vs_{b}"));
                fs::write(
                    base.with_extension("txt"),
                    format!("{provenance}{}", win_loss_text(&matrix)),
                )?;
                let file = WinLossFile {
                    dataset: stem.clone(),
                    config_digest: digest.clone(),
                    verdict_source: if options.majority { "majority" } else { "run0" },
                    matrix,
                };
                fs::write(
                    base.with_extension("json"),
                    serde_json::to_string_pretty(&file)?,
                )?;
                println!("wrote {}", base.with_extension("txt").display());
            }
        }
    }

    // error breakdowns when an annotation file is supplied
    match &options.annotations {
        None => println!("no annotations supplied; error-breakdown section omitted"),
        Some(path) if !path.exists() => {
            println!("annotation file {path:?} missing; error-breakdown section omitted");
        }
        Some(path) => {
            let annotations = load_annotations(path)?;
            emit_breakdowns(&report_dir, &annotations, options.annotation_family, &provenance)?;
        }
    }
    Ok(())
}

fn correctness(
    judged: &[JudgedPrediction],
    strategy: StrategyName,
    majority: bool,
) -> BTreeMap<String, bool> {
    let mut per_record: BTreeMap<String, Vec<bool>> = BTreeMap::new();
    for j in judged.iter().filter(|j| j.strategy == strategy) {
        if majority || j.run_index == 0 {
            per_record
                .entry(j.record_id.clone())
                .or_default()
                .push(j.verdict.is_correct());
        }
    }
    per_record
        .into_iter()
        .map(|(id, votes)| {
            let correct = votes.iter().filter(|&&v| v).count() * 2 > votes.len();
            (id, correct)
        })
        .collect()
}

fn compare_pair(
    judged: &[JudgedPrediction],
    a: &str,
    b: &str,
    majority: bool,
) -> Result<WinLossMatrix> {
    let name_a = StrategyName::parse(a)
        .with_context(|| format!("unknown strategy {a:?}"))?;
    let name_b = StrategyName::parse(b)
        .with_context(|| format!("unknown strategy {b:?}"))?;
    let map_a = correctness(judged, name_a, majority);
    let map_b = correctness(judged, name_b, majority);
    if map_a.is_empty() {
        bail!("no judged predictions for strategy {a}");
    }
    if map_b.is_empty() {
        bail!("no judged predictions for strategy {b}");
    }
    Ok(win_loss(a, &map_a, b, &map_b)?)
}

fn emit_breakdowns(
    report_dir: &Path,
    annotations: &[ErrorAnnotation],
    family_flag: Option<TaskFamily>,
    provenance: &str,
) -> Result<()> {
    let mut by_strategy: BTreeMap<String, Vec<ErrorAnnotation>> = BTreeMap::new();
    for annotation in annotations {
        by_strategy
            .entry(annotation.strategy.clone())
            .or_default()
            .push(annotation.clone());
    }
    for (strategy, group) in by_strategy {
        let family = match family_flag.or_else(|| infer_family(&group)) {
            Some(f) => f,
            None => bail!(
                "annotations for strategy {strategy} are ambiguous (only shared categories); pass --annotation-family"
            ),
        };
        let breakdown = error_breakdown(family, &group)?;
        let base = report_dir.join(format!("errors_{strategy}"));
        fs::write(
            base.with_extension("tsv"),
            format!("{provenance}{}", error_breakdown_tsv(&breakdown)),
        )?;
        let bars: Vec<(String, f64)> = breakdown
            .rows
            .iter()
            .map(|row| {
                (
                    row.category.label().to_string(),
                    row.percentage.unwrap_or(0.0) / 100.0,
                )
            })
            .collect();
        fs::write(
            base.with_extension("svg"),
            bar_chart_svg(&format!("error categories: {strategy}"), &bars),
        )?;
        println!("wrote {}", base.with_extension("tsv").display());
    }
    Ok(())
}

/// The family is unambiguous as soon as one family-exclusive category
/// appears; a group of only `reasoning` annotations needs the flag.
fn infer_family(annotations: &[ErrorAnnotation]) -> Option<TaskFamily> {
    for family in [TaskFamily::Stem, TaskFamily::Knowledge] {
        let other = match family {
            TaskFamily::Stem => TaskFamily::Knowledge,
            TaskFamily::Knowledge => TaskFamily::Stem,
        };
        if annotations
            .iter()
            .any(|a| a.category.in_family(family) && !a.category.in_family(other))
        {
            return Some(family);
        }
    }
    None
}
