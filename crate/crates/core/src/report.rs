//! Plain-text tables and static SVG charts for run reports.
//!
//! Output is deterministic: same inputs, same bytes.

use crate::analysis::{ErrorBreakdown, WinLossMatrix};
use crate::dataset::Task;
use crate::judge::AggregateScore;

/// Rows of (task, score) pairs rendered as an aligned table in the
/// `Method | accuracy` style, one block per task.
pub fn aggregate_table(rows: &[(Task, AggregateScore)]) -> String {
    let mut out = String::new();
    let mut width_strategy = "Method".len();
    for (_, score) in rows {
        width_strategy = width_strategy.max(score.strategy.name().len());
    }
    let mut current_task: Option<Task> = None;
    for (task, score) in rows {
        if current_task != Some(*task) {
            if current_task.is_some() {
                out.push('\n');
            }
            out.push_str(&format!(
                "== {} (n={}, runs={}) ==\n",
                task, score.n_records, score.n_runs
            ));
            out.push_str(&format!(
                "{:<width$}  {}\n",
                "Method",
                "Accuracy",
                width = width_strategy
            ));
            current_task = Some(*task);
        }
        out.push_str(&format!(
            "{:<width$}  {}\n",
            score.strategy.name(),
            score.display(),
            width = width_strategy
        ));
    }
    out
}

/// Machine-readable aggregate rows: task, strategy, mean, std, runs, records.
pub fn aggregate_tsv(rows: &[(Task, AggregateScore)]) -> String {
    let mut out = String::from("task\tstrategy\tmean_accuracy\tstd_dev\tn_runs\tn_records\n");
    for (task, score) in rows {
        out.push_str(&format!(
            "{}\t{}\t{:.6}\t{:.6}\t{}\t{}\n",
            task,
            score.strategy.name(),
            score.mean_accuracy,
            score.std_dev,
            score.n_runs,
            score.n_records
        ));
    }
    out
}

pub fn win_loss_text(m: &WinLossMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} vs {}\n", m.strategy_a, m.strategy_b));
    out.push_str(&format!("  both correct : {}\n", m.both_correct));
    out.push_str(&format!("  {} only      : {}\n", m.strategy_a, m.a_only));
    out.push_str(&format!("  {} only      : {}\n", m.strategy_b, m.b_only));
    out.push_str(&format!("  both wrong   : {}\n", m.both_wrong));
    out.push_str(&format!(
        "  fixed  : {:.1}% of all records ({} of {})\n",
        m.fixed_pct,
        m.a_only,
        m.n_records()
    ));
    out.push_str(&format!(
        "  broken : {:.1}% of all records ({} of {})\n",
        m.broken_pct,
        m.b_only,
        m.n_records()
    ));
    if let Some(pct) = m.fixed_pct_of_b_errors {
        out.push_str(&format!(
            "  fixed, errors-only denominator : {:.1}% of {} errors\n",
            pct,
            m.a_only + m.both_wrong
        ));
    }
    if let Some(pct) = m.broken_pct_of_b_correct {
        out.push_str(&format!(
            "  broken, correct-only denominator : {:.1}% of {} correct\n",
            pct,
            m.b_only + m.both_correct
        ));
    }
    out
}

/// Minimal static bar chart. `bars` are (label, value in [0, 1]) pairs.
pub fn bar_chart_svg(title: &str, bars: &[(String, f64)]) -> String {
    const BAR_WIDTH: usize = 48;
    const GAP: usize = 16;
    const CHART_HEIGHT: usize = 220;
    const MARGIN: usize = 36;
    let width = MARGIN * 2 + bars.len().max(1) * (BAR_WIDTH + GAP);
    let height = CHART_HEIGHT + 90;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"14\">{}</text>\n",
        MARGIN,
        xml_escape(title)
    ));
    out.push_str(&format!(
        "  <line x1=\"{MARGIN}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>\n",
        CHART_HEIGHT + 30,
        width - MARGIN,
        CHART_HEIGHT + 30
    ));
    for (i, (label, value)) in bars.iter().enumerate() {
        let clamped = value.clamp(0.0, 1.0);
        let bar_h = (clamped * CHART_HEIGHT as f64).round() as usize;
        let x = MARGIN + i * (BAR_WIDTH + GAP);
        let y = CHART_HEIGHT + 30 - bar_h;
        out.push_str(&format!(
            "  <rect x=\"{x}\" y=\"{y}\" width=\"{BAR_WIDTH}\" height=\"{bar_h}\" fill=\"#4878a8\"/>\n"
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{:.1}%</text>\n",
            x + BAR_WIDTH / 2,
            y.saturating_sub(6).max(32),
            clamped * 100.0
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\" transform=\"rotate(-40 {} {})\">{}</text>\n",
            x + BAR_WIDTH / 2,
            CHART_HEIGHT + 44,
            x + BAR_WIDTH / 2,
            CHART_HEIGHT + 44,
            xml_escape(label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

pub fn error_breakdown_tsv(breakdown: &ErrorBreakdown) -> String {
    let mut out = String::from("category\tcount\tpercentage\n");
    for row in &breakdown.rows {
        match row.percentage {
            Some(pct) => out.push_str(&format!("{}\t{}\t{:.1}\n", row.category.label(), row.count, pct)),
            None => out.push_str(&format!("{}\t{}\tundefined\n", row.category.label(), row.count)),
        }
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::StrategyName;

    fn score(strategy: StrategyName, mean: f64, std: f64) -> AggregateScore {
        AggregateScore {
            strategy,
            mean_accuracy: mean,
            std_dev: std,
            n_runs: 5,
            n_records: 151,
        }
    }

    #[test]
    fn table_groups_by_task_and_formats_cells() {
        let rows = vec![
            (Task::MmluPhysics, score(StrategyName::Baseline, 0.664, 0.008)),
            (Task::MmluPhysics, score(StrategyName::Stepback, 0.732, 0.019)),
            (Task::Timeqa, score(StrategyName::StepbackRag, 0.687, 0.0)),
        ];
        let table = aggregate_table(&rows);
        assert!(table.contains("== mmlu_physics (n=151, runs=5) =="));
        assert!(table.contains("66.4% (0.8%)"));
        assert!(table.contains("73.2% (1.9%)"));
        assert!(table.contains("== timeqa"));
        assert!(table.contains("68.7% (0.0%)"));
        let tsv = aggregate_tsv(&rows);
        assert!(tsv.starts_with("task\tstrategy"));
        assert_eq!(tsv.lines().count(), 4);
    }

    #[test]
    fn svg_is_deterministic_and_escapes_labels() {
        let bars = vec![("a<b".to_string(), 0.5), ("plain".to_string(), 1.2)];
        let one = bar_chart_svg("title & more", &bars);
        let two = bar_chart_svg("title & more", &bars);
        assert_eq!(one, two);
        assert!(one.contains("a&lt;b"));
        assert!(one.contains("title &amp; more"));
        // out-of-range values clamp
        assert!(one.contains("100.0%"));
    }
}
