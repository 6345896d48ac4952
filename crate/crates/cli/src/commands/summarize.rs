//! `summarize` — per-stratum counts, removal rates, and suspension rates.

use std::path::PathBuf;

use clap::Args;
use modaudit_core::corpus::{summarize_strata, ClassSummary, StratumSummary};
use serde_json::json;

use crate::commands::load_corpus_at;
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{path_str, write_csv, write_report, Cell};

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// Corpus file (CSV or JSONL); may also come from the config.
    #[arg(value_name = "CORPUS")]
    pub corpus: Option<PathBuf>,
}

/// Pooled counts for one class across all strata.
fn pool<F>(summaries: &[StratumSummary], class: F) -> serde_json::Value
where
    F: Fn(&StratumSummary) -> &ClassSummary,
{
    let count: u64 = summaries.iter().map(|s| class(s).count).sum();
    let removed: u64 = summaries.iter().map(|s| class(s).removed).sum();
    let rate = (count > 0).then(|| removed as f64 / count as f64);
    json!({ "count": count, "removed": removed, "removal_rate": rate })
}

fn class_cells(c: &ClassSummary) -> [Cell; 3] {
    [
        Cell::from(c.count),
        Cell::from(c.removed),
        Cell::from(c.removal_rate),
    ]
}

pub fn run(cfg: &RunConfig, args: &SummarizeArgs) -> CliResult<()> {
    let path = cfg.corpus_path(&args.corpus)?;
    let corpus = load_corpus_at(&path)?;
    let summaries = summarize_strata(&corpus);

    let header = [
        "stratum",
        "n",
        "hate_count",
        "hate_removed",
        "hate_removal_rate",
        "violent_hate_count",
        "violent_hate_removed",
        "violent_hate_removal_rate",
        "nonviolent_hate_count",
        "nonviolent_hate_removed",
        "nonviolent_hate_removal_rate",
        "offensive_count",
        "offensive_removed",
        "offensive_removal_rate",
        "neutral_count",
        "neutral_removed",
        "neutral_removal_rate",
        "suspended",
        "suspension_rate",
    ];
    let rows: Vec<Vec<Cell>> = summaries
        .iter()
        .map(|s| {
            let mut row = vec![Cell::from(s.stratum.as_str()), Cell::from(s.n)];
            for class in [
                &s.hate,
                &s.violent_hate,
                &s.nonviolent_hate,
                &s.offensive,
                &s.neutral,
            ] {
                row.extend(class_cells(class));
            }
            row.push(Cell::from(s.suspended));
            row.push(Cell::from(s.suspension_rate));
            row
        })
        .collect();
    let csv_path = write_csv(&cfg.out_dir, "stratum_summary.csv", &header, &rows)?;

    let results = json!({
        "corpus": path_str(&path),
        "rows": corpus.len(),
        "plot_data": path_str(&csv_path),
        "strata": summaries,
        "totals": {
            "n": summaries.iter().map(|s| s.n).sum::<u64>(),
            "hate": pool(&summaries, |s| &s.hate),
            "violent_hate": pool(&summaries, |s| &s.violent_hate),
            "nonviolent_hate": pool(&summaries, |s| &s.nonviolent_hate),
            "offensive": pool(&summaries, |s| &s.offensive),
            "neutral": pool(&summaries, |s| &s.neutral),
            "suspended": summaries.iter().map(|s| s.suspended).sum::<u64>(),
        },
    });
    write_report(&cfg.out_dir, "summarize", cfg, "tableS5", results)?;
    Ok(())
}
