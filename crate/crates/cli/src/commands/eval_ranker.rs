//! `eval-ranker` — score models as rankers: average precision, PR
//! curves, best F1, percentile ranks, and top-bin composition.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use modaudit_core::corpus::AnnotatedTweet;
use modaudit_core::ranker_eval::{evaluate_model, ModelEval};
use serde_json::json;

use crate::commands::load_corpus_at;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::{path_str, write_csv, write_report, Cell};

#[derive(Debug, Args)]
pub struct EvalRankerArgs {
    /// Corpus file (CSV or JSONL); may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// Comma-separated model ids; defaults to every model in the corpus.
    #[arg(long, value_name = "IDS")]
    pub models: Option<String>,

    /// Restrict the evaluation to one stratum.
    #[arg(long, value_name = "CODE")]
    pub stratum: Option<String>,

    /// Top share of the ranking whose label composition is reported.
    #[arg(long, value_name = "Q", default_value_t = 0.05)]
    pub top_q: f64,

    /// Number of equal bins the top share is split into.
    #[arg(long, value_name = "N", default_value_t = 5)]
    pub bins: usize,
}

pub fn run(cfg: &RunConfig, args: &EvalRankerArgs) -> CliResult<()> {
    let path = cfg.corpus_path(&args.corpus)?;
    let corpus = load_corpus_at(&path)?;

    let rows: Vec<&AnnotatedTweet> = match &args.stratum {
        Some(s) => corpus.stratum_rows(s)?,
        None => corpus.rows().iter().collect(),
    };

    let model_ids: Vec<String> = match &args.models {
        Some(list) => list
            .split(',')
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .collect(),
        None => corpus.model_ids().into_iter().collect(),
    };
    if model_ids.is_empty() {
        return Err(CliError::Usage("no model ids to evaluate".into()));
    }

    let mut evals: BTreeMap<String, ModelEval> = BTreeMap::new();
    for id in &model_ids {
        evals.insert(
            id.clone(),
            evaluate_model(&rows, id, args.top_q, args.bins)?,
        );
    }
    // Highest AP wins; ties go to the lexicographically smallest id.
    let best = evals
        .iter()
        .max_by(|a, b| a.1.ap.total_cmp(&b.1.ap).then_with(|| b.0.cmp(a.0)))
        .map(|(id, _)| id.clone())
        .expect("non-empty by construction");

    let mut pr_rows: Vec<Vec<Cell>> = Vec::new();
    let mut bin_rows: Vec<Vec<Cell>> = Vec::new();
    for (id, eval) in &evals {
        for point in &eval.curve.points {
            pr_rows.push(vec![
                Cell::from(id.as_str()),
                Cell::from(point.threshold),
                Cell::from(point.precision),
                Cell::from(point.recall),
            ]);
        }
        for bin in &eval.top_bins {
            bin_rows.push(vec![
                Cell::from(id.as_str()),
                Cell::from(bin.bin as u64),
                Cell::from(bin.n as u64),
                Cell::from(bin.hate_share),
                Cell::from(bin.offensive_share),
                Cell::from(bin.neutral_share),
            ]);
        }
    }
    let pr_path = write_csv(
        &cfg.out_dir,
        "pr_curves.csv",
        &["model", "threshold", "precision", "recall"],
        &pr_rows,
    )?;
    let bins_path = write_csv(
        &cfg.out_dir,
        "top_bins.csv",
        &[
            "model",
            "bin",
            "n",
            "hate_share",
            "offensive_share",
            "neutral_share",
        ],
        &bin_rows,
    )?;

    let results = json!({
        "corpus": path_str(&path),
        "stratum": args.stratum,
        "n_rows": rows.len(),
        "top_q": args.top_q,
        "bins": args.bins,
        "best": best,
        "models": evals,
        "plot_data": { "pr_curves": path_str(&pr_path), "top_bins": path_str(&bins_path) },
    });
    write_report(&cfg.out_dir, "eval-ranker", cfg, "fig3", results)?;
    Ok(())
}
