//! `regress` — linear probability and engagement models.
//!
//! Four model presets over the pooled corpus:
//! * `removal` — removal on content and author covariates (random rows).
//! * `engagement` — log engagement on content and author covariates
//!   (random rows).
//! * `interaction` — removal on hate x log-engagement with delta-method
//!   marginal effects (engagement-weighted rows).
//! * `suspension` — suspension on the removal covariates with
//!   user-clustered errors (random rows).
//!
//! Candidate columns without variation are dropped (and reported) so a
//! corpus lacking, say, violent rows still fits cleanly.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use modaudit_core::corpus::{AnnotatedTweet, Label, RemovalReason, SampleKind};
use modaudit_core::stats::{interaction_marginal_effects, ols_fit, ConfidenceSpec, Design, SeKind};
use serde_json::json;

use crate::commands::load_corpus_at;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::{path_str, write_csv, write_report, Cell};

/// Points in the moderator grid for interaction marginal effects.
const MARGINAL_GRID_POINTS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Removal,
    Engagement,
    Interaction,
    Suspension,
}

impl ModelArg {
    fn as_str(self) -> &'static str {
        match self {
            ModelArg::Removal => "removal",
            ModelArg::Engagement => "engagement",
            ModelArg::Interaction => "interaction",
            ModelArg::Suspension => "suspension",
        }
    }

    fn figure(self) -> &'static str {
        match self {
            ModelArg::Removal => "fig2b",
            ModelArg::Engagement => "tableS19",
            ModelArg::Interaction => "fig2c",
            ModelArg::Suspension => "tableS15",
        }
    }

    fn sample_kind(self) -> SampleKind {
        match self {
            ModelArg::Interaction => SampleKind::EngagementWeighted,
            _ => SampleKind::Random,
        }
    }

    fn default_se(self) -> SeKind {
        match self {
            ModelArg::Removal | ModelArg::Engagement => SeKind::Classical,
            ModelArg::Interaction => SeKind::Hc3,
            ModelArg::Suspension => SeKind::Cluster,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeArg {
    Classical,
    Hc3,
    Cluster,
}

impl From<SeArg> for SeKind {
    fn from(s: SeArg) -> Self {
        match s {
            SeArg::Classical => SeKind::Classical,
            SeArg::Hc3 => SeKind::Hc3,
            SeArg::Cluster => SeKind::Cluster,
        }
    }
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    /// Corpus file (CSV or JSONL); may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// Which model preset to fit.
    #[arg(long, value_enum, default_value_t = ModelArg::Removal)]
    pub model: ModelArg,

    /// Covariance estimator; each preset has a documented default.
    #[arg(long, value_enum)]
    pub se: Option<SeArg>,

    /// Confidence level for marginal-effect bands.
    #[arg(long, value_name = "P")]
    pub level: Option<f64>,
}

fn indicator(x: bool) -> f64 {
    if x {
        1.0
    } else {
        0.0
    }
}

fn log_followers(row: &AnnotatedTweet) -> f64 {
    (row.followers as f64).ln_1p()
}

/// A named regressor: label plus the row feature it extracts.
type Column = (&'static str, fn(&AnnotatedTweet) -> f64);

/// Candidate columns for one model; the response comes separately.
fn columns(model: ModelArg) -> Vec<Column> {
    let hate = |r: &AnnotatedTweet| indicator(r.is_hate());
    let offensive = |r: &AnnotatedTweet| indicator(r.primary_label == Label::Offensive);
    let violent = |r: &AnnotatedTweet| indicator(r.is_violent_hate());
    let log_eng = |r: &AnnotatedTweet| r.log_engagement();
    let verified = |r: &AnnotatedTweet| indicator(r.author_verified);
    let is_reply = |r: &AnnotatedTweet| indicator(r.is_reply);
    let sensitive = |r: &AnnotatedTweet| indicator(r.possibly_sensitive);
    match model {
        ModelArg::Removal | ModelArg::Suspension => vec![
            ("hate", hate),
            ("offensive", offensive),
            ("violent_hate", violent),
            ("log_engagement", log_eng),
            ("verified", verified),
            ("log_followers", log_followers),
            ("is_reply", is_reply),
            ("possibly_sensitive", sensitive),
        ],
        ModelArg::Engagement => vec![
            ("hate", hate),
            ("offensive", offensive),
            ("verified", verified),
            ("log_followers", log_followers),
            ("is_reply", is_reply),
            ("possibly_sensitive", sensitive),
        ],
        ModelArg::Interaction => vec![
            ("hate", hate),
            ("log_engagement", log_eng),
            ("hate_x_log_engagement", |r: &AnnotatedTweet| {
                indicator(r.is_hate()) * r.log_engagement()
            }),
            ("verified", verified),
            ("log_followers", log_followers),
        ],
    }
}

fn response(model: ModelArg, row: &AnnotatedTweet) -> f64 {
    match model {
        ModelArg::Removal => indicator(row.removed),
        ModelArg::Engagement => row.log_engagement(),
        ModelArg::Interaction => indicator(row.removed),
        ModelArg::Suspension => indicator(row.removal_reason == RemovalReason::Suspended),
    }
}

pub fn run(cfg: &RunConfig, args: &RegressArgs) -> CliResult<()> {
    let mut cfg = cfg.clone();
    if let Some(level) = args.level {
        cfg.level = level;
    }
    let path = cfg.corpus_path(&args.corpus)?;
    let corpus = load_corpus_at(&path)?;
    let spec = ConfidenceSpec::from_level(cfg.level)?;

    let kind = args.model.sample_kind();
    let rows: Vec<&AnnotatedTweet> = corpus
        .rows()
        .iter()
        .filter(|r| r.sample_kind == kind)
        .collect();
    if rows.is_empty() {
        return Err(CliError::Data(format!(
            "corpus has no {} rows to fit on",
            match kind {
                SampleKind::Random => "random-sample",
                SampleKind::EngagementWeighted => "engagement-weighted",
            }
        )));
    }

    // Keep only columns with variation; a constant column would be
    // collinear with the intercept.
    let mut names = vec!["const".to_string()];
    let mut kept: Vec<fn(&AnnotatedTweet) -> f64> = Vec::new();
    let mut dropped: Vec<&str> = Vec::new();
    for (name, f) in columns(args.model) {
        let first = f(rows[0]);
        if rows.iter().any(|r| f(r) != first) {
            names.push(name.to_string());
            kept.push(f);
        } else {
            dropped.push(name);
        }
    }

    let mut design = Design::new(names)?;
    let mut y = Vec::with_capacity(rows.len());
    let mut row_buf = Vec::with_capacity(kept.len() + 1);
    for row in &rows {
        row_buf.clear();
        row_buf.push(1.0);
        row_buf.extend(kept.iter().map(|f| f(row)));
        design.push_row(&row_buf)?;
        y.push(response(args.model, row));
    }

    let se_kind: SeKind = args.se.map_or_else(|| args.model.default_se(), Into::into);
    let clusters: Option<Vec<String>> = matches!(se_kind, SeKind::Cluster)
        .then(|| rows.iter().map(|r| r.author_id.clone()).collect());
    let fit = ols_fit(&design, &y, se_kind, clusters.as_deref())?;

    let coef_rows: Vec<Vec<Cell>> = fit
        .terms
        .iter()
        .map(|t| {
            vec![
                Cell::from(args.model.as_str()),
                Cell::from(t.name.as_str()),
                Cell::from(t.coef),
                Cell::from(t.se),
                Cell::from(t.t),
                Cell::from(t.p),
            ]
        })
        .collect();
    let coef_path = write_csv(
        &cfg.out_dir,
        "coefficients.csv",
        &["model", "term", "coef", "se", "t", "p"],
        &coef_rows,
    )?;

    let marginal = if args.model == ModelArg::Interaction {
        let (lo, hi) = rows
            .iter()
            .map(|r| r.log_engagement())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            });
        let grid: Vec<f64> = (0..MARGINAL_GRID_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (MARGINAL_GRID_POINTS - 1) as f64)
            .collect();
        let effects =
            interaction_marginal_effects(&fit, "hate", "hate_x_log_engagement", &grid, &spec)?;
        let rows: Vec<Vec<Cell>> = effects
            .iter()
            .map(|e| {
                vec![
                    Cell::from(e.moderator),
                    Cell::from(e.effect),
                    Cell::from(e.se),
                    Cell::from(e.lo),
                    Cell::from(e.hi),
                ]
            })
            .collect();
        let path = write_csv(
            &cfg.out_dir,
            "marginal_effects.csv",
            &["moderator", "effect", "se", "lo", "hi"],
            &rows,
        )?;
        Some(json!({ "plot_data": path_str(&path), "effects": effects }))
    } else {
        None
    };

    let results = json!({
        "corpus": path_str(&path),
        "model": args.model.as_str(),
        "n_rows": rows.len(),
        "dropped_terms": dropped,
        "fit": fit,
        "marginal_effects": marginal,
        "plot_data": path_str(&coef_path),
    });
    write_report(&cfg.out_dir, "regress", &cfg, args.model.figure(), results)?;
    Ok(())
}
