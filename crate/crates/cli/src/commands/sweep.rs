//! `sweep` — utilitarian allocation cost across a grid of workforce
//! assumptions (annotations per review, reviews per hour).

use std::path::PathBuf;

use clap::Args;
use modaudit_core::cost_alloc::{
    engagement_weights, load_wages, sensitivity_sweep, DEFAULT_INCREMENT,
};
use modaudit_core::triage_sim::{TriageConfig, WorkforceParams};
use serde_json::json;

use crate::commands::{
    build_outcome_curves, curve_grid, load_corpus_at, parse_f64_list, resolve_model, volumes_at,
    F64List, MetricArg, ModeArg,
};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{path_str, write_csv, write_report, Cell};

use super::allocate::DEFAULT_CURVE_MAX;

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Corpus file (CSV or JSONL); may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// Daily tweet-volume table; may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub volumes: Option<PathBuf>,

    /// Hourly wage table; may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub wages: Option<PathBuf>,

    /// Outcome level every swept plan must reach, in [0, 1].
    #[arg(long, default_value_t = 0.8)]
    pub target: f64,

    /// Annotations required per reviewed tweet.
    #[arg(long, value_parser = parse_f64_list, default_value = "1,3")]
    pub k_values: F64List,

    /// Tweets reviewed per moderator-hour.
    #[arg(long, value_parser = parse_f64_list, default_value = "100,150,200")]
    pub r_values: F64List,

    /// Moderator step used by the utilitarian allocator and as the
    /// smallest curve grid point.
    #[arg(long, default_value_t = DEFAULT_INCREMENT)]
    pub increment: f64,

    /// Outcome the target applies to.
    #[arg(long, value_enum, default_value_t = MetricArg::AvoidedEngagement)]
    pub metric: MetricArg,

    /// Ranking weight between predicted hatefulness and engagement.
    #[arg(long, value_name = "A")]
    pub alpha: Option<f64>,

    /// How the engagement-weighted sample is ranked.
    #[arg(long, value_enum, default_value_t = ModeArg::Combined)]
    pub mode: ModeArg,

    /// Score model id; defaults to the best model by average precision.
    #[arg(long, value_name = "ID")]
    pub model: Option<String>,

    /// Largest moderator count the outcome curves are evaluated at.
    #[arg(long, default_value_t = DEFAULT_CURVE_MAX)]
    pub curve_max: f64,
}

pub fn run(cfg: &RunConfig, args: &SweepArgs) -> CliResult<()> {
    let mut cfg = cfg.clone();
    if let Some(alpha) = args.alpha {
        cfg.alpha = alpha;
    }
    let corpus_path = cfg.corpus_path(&args.corpus)?;
    let volumes_path = cfg.volumes_path(&args.volumes)?;
    let wages_path = cfg.wages_path(&args.wages)?;
    let corpus = load_corpus_at(&corpus_path)?;
    let (volumes, volume_map) = volumes_at(&volumes_path)?;

    let model_id = resolve_model(&corpus, &args.model)?;
    let triage = TriageConfig::new(cfg.alpha, args.mode.into(), model_id.clone())?;
    let strata: Vec<String> = corpus.strata().iter().cloned().collect();
    let weights = engagement_weights(&corpus, &volumes, &strata)?;
    let ms = curve_grid(args.increment, args.curve_max)?;
    let wt = load_wages(&wages_path)?;

    let rows = sensitivity_sweep(
        &args.k_values.0,
        &args.r_values.0,
        args.target,
        |k, r| {
            let w0 = WorkforceParams {
                m: 0.0,
                r,
                h: cfg.h,
                k,
            };
            build_outcome_curves(
                &corpus,
                &volume_map,
                &weights,
                &strata,
                &w0,
                &triage,
                args.metric.into(),
                &ms,
            )
            .map_err(|err| modaudit_core::Error::invalid(err.to_string()))
        },
        &wt,
        args.increment,
    )?;

    let csv_rows: Vec<Vec<Cell>> = rows
        .iter()
        .map(|row| {
            vec![
                Cell::from(row.k),
                Cell::from(row.r),
                Cell::from(row.total_moderators),
                Cell::from(row.total_annual_cost_usd),
                Cell::from(row.revenue_share),
                Cell::from(if row.baseline { "true" } else { "false" }),
            ]
        })
        .collect();
    let csv_path = write_csv(
        &cfg.out_dir,
        "sweep.csv",
        &[
            "k",
            "r",
            "total_moderators",
            "total_annual_cost_usd",
            "revenue_share",
            "baseline",
        ],
        &csv_rows,
    )?;

    let results = json!({
        "corpus": path_str(&corpus_path),
        "volumes": path_str(&volumes_path),
        "wages": path_str(&wages_path),
        "model_id": model_id,
        "metric": args.metric.as_str(),
        "target": args.target,
        "k_values": args.k_values.0,
        "r_values": args.r_values.0,
        "increment": args.increment,
        "plot_data": path_str(&csv_path),
        "rows": rows,
    });
    write_report(&cfg.out_dir, "sweep", &cfg, "tableS22", results)?;
    Ok(())
}
