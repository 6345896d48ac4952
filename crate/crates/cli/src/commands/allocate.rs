//! `allocate` — cost a staffing plan that reaches an outcome target,
//! optionally tracing a cost frontier across several targets.

use std::path::PathBuf;

use clap::Args;
use modaudit_core::cost_alloc::{
    allocate_simultaneous, allocate_utilitarian, cost_frontier, engagement_weights, load_wages,
    AllocationPolicy, DEFAULT_INCREMENT,
};
use modaudit_core::triage_sim::TriageConfig;
use serde_json::json;

use crate::commands::{
    build_outcome_curves, curve_grid, load_corpus_at, parse_f64_list, resolve_model, volumes_at,
    workforce, F64List, MetricArg, ModeArg,
};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::{path_str, write_csv, write_report, Cell};

/// Default ceiling of the moderator grid the outcome curves are
/// evaluated on.
pub const DEFAULT_CURVE_MAX: f64 = 250_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyArg {
    /// Every stratum individually reaches the target.
    Simultaneous,
    /// The engagement-weighted aggregate reaches the target at least
    /// cost.
    Utilitarian,
}

impl From<PolicyArg> for AllocationPolicy {
    fn from(value: PolicyArg) -> Self {
        match value {
            PolicyArg::Simultaneous => AllocationPolicy::Simultaneous,
            PolicyArg::Utilitarian => AllocationPolicy::Utilitarian,
        }
    }
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    /// Corpus file (CSV or JSONL); may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// Daily tweet-volume table; may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub volumes: Option<PathBuf>,

    /// Hourly wage table; may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub wages: Option<PathBuf>,

    /// Outcome level the plan must reach, in [0, 1].
    #[arg(long, default_value_t = 0.8)]
    pub target: f64,

    /// Allocation policy.
    #[arg(long, value_enum, default_value_t = PolicyArg::Utilitarian)]
    pub policy: PolicyArg,

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

    /// Extra targets: trace a cost frontier over these ascending
    /// values with the same policy.
    #[arg(long, value_parser = parse_f64_list, value_name = "T1,T2,...")]
    pub frontier: Option<F64List>,

    /// Largest moderator count the outcome curves are evaluated at.
    #[arg(long, default_value_t = DEFAULT_CURVE_MAX)]
    pub curve_max: f64,

    /// Paid moderator hours per year (overrides the built-in default).
    #[arg(long, value_name = "HOURS")]
    pub annual_hours: Option<f64>,

    /// Annual platform revenue in USD (overrides the built-in default).
    #[arg(long, value_name = "USD")]
    pub revenue: Option<f64>,
}

pub fn run(cfg: &RunConfig, args: &AllocateArgs) -> CliResult<()> {
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
    let w0 = workforce(&cfg);
    let strata: Vec<String> = corpus.strata().iter().cloned().collect();
    let weights = engagement_weights(&corpus, &volumes, &strata)?;
    let ms = curve_grid(args.increment, args.curve_max)?;
    let curves = build_outcome_curves(
        &corpus,
        &volume_map,
        &weights,
        &strata,
        &w0,
        &triage,
        args.metric.into(),
        &ms,
    )?;

    let mut wt = load_wages(&wages_path)?;
    if let Some(hours) = args.annual_hours {
        wt = wt.with_annual_hours(hours)?;
    }
    if let Some(revenue) = args.revenue {
        wt = wt.with_revenue(revenue)?;
    }

    let plan = match args.policy {
        PolicyArg::Simultaneous => allocate_simultaneous(args.target, &curves, &wt)?,
        PolicyArg::Utilitarian => allocate_utilitarian(args.target, &curves, &wt, args.increment)?,
    };

    let plan_rows: Vec<Vec<Cell>> = plan
        .per_stratum
        .iter()
        .map(|a| {
            vec![
                Cell::from(a.stratum.as_str()),
                Cell::from(a.m),
                Cell::from(a.hourly_wage_usd),
                Cell::from(a.annual_cost_usd),
                Cell::from(a.outcome),
            ]
        })
        .collect();
    let plan_path = write_csv(
        &cfg.out_dir,
        "allocation.csv",
        &[
            "stratum",
            "m",
            "hourly_wage_usd",
            "annual_cost_usd",
            "outcome",
        ],
        &plan_rows,
    )?;

    let frontier = match &args.frontier {
        None => None,
        Some(targets) => {
            let frontier =
                cost_frontier(&targets.0, &curves, &wt, args.policy.into(), args.increment)?;
            let mut header: Vec<String> = vec![
                "target".into(),
                "policy".into(),
                "total_cost_usd".into(),
                "revenue_share".into(),
            ];
            header.extend(strata.iter().map(|s| format!("m_{s}")));
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut rows = Vec::with_capacity(frontier.points.len());
            for point in &frontier.points {
                let mut row = vec![
                    Cell::from(point.target),
                    Cell::from(policy_str(args.policy)),
                    Cell::from(point.total_cost_usd),
                    Cell::from(point.revenue_share),
                ];
                if point.plan.per_stratum.len() != strata.len() {
                    return Err(CliError::Data(format!(
                        "frontier plan at target {} covers {} strata, expected {}",
                        point.target,
                        point.plan.per_stratum.len(),
                        strata.len()
                    )));
                }
                row.extend(point.plan.per_stratum.iter().map(|a| Cell::from(a.m)));
                rows.push(row);
            }
            let path = write_csv(&cfg.out_dir, "frontier.csv", &header_refs, &rows)?;
            Some(json!({
                "plot_data": path_str(&path),
                "frontier": frontier,
            }))
        }
    };

    let results = json!({
        "corpus": path_str(&corpus_path),
        "volumes": path_str(&volumes_path),
        "wages": path_str(&wages_path),
        "model_id": model_id,
        "metric": args.metric.as_str(),
        "policy": policy_str(args.policy),
        "increment": args.increment,
        "curve_max": args.curve_max,
        "weights": weights,
        "plot_data": path_str(&plan_path),
        "plan": plan,
        "frontier": frontier,
    });
    write_report(&cfg.out_dir, "allocate", &cfg, "fig4c", results)?;
    Ok(())
}

fn policy_str(policy: PolicyArg) -> &'static str {
    match policy {
        PolicyArg::Simultaneous => "simultaneous",
        PolicyArg::Utilitarian => "utilitarian",
    }
}
