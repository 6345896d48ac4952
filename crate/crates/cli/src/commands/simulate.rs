//! `simulate` — coverage and avoided-engagement curves over a moderator
//! grid, with bootstrap bands, plus outcomes at reported staffing.

use std::path::PathBuf;

use clap::Args;
use modaudit_core::stats::ConfidenceSpec;
use modaudit_core::triage_sim::{
    effective_workforce, load_staffing, simulate_curve, simulate_point, SimCurve, TriageConfig,
    DEFAULT_HATE_SHARE,
};
use serde_json::json;

use crate::commands::{
    load_corpus_at, parse_f64_list, resolve_model, stratum_seed, volume_of, volumes_at, workforce,
    F64List, ModeArg,
};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{path_str, write_csv, write_report, Cell};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Corpus file (CSV or JSONL); may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// Daily tweet-volume table; may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub volumes: Option<PathBuf>,

    /// Reported staffing table; outcomes at effective staffing are
    /// added when present (also read from the config).
    #[arg(long, value_name = "PATH")]
    pub staffing: Option<PathBuf>,

    /// Moderator grid, ascending.
    #[arg(long, value_parser = parse_f64_list, default_value = "10,100,1000,10000,100000")]
    pub grid: F64List,

    /// Ranking weight between predicted hatefulness and engagement.
    #[arg(long, value_name = "A")]
    pub alpha: Option<f64>,

    /// How the engagement-weighted sample is ranked.
    #[arg(long, value_enum, default_value_t = ModeArg::Combined)]
    pub mode: ModeArg,

    /// Score model id; defaults to the best model by average precision.
    #[arg(long, value_name = "ID")]
    pub model: Option<String>,

    /// Bootstrap replicates.
    #[arg(long, value_name = "N")]
    pub b: Option<u32>,

    /// Confidence level.
    #[arg(long, value_name = "P")]
    pub level: Option<f64>,

    /// Share of reported moderators working on hate content.
    #[arg(long, value_name = "S", default_value_t = DEFAULT_HATE_SHARE)]
    pub hate_share: f64,
}

pub fn run(cfg: &RunConfig, args: &SimulateArgs) -> CliResult<()> {
    let mut cfg = cfg.clone();
    if let Some(b) = args.b {
        cfg.b = b;
    }
    if let Some(level) = args.level {
        cfg.level = level;
    }
    if let Some(alpha) = args.alpha {
        cfg.alpha = alpha;
    }
    let corpus_path = cfg.corpus_path(&args.corpus)?;
    let volumes_path = cfg.volumes_path(&args.volumes)?;
    let corpus = load_corpus_at(&corpus_path)?;
    let (_, volume_map) = volumes_at(&volumes_path)?;
    let spec = ConfidenceSpec::from_level(cfg.level)?;

    let model_id = resolve_model(&corpus, &args.model)?;
    let triage = TriageConfig::new(cfg.alpha, args.mode.into(), model_id.clone())?;
    let w0 = workforce(&cfg);

    let strata: Vec<String> = corpus.strata().iter().cloned().collect();
    let curves: Vec<SimCurve> = strata
        .iter()
        .map(|s| {
            let v = volume_of(&volume_map, s)?;
            Ok(simulate_curve(
                &corpus,
                s,
                &args.grid.0,
                &w0,
                &triage,
                v,
                cfg.b,
                stratum_seed(cfg.seed, s),
                &spec,
            )?)
        })
        .collect::<CliResult<_>>()?;

    let mut curve_rows: Vec<Vec<Cell>> = Vec::new();
    for curve in &curves {
        for p in &curve.points {
            curve_rows.push(vec![
                Cell::from(curve.stratum.as_str()),
                Cell::from(p.m),
                Cell::from(p.p),
                Cell::from(p.coverage),
                Cell::from(p.coverage_ci.as_ref().map(|i| i.lo)),
                Cell::from(p.coverage_ci.as_ref().map(|i| i.hi)),
                Cell::from(p.avoided_engagement),
                Cell::from(p.avoided_ci.as_ref().map(|i| i.lo)),
                Cell::from(p.avoided_ci.as_ref().map(|i| i.hi)),
            ]);
        }
    }
    let curves_path = write_csv(
        &cfg.out_dir,
        "curves.csv",
        &[
            "stratum",
            "M",
            "p",
            "coverage",
            "coverage_lo",
            "coverage_hi",
            "avoided",
            "avoided_lo",
            "avoided_hi",
        ],
        &curve_rows,
    )?;

    let staffing = match cfg.staffing_path(&args.staffing) {
        None => None,
        Some(staffing_path) => {
            let reported = load_staffing(&staffing_path)?;
            let baselines = effective_workforce(&reported, args.hate_share)?;
            let mut rows = Vec::new();
            let mut entries = Vec::new();
            for baseline in &baselines {
                let evaluable = corpus.strata().contains(&baseline.stratum)
                    && volume_map.contains_key(&baseline.stratum);
                let (coverage, avoided) = if evaluable && baseline.effective_m > 0.0 {
                    let v = volume_of(&volume_map, &baseline.stratum)?;
                    let point = simulate_point(
                        &corpus,
                        &baseline.stratum,
                        &w0.with_m(baseline.effective_m),
                        &triage,
                        v,
                    )?;
                    (point.coverage, point.avoided_engagement)
                } else {
                    (None, None)
                };
                rows.push(vec![
                    Cell::from(baseline.stratum.as_str()),
                    Cell::from(baseline.reported_moderators),
                    Cell::from(baseline.effective_m),
                    Cell::from(coverage),
                    Cell::from(avoided),
                ]);
                entries.push(json!({
                    "stratum": baseline.stratum,
                    "reported_moderators": baseline.reported_moderators,
                    "hate_share": baseline.hate_share,
                    "effective_m": baseline.effective_m,
                    "coverage": coverage,
                    "avoided_engagement": avoided,
                }));
            }
            let path = write_csv(
                &cfg.out_dir,
                "staffing.csv",
                &[
                    "stratum",
                    "reported_moderators",
                    "effective_m",
                    "coverage",
                    "avoided",
                ],
                &rows,
            )?;
            Some(json!({
                "input": path_str(&staffing_path),
                "plot_data": path_str(&path),
                "baselines": entries,
            }))
        }
    };

    let results = json!({
        "corpus": path_str(&corpus_path),
        "volumes": path_str(&volumes_path),
        "model_id": model_id,
        "mode": match args.mode {
            ModeArg::HatefulnessOnly => "hatefulness_only",
            ModeArg::Combined => "combined",
        },
        "grid": args.grid.0,
        "plot_data": path_str(&curves_path),
        "curves": curves,
        "staffing": staffing,
    });
    write_report(&cfg.out_dir, "simulate", &cfg, "fig4b", results)?;
    Ok(())
}
