//! Subcommand implementations and the helpers they share.

pub mod agreement;
pub mod allocate;
pub mod eval_ranker;
pub mod prevalence;
pub mod regress;
pub mod simulate;
pub mod summarize;
pub mod sweep;
pub mod synth;

use std::collections::BTreeMap;
use std::path::Path;

use clap::ValueEnum;
use modaudit_core::corpus::{load_corpus, Corpus, CorpusFormat};
use modaudit_core::cost_alloc::OutcomeCurve;
use modaudit_core::prevalence::{load_volumes, LanguageVolume};
use modaudit_core::ranker_eval::select_best_model;
use modaudit_core::seed::{fnv1a64, mix};
use modaudit_core::triage_sim::{
    outcome_grid, OutcomeMetric, RankingMode, TriageConfig, WorkforceParams,
};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Ratio of consecutive moderator-curve grid points; 25 steps per factor
/// of 3 keeps relative granularity around 4.5%.
const CURVE_GRID_RATIO_STEPS: f64 = 25.0;

/// How the engagement-weighted sample is ranked (CLI spelling).
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Rank purely by predicted hatefulness.
    HatefulnessOnly,
    /// Rank by `alpha * score + (1 - alpha) * ln(1 + engagement)`.
    Combined,
}

impl From<ModeArg> for RankingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::HatefulnessOnly => RankingMode::HatefulnessOnly,
            ModeArg::Combined => RankingMode::Combined,
        }
    }
}

/// Which outcome an allocation optimizes (CLI spelling).
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    /// Share of hateful tweets reviewed.
    Coverage,
    /// Share of engagement with hateful tweets avoided.
    AvoidedEngagement,
}

impl From<MetricArg> for OutcomeMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Coverage => OutcomeMetric::Coverage,
            MetricArg::AvoidedEngagement => OutcomeMetric::AvoidedEngagement,
        }
    }
}

impl MetricArg {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricArg::Coverage => "coverage",
            MetricArg::AvoidedEngagement => "avoided_engagement",
        }
    }
}

/// A comma-separated list of numbers in a single flag value.
#[derive(Debug, Clone)]
pub struct F64List(pub Vec<f64>);

pub fn parse_f64_list(s: &str) -> Result<F64List, String> {
    let values = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"))
        })
        .collect::<Result<Vec<f64>, String>>()?;
    if values.is_empty() {
        return Err("empty list".into());
    }
    Ok(F64List(values))
}

/// Load a corpus, inferring the format from the file extension.
pub fn load_corpus_at(path: &Path) -> CliResult<Corpus> {
    let format = CorpusFormat::infer(path)?;
    Ok(load_corpus(path, format)?)
}

/// Load a volume table and index it by stratum.
pub fn volumes_at(path: &Path) -> CliResult<(Vec<LanguageVolume>, BTreeMap<String, f64>)> {
    let volumes = load_volumes(path)?;
    let map = volumes.iter().map(|v| (v.stratum.clone(), v.t)).collect();
    Ok((volumes, map))
}

/// The daily volume for one stratum, or a data error naming it.
pub fn volume_of(map: &BTreeMap<String, f64>, stratum: &str) -> CliResult<f64> {
    map.get(stratum)
        .copied()
        .ok_or_else(|| CliError::Data(format!("volume table has no entry for stratum `{stratum}`")))
}

/// Per-stratum substream seed: stable under stratum reordering.
pub fn stratum_seed(seed: u64, stratum: &str) -> u64 {
    mix(seed, fnv1a64(stratum))
}

/// The model to rank by: an explicit id, or the corpus-wide best by
/// average precision (ties to the lexicographically smallest id).
pub fn resolve_model(corpus: &Corpus, flag: &Option<String>) -> CliResult<String> {
    match flag {
        Some(id) => Ok(id.clone()),
        None => {
            let ids: Vec<String> = corpus.model_ids().into_iter().collect();
            Ok(select_best_model(corpus, &ids)?.best)
        }
    }
}

/// Workforce template from the run configuration (moderators unset).
pub fn workforce(cfg: &RunConfig) -> WorkforceParams {
    WorkforceParams {
        m: 0.0,
        r: cfg.r,
        h: cfg.h,
        k: cfg.k,
    }
}

/// Geometric moderator grid from `start` to `max` used to trace outcome
/// curves for the allocators.
pub fn curve_grid(start: f64, max: f64) -> CliResult<Vec<f64>> {
    if !start.is_finite() || start <= 0.0 {
        return Err(CliError::Usage(format!(
            "curve grid must start above 0, got {start}"
        )));
    }
    if !max.is_finite() || max <= start {
        return Err(CliError::Usage(format!(
            "curve grid maximum must exceed its start {start}, got {max}"
        )));
    }
    let ratio = 3f64.powf(1.0 / CURVE_GRID_RATIO_STEPS);
    let mut ms = vec![start];
    loop {
        let next = ms.last().expect("non-empty") * ratio;
        if next > max {
            break;
        }
        ms.push(next);
    }
    Ok(ms)
}

/// One outcome curve per stratum (sorted), weighted by the stratum's
/// share of total hate engagement.
#[allow(clippy::too_many_arguments)]
pub fn build_outcome_curves(
    corpus: &Corpus,
    volume_map: &BTreeMap<String, f64>,
    weights: &BTreeMap<String, f64>,
    strata: &[String],
    w0: &WorkforceParams,
    triage: &TriageConfig,
    metric: OutcomeMetric,
    ms: &[f64],
) -> CliResult<Vec<OutcomeCurve>> {
    strata
        .iter()
        .map(|s| {
            let v = volume_of(volume_map, s)?;
            let points = outcome_grid(corpus, s, ms, w0, triage, v, metric)?;
            let weight = *weights
                .get(s)
                .ok_or_else(|| CliError::Data(format!("no aggregation weight for `{s}`")))?;
            Ok(OutcomeCurve::new(s.clone(), points, weight)?)
        })
        .collect()
}
