//! Two-stage human–AI triage simulation: a review budget derived from
//! workforce parameters, model-driven ranking of content, and the
//! resulting coverage of hateful tweets and avoided hate engagement,
//! with percentile-bootstrap intervals across moderator grids.
//!
//! Coverage is always computed on the random sample with
//! hatefulness-only ranking (the share of all hateful tweets a reviewer
//! working down the ranking would reach). Avoided engagement is computed
//! on the engagement-weighted sample with the configured ranking
//! (combined score by default), as the share of total engagement with
//! hateful content that sits above the review cutoff. Reviewed hateful
//! tweets are assumed successfully moderated.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedTweet, Corpus, SampleKind};
use crate::error::{Error, Result};
use crate::seed::{mix, substream};
use crate::stats::{quantile_type7, ConfidenceSpec, Interval};

/// Share of manual moderation decisions attributed to hate, used to
/// convert reported moderator headcounts into hate-moderation capacity.
pub const DEFAULT_HATE_SHARE: f64 = 0.31;

/// Workforce throughput parameters for the review-budget formula
/// `N_review = M·r·h/k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkforceParams {
    /// Moderators assigned to the stratum (real-valued).
    pub m: f64,
    /// Tweets reviewed per moderator-hour.
    pub r: f64,
    /// Working hours per moderator-day.
    pub h: f64,
    /// Independent reviewers per tweet.
    pub k: f64,
}

impl Default for WorkforceParams {
    fn default() -> Self {
        WorkforceParams {
            m: 0.0,
            r: 100.0,
            h: 8.0,
            k: 3.0,
        }
    }
}

impl WorkforceParams {
    /// The same throughput parameters with a different moderator count.
    pub fn with_m(self, m: f64) -> Self {
        WorkforceParams { m, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("m", self.m), ("r", self.r), ("h", self.h), ("k", self.k)] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("workforce {name} must be finite")));
            }
        }
        if self.m < 0.0 {
            return Err(Error::invalid("moderator count must be non-negative"));
        }
        if self.r <= 0.0 || self.h <= 0.0 {
            return Err(Error::invalid("review rate and hours must be positive"));
        }
        if self.k < 1.0 {
            return Err(Error::invalid("reviewers per tweet must be at least 1"));
        }
        Ok(())
    }
}

/// How the engagement-weighted sample is ranked for review.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingMode {
    /// Rank purely by predicted hatefulness.
    HatefulnessOnly,
    /// Rank by `S_i = α·ĥ_i + (1−α)·ln(1+e_i)`.
    Combined,
}

/// Ranking configuration: weight `α`, mode, and the score column used
/// for predicted hatefulness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriageConfig {
    pub alpha: f64,
    pub ranking_mode: RankingMode,
    pub model_id: String,
}

impl TriageConfig {
    pub fn new(alpha: f64, ranking_mode: RankingMode, model_id: impl Into<String>) -> Result<Self> {
        let cfg = TriageConfig {
            alpha,
            ranking_mode,
            model_id: model_id.into(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) || !self.alpha.is_finite() {
            return Err(Error::invalid(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.model_id.is_empty() {
            return Err(Error::invalid("ranking needs a model id"));
        }
        Ok(())
    }
}

/// Review budget for one day: raw capacity and the review fraction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReviewBudget {
    /// `M·r·h/k`, kept fractional.
    pub n_review: f64,
    /// `min(1, N_review / V)`.
    pub p: f64,
}

/// Simulated outcome at one moderator count. `None` marks an undefined
/// outcome (no hateful rows for coverage; zero total hate engagement for
/// avoided engagement).
#[derive(Debug, Clone, Serialize)]
pub struct SimPoint {
    pub stratum: String,
    pub m: f64,
    pub n_review: f64,
    /// Review fraction `p = min(1, N_review/V)`.
    pub p: f64,
    pub coverage: Option<f64>,
    pub coverage_ci: Option<Interval>,
    pub avoided_engagement: Option<f64>,
    pub avoided_ci: Option<Interval>,
}

/// A simulated coverage/avoided-engagement curve over a moderator grid.
#[derive(Debug, Clone, Serialize)]
pub struct SimCurve {
    pub stratum: String,
    /// Daily tweet volume the budget is spread over.
    pub v: f64,
    pub points: Vec<SimPoint>,
    pub b: u32,
    pub seed: u64,
}

/// Reported moderator headcount scaled down to hate-moderation capacity.
#[derive(Debug, Clone, Serialize)]
pub struct StaffingBaseline {
    pub stratum: String,
    pub reported_moderators: u64,
    pub hate_share: f64,
    /// `reported × hate_share`.
    pub effective_m: f64,
}

/// Which outcome a point-estimate grid evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeMetric {
    Coverage,
    AvoidedEngagement,
}

/// Review budget from workforce parameters and a daily volume `V`.
pub fn review_budget(w: &WorkforceParams, v: f64) -> Result<ReviewBudget> {
    w.validate()?;
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::invalid(format!(
            "daily volume must be positive and finite, got {v}"
        )));
    }
    let n_review = w.m * w.r * w.h / w.k;
    Ok(ReviewBudget {
        n_review,
        p: (n_review / v).min(1.0),
    })
}

/// Combined review-priority score `S = α·ĥ + (1−α)·ln(1+e)`.
pub fn combined_score(h_hat: f64, engagement: u64, alpha: f64) -> f64 {
    alpha * h_hat + (1.0 - alpha) * (engagement as f64).ln_1p()
}

/// Ranking keys for a set of rows under the given mode.
fn ranking_scores(
    rows: &[&AnnotatedTweet],
    cfg: &TriageConfig,
    mode: RankingMode,
) -> Result<Vec<f64>> {
    rows.iter()
        .map(|row| {
            let h_hat = row.score(&cfg.model_id)?;
            Ok(match mode {
                RankingMode::HatefulnessOnly => h_hat,
                RankingMode::Combined => combined_score(h_hat, row.engagement(), cfg.alpha),
            })
        })
        .collect()
}

/// Indices of the top `⌊p·n⌋` rows by score descending, ties broken by
/// tweet_id ascending.
fn select_top(rows: &[&AnnotatedTweet], scores: &[f64], p: f64) -> Vec<usize> {
    let k_sel = (p * rows.len() as f64).floor() as usize;
    let k_sel = k_sel.min(rows.len());
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| rows[a].tweet_id.cmp(&rows[b].tweet_id))
    });
    order.truncate(k_sel);
    order
}

/// Share of hateful rows that fall inside the review selection; `None`
/// when there are no hateful rows.
fn coverage_of(rows: &[&AnnotatedTweet], scores: &[f64], p: f64) -> Option<f64> {
    let total_hate = rows.iter().filter(|r| r.is_hate()).count();
    if total_hate == 0 {
        return None;
    }
    let selected = select_top(rows, scores, p);
    let covered = selected.iter().filter(|&&i| rows[i].is_hate()).count();
    Some(covered as f64 / total_hate as f64)
}

/// Share of hate engagement that falls inside the review selection;
/// `None` when total hate engagement is zero.
fn avoided_of(rows: &[&AnnotatedTweet], scores: &[f64], p: f64) -> Option<f64> {
    let total: u64 = rows
        .iter()
        .filter(|r| r.is_hate())
        .map(|r| r.engagement())
        .sum();
    if total == 0 {
        return None;
    }
    let selected = select_top(rows, scores, p);
    let avoided: u64 = selected
        .iter()
        .filter(|&&i| rows[i].is_hate())
        .map(|&i| rows[i].engagement())
        .sum();
    Some(avoided as f64 / total as f64)
}

/// Simulate one moderator count: coverage on the random sample with
/// hatefulness-only ranking, avoided engagement on the
/// engagement-weighted sample with the configured ranking.
pub fn simulate_point(
    corpus: &Corpus,
    stratum: &str,
    w: &WorkforceParams,
    cfg: &TriageConfig,
    v: f64,
) -> Result<SimPoint> {
    cfg.validate()?;
    let budget = review_budget(w, v)?;

    let random_rows = corpus.sample_rows(stratum, SampleKind::Random)?;
    let ew_rows = corpus.sample_rows(stratum, SampleKind::EngagementWeighted)?;

    let coverage = if random_rows.is_empty() {
        None
    } else {
        let scores = ranking_scores(&random_rows, cfg, RankingMode::HatefulnessOnly)?;
        coverage_of(&random_rows, &scores, budget.p)
    };
    let avoided = if ew_rows.is_empty() {
        None
    } else {
        let scores = ranking_scores(&ew_rows, cfg, cfg.ranking_mode)?;
        avoided_of(&ew_rows, &scores, budget.p)
    };

    Ok(SimPoint {
        stratum: stratum.to_string(),
        m: w.m,
        n_review: budget.n_review,
        p: budget.p,
        coverage,
        coverage_ci: None,
        avoided_engagement: avoided,
        avoided_ci: None,
    })
}

fn percentile_ci(mut replicates: Vec<f64>, spec: &ConfidenceSpec) -> Option<Interval> {
    if replicates.is_empty() {
        return None;
    }
    replicates.sort_by(f64::total_cmp);
    let tail = spec.tail();
    Some(Interval {
        lo: quantile_type7(&replicates, tail),
        hi: quantile_type7(&replicates, 1.0 - tail),
    })
}

/// Simulate a moderator grid with percentile-bootstrap intervals.
///
/// Replicate `b` of grid point `g` draws from the substream at
/// `mix(seed, g)` with index `b`; within a replicate, the random-sample
/// rows are resampled first (`n_random` index draws), then the
/// engagement-weighted rows (`n_ew` draws), from the same stream.
/// Replicates whose outcome is undefined (no hateful rows drawn, or zero
/// hate engagement drawn) are dropped from that interval. The per-point
/// substreams make the result independent of how grid points and
/// replicates are scheduled across workers.
#[allow(clippy::too_many_arguments)]
pub fn simulate_curve(
    corpus: &Corpus,
    stratum: &str,
    m_grid: &[f64],
    w_template: &WorkforceParams,
    cfg: &TriageConfig,
    v: f64,
    b: u32,
    seed: u64,
    spec: &ConfidenceSpec,
) -> Result<SimCurve> {
    if m_grid.is_empty() {
        return Err(Error::invalid("moderator grid is empty"));
    }
    if m_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("moderator grid must be strictly ascending"));
    }
    if b == 0 {
        return Err(Error::invalid("bootstrap needs at least one replicate"));
    }
    cfg.validate()?;

    let random_rows = corpus.sample_rows(stratum, SampleKind::Random)?;
    let ew_rows = corpus.sample_rows(stratum, SampleKind::EngagementWeighted)?;
    // Surface missing model scores once, before the replicate loop.
    let _ = ranking_scores(&random_rows, cfg, RankingMode::HatefulnessOnly)?;
    let _ = ranking_scores(&ew_rows, cfg, cfg.ranking_mode)?;

    let points: Result<Vec<SimPoint>> = m_grid
        .par_iter()
        .enumerate()
        .map(|(g_idx, &m)| {
            let w = w_template.with_m(m);
            let mut point = simulate_point(corpus, stratum, &w, cfg, v)?;
            let point_seed = mix(seed, g_idx as u64);

            let replicates: Result<Vec<(Option<f64>, Option<f64>)>> = (0..b)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = substream(point_seed, u64::from(rep));
                    let coverage = if random_rows.is_empty() {
                        None
                    } else {
                        let draw: Vec<&AnnotatedTweet> = (0..random_rows.len())
                            .map(|_| random_rows[rng.random_range(0..random_rows.len())])
                            .collect();
                        let scores = ranking_scores(&draw, cfg, RankingMode::HatefulnessOnly)?;
                        coverage_of(&draw, &scores, point.p)
                    };
                    let avoided = if ew_rows.is_empty() {
                        None
                    } else {
                        let draw: Vec<&AnnotatedTweet> = (0..ew_rows.len())
                            .map(|_| ew_rows[rng.random_range(0..ew_rows.len())])
                            .collect();
                        let scores = ranking_scores(&draw, cfg, cfg.ranking_mode)?;
                        avoided_of(&draw, &scores, point.p)
                    };
                    Ok((coverage, avoided))
                })
                .collect();
            let replicates = replicates?;

            point.coverage_ci =
                percentile_ci(replicates.iter().filter_map(|r| r.0).collect(), spec);
            point.avoided_ci = percentile_ci(replicates.iter().filter_map(|r| r.1).collect(), spec);
            Ok(point)
        })
        .collect();

    Ok(SimCurve {
        stratum: stratum.to_string(),
        v,
        points: points?,
        b,
        seed,
    })
}

/// Point-estimate outcomes over a moderator grid, computed with one sort
/// and prefix sums. Agrees with [`simulate_point`] at every grid value;
/// errors when the metric is undefined for the stratum.
pub fn outcome_grid(
    corpus: &Corpus,
    stratum: &str,
    m_grid: &[f64],
    w_template: &WorkforceParams,
    cfg: &TriageConfig,
    v: f64,
    metric: OutcomeMetric,
) -> Result<Vec<(f64, f64)>> {
    if m_grid.is_empty() {
        return Err(Error::invalid("moderator grid is empty"));
    }
    if m_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("moderator grid must be strictly ascending"));
    }
    cfg.validate()?;
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::invalid(format!(
            "daily volume must be positive and finite, got {v}"
        )));
    }

    let (rows, mode) = match metric {
        OutcomeMetric::Coverage => (
            corpus.sample_rows(stratum, SampleKind::Random)?,
            RankingMode::HatefulnessOnly,
        ),
        OutcomeMetric::AvoidedEngagement => (
            corpus.sample_rows(stratum, SampleKind::EngagementWeighted)?,
            cfg.ranking_mode,
        ),
    };
    if rows.is_empty() {
        return Err(Error::invalid(format!(
            "stratum `{stratum}` has no rows for the requested metric"
        )));
    }
    let scores = ranking_scores(&rows, cfg, mode)?;
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| rows[a].tweet_id.cmp(&rows[b].tweet_id))
    });

    // prefix[j] = metric mass in the first j ranked rows.
    let mut prefix = Vec::with_capacity(rows.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &i in &order {
        if rows[i].is_hate() {
            acc += match metric {
                OutcomeMetric::Coverage => 1.0,
                OutcomeMetric::AvoidedEngagement => rows[i].engagement() as f64,
            };
        }
        prefix.push(acc);
    }
    let total = acc;
    if total == 0.0 {
        return Err(Error::invalid(format!(
            "stratum `{stratum}` has no hateful mass; the outcome is undefined"
        )));
    }

    m_grid
        .iter()
        .map(|&m| {
            let budget = review_budget(&w_template.with_m(m), v)?;
            let k_sel = ((budget.p * rows.len() as f64).floor() as usize).min(rows.len());
            Ok((m, prefix[k_sel] / total))
        })
        .collect()
}

/// Scale reported moderator headcounts to effective hate-moderation
/// capacity.
pub fn effective_workforce(
    reported: &[(String, i64)],
    hate_share: f64,
) -> Result<Vec<StaffingBaseline>> {
    if !(0.0..=1.0).contains(&hate_share) || !hate_share.is_finite() {
        return Err(Error::invalid(format!(
            "hate share must lie in [0, 1], got {hate_share}"
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    reported
        .iter()
        .map(|(stratum, count)| {
            if *count < 0 {
                return Err(Error::invalid(format!(
                    "negative moderator count {count} for stratum `{stratum}`"
                )));
            }
            if !seen.insert(stratum.as_str()) {
                return Err(Error::invalid(format!(
                    "duplicate staffing entry for stratum `{stratum}`"
                )));
            }
            Ok(StaffingBaseline {
                stratum: stratum.clone(),
                reported_moderators: *count as u64,
                hate_share,
                effective_m: *count as f64 * hate_share,
            })
        })
        .collect()
}

/// Read a staffing table from CSV with header
/// `stratum,reported_moderators`.
pub fn load_staffing(path: &std::path::Path) -> Result<Vec<(String, i64)>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != ["stratum", "reported_moderators"] {
        return Err(Error::schema(format!(
            "staffing table must have columns stratum,reported_moderators; got {}",
            got.join(",")
        )));
    }
    let mut out: Vec<(String, i64)> = Vec::new();
    for (i, record) in reader.deserialize::<(String, i64)>().enumerate() {
        let row = record.map_err(|e| Error::row(i + 2, e.to_string()))?;
        if out.iter().any(|(s, _)| *s == row.0) {
            return Err(Error::row(
                i + 2,
                format!("duplicate staffing entry for stratum `{}`", row.0),
            ));
        }
        out.push(row);
    }
    if out.is_empty() {
        return Err(Error::schema("staffing table has no rows"));
    }
    Ok(out)
}
