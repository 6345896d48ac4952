//! Seeded synthetic corpus generator.
//!
//! The generator is a pure function of its configuration: the same
//! [`SynthConfig`] always yields the same corpus, independent of thread
//! count or call site. Each stratum draws from its own RNG substream
//! (master seed XOR a stable hash of the stratum code), so adding or
//! removing strata does not disturb the others.
//!
//! Per stratum it emits a uniform random sample of `n` rows and an
//! engagement-weighted sample of `n_engagement_weighted` rows (default
//! `n / 2`). Engagement totals follow a log-normal tail; hateful rows in
//! the random sample receive zero engagement with probability
//! `zero_engagement_share_hate`. Engagement-weighted rows draw from the
//! size-biased version of the same log-normal (mean shifted by sigma^2)
//! and never have zero engagement, mirroring sampling proportional to
//! engagement. Totals are split likes/replies/retweets/quotes by a
//! multinomial with fixed proportions 0.6/0.2/0.15/0.05.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Binomial, Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use super::{AnnotatedTweet, Corpus, CorpusSource, Label, RemovalReason, SampleKind};
use crate::error::{Error, Result};
use crate::seed::stratum_rng;

/// Fixed multinomial proportions splitting total engagement into
/// likes / replies / retweets / quotes.
pub const ENGAGEMENT_SPLIT: [f64; 4] = [0.6, 0.2, 0.15, 0.05];

/// Share of removals attributed to account suspension (the rest split
/// between self-deactivation and unattributable deletion).
const SUSPENDED_SHARE: f64 = 0.45;
const DEACTIVATED_SHARE: f64 = 0.10;

/// Parameters of a log-normal engagement tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalParams {
    /// Mean of log engagement.
    pub log_mean: f64,
    /// Standard deviation of log engagement; must be positive.
    pub log_sd: f64,
}

/// Beta distribution parameters for a model score; both must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

/// Per-class score distributions for one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreModel {
    pub hate: BetaParams,
    pub offensive: BetaParams,
    pub neutral: BetaParams,
}

/// Removal probability per label class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovalRates {
    pub hate: f64,
    pub offensive: f64,
    pub neutral: f64,
}

impl RemovalRates {
    fn rate_for(&self, label: Label) -> f64 {
        match label {
            Label::Hate => self.hate,
            Label::Offensive => self.offensive,
            Label::Neutral => self.neutral,
        }
    }
}

/// Generation parameters for one stratum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumSynth {
    /// Size of the uniform random sample; must be at least 1.
    pub n: u64,
    /// Size of the engagement-weighted sample; defaults to `n / 2`.
    #[serde(default)]
    pub n_engagement_weighted: Option<u64>,
    /// P(label = hate).
    pub p_hate: f64,
    /// P(violent | hate).
    pub p_violent_given_hate: f64,
    /// P(label = offensive); `p_hate + p_offensive` must not exceed 1.
    pub p_offensive: f64,
    /// P(engagement = 0 | hate) in the random sample.
    pub zero_engagement_share_hate: f64,
    /// Log-normal tail for nonzero engagement totals.
    pub engagement_tail: LogNormalParams,
    /// Removal probability per label class.
    pub removal_rates: RemovalRates,
    /// Score distributions per model id.
    pub score_models: BTreeMap<String, ScoreModel>,
    /// P(scam annotation = true); rows get a null annotation when absent.
    #[serde(default)]
    pub p_scam: Option<f64>,
    /// P(adult annotation = true); rows get a null annotation when absent.
    #[serde(default)]
    pub p_adult: Option<f64>,
}

impl StratumSynth {
    fn ew_n(&self) -> u64 {
        self.n_engagement_weighted.unwrap_or(self.n / 2)
    }
}

/// Full generator configuration: a master seed plus per-stratum parameters.
///
/// `seed` may be omitted in serialized configs (it defaults to 0); callers
/// that manage seeds externally overwrite it before generating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    #[serde(default)]
    pub seed: u64,
    pub strata: BTreeMap<String, StratumSynth>,
}

fn check_prob(name: &str, stratum: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::config(format!(
            "stratum `{stratum}`: {name} = {p} is not a probability"
        )));
    }
    Ok(())
}

fn check_beta(name: &str, stratum: &str, b: BetaParams) -> Result<()> {
    if !(b.alpha > 0.0 && b.beta > 0.0 && b.alpha.is_finite() && b.beta.is_finite()) {
        return Err(Error::config(format!(
            "stratum `{stratum}`: {name} has non-positive Beta parameters ({}, {})",
            b.alpha, b.beta
        )));
    }
    Ok(())
}

impl SynthConfig {
    /// Validate every probability, distribution parameter, and size.
    pub fn validate(&self) -> Result<()> {
        if self.strata.is_empty() {
            return Err(Error::config("no strata configured".to_string()));
        }
        for (code, s) in &self.strata {
            if code.is_empty() {
                return Err(Error::config("empty stratum code".to_string()));
            }
            if s.n == 0 {
                return Err(Error::config(format!("stratum `{code}`: n must be >= 1")));
            }
            check_prob("p_hate", code, s.p_hate)?;
            check_prob("p_violent_given_hate", code, s.p_violent_given_hate)?;
            check_prob("p_offensive", code, s.p_offensive)?;
            check_prob(
                "zero_engagement_share_hate",
                code,
                s.zero_engagement_share_hate,
            )?;
            if s.p_hate + s.p_offensive > 1.0 {
                return Err(Error::config(format!(
                    "stratum `{code}`: p_hate + p_offensive exceeds 1"
                )));
            }
            if !s.engagement_tail.log_sd.is_finite()
                || s.engagement_tail.log_sd <= 0.0
                || !s.engagement_tail.log_mean.is_finite()
            {
                return Err(Error::config(format!(
                    "stratum `{code}`: engagement_tail requires finite log_mean and log_sd > 0"
                )));
            }
            check_prob("removal_rates.hate", code, s.removal_rates.hate)?;
            check_prob("removal_rates.offensive", code, s.removal_rates.offensive)?;
            check_prob("removal_rates.neutral", code, s.removal_rates.neutral)?;
            for (model, sm) in &s.score_models {
                if model.is_empty() {
                    return Err(Error::config(format!("stratum `{code}`: empty model id")));
                }
                check_beta(&format!("score_models.{model}.hate"), code, sm.hate)?;
                check_beta(
                    &format!("score_models.{model}.offensive"),
                    code,
                    sm.offensive,
                )?;
                check_beta(&format!("score_models.{model}.neutral"), code, sm.neutral)?;
            }
            if let Some(p) = s.p_scam {
                check_prob("p_scam", code, p)?;
            }
            if let Some(p) = s.p_adult {
                check_prob("p_adult", code, p)?;
            }
        }
        Ok(())
    }

    /// Default eight-language configuration used throughout the test suite
    /// and by the CLI when no config file is given: 30k random rows + 15k
    /// engagement-weighted rows per stratum, hate prevalence 0.42% of which
    /// 1-in-14 is violent, 66.9% of hate with zero engagement, and one
    /// score model (`m1`) that separates the classes.
    pub fn default_eight_strata(seed: u64) -> SynthConfig {
        let codes = ["ar", "de", "en", "es", "fr", "id", "pt", "tr"];
        let mut score_models = BTreeMap::new();
        score_models.insert(
            "m1".to_string(),
            ScoreModel {
                hate: BetaParams {
                    alpha: 5.0,
                    beta: 2.0,
                },
                offensive: BetaParams {
                    alpha: 2.5,
                    beta: 4.0,
                },
                neutral: BetaParams {
                    alpha: 1.0,
                    beta: 14.0,
                },
            },
        );
        let stratum = StratumSynth {
            n: 30_000,
            n_engagement_weighted: Some(15_000),
            p_hate: 0.0042,
            p_violent_given_hate: 1.0 / 14.0,
            p_offensive: 0.035,
            zero_engagement_share_hate: 0.669,
            engagement_tail: LogNormalParams {
                log_mean: 0.6,
                log_sd: 1.9,
            },
            removal_rates: RemovalRates {
                hate: 0.211,
                offensive: 0.17,
                neutral: 0.134,
            },
            score_models,
            p_scam: Some(0.01),
            p_adult: Some(0.015),
        };
        SynthConfig {
            seed,
            strata: codes
                .iter()
                .map(|c| (c.to_string(), stratum.clone()))
                .collect(),
        }
    }
}

/// Pre-built distributions for one stratum.
struct StratumDists {
    body: LogNormal<f64>,
    /// Size-biased tail for engagement-weighted rows.
    weighted: LogNormal<f64>,
    followers: LogNormal<f64>,
    following: LogNormal<f64>,
    tweet_count: LogNormal<f64>,
    scores: Vec<(String, [Beta<f64>; 3])>,
}

impl StratumDists {
    fn build(s: &StratumSynth) -> Result<StratumDists> {
        let tail = s.engagement_tail;
        let dist = |mu: f64| {
            LogNormal::new(mu, tail.log_sd)
                .map_err(|e| Error::config(format!("engagement tail: {e}")))
        };
        let beta = |b: BetaParams| {
            Beta::new(b.alpha, b.beta).map_err(|e| Error::config(format!("score model: {e}")))
        };
        let mut scores = Vec::new();
        for (model, sm) in &s.score_models {
            scores.push((
                model.clone(),
                [beta(sm.hate)?, beta(sm.offensive)?, beta(sm.neutral)?],
            ));
        }
        Ok(StratumDists {
            body: dist(tail.log_mean)?,
            weighted: dist(tail.log_mean + tail.log_sd * tail.log_sd)?,
            followers: LogNormal::new(6.0, 2.0).expect("static params"),
            following: LogNormal::new(5.3, 1.2).expect("static params"),
            tweet_count: LogNormal::new(7.5, 1.8).expect("static params"),
            scores,
        })
    }

    fn score_dist(&self, idx: usize, label: Label) -> &Beta<f64> {
        let class = match label {
            Label::Hate => 0,
            Label::Offensive => 1,
            Label::Neutral => 2,
        };
        &self.scores[idx].1[class]
    }
}

/// Split `total` into likes/replies/retweets/quotes with the fixed
/// multinomial proportions, via the conditional binomial chain.
fn split_engagement(rng: &mut ChaCha8Rng, total: u64) -> [u64; 4] {
    let mut out = [0u64; 4];
    let mut remaining = total;
    let mut mass_left = 1.0;
    for i in 0..3 {
        if remaining == 0 {
            break;
        }
        let p = (ENGAGEMENT_SPLIT[i] / mass_left).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, p)
            .expect("p clamped to [0, 1]")
            .sample(rng);
        out[i] = draw;
        remaining -= draw;
        mass_left -= ENGAGEMENT_SPLIT[i];
    }
    out[3] = remaining;
    out
}

fn draw_removal(rng: &mut ChaCha8Rng, rate: f64) -> (bool, RemovalReason) {
    if rng.random::<f64>() < rate {
        let u: f64 = rng.random();
        let reason = if u < SUSPENDED_SHARE {
            RemovalReason::Suspended
        } else if u < SUSPENDED_SHARE + DEACTIVATED_SHARE {
            RemovalReason::Deactivated
        } else {
            RemovalReason::DeletedOrUnknown
        };
        (true, reason)
    } else {
        (false, RemovalReason::None)
    }
}

fn generate_row(
    rng: &mut ChaCha8Rng,
    stratum: &str,
    cfg: &StratumSynth,
    dists: &StratumDists,
    kind: SampleKind,
    index: u64,
    author_pool: u64,
) -> AnnotatedTweet {
    let u: f64 = rng.random();
    let label = if u < cfg.p_hate {
        Label::Hate
    } else if u < cfg.p_hate + cfg.p_offensive {
        Label::Offensive
    } else {
        Label::Neutral
    };
    let violent = match label {
        Label::Hate => Some(rng.random::<f64>() < cfg.p_violent_given_hate),
        _ => None,
    };

    let total: u64 = match kind {
        SampleKind::Random => {
            if label == Label::Hate {
                if rng.random::<f64>() < cfg.zero_engagement_share_hate {
                    0
                } else {
                    (dists.body.sample(rng).round() as u64).max(1)
                }
            } else {
                dists.body.sample(rng).round() as u64
            }
        }
        // Engagement-weighted rows come from the size-biased tail and are
        // never zero: a tweet with no engagement has no sampling weight.
        SampleKind::EngagementWeighted => (dists.weighted.sample(rng).round() as u64).max(1),
    };
    let [likes, replies, retweets, quotes] = split_engagement(rng, total);

    let (removed, removal_reason) = draw_removal(rng, cfg.removal_rates.rate_for(label));

    let mut scores = BTreeMap::new();
    for (idx, (model, _)) in dists.scores.iter().enumerate() {
        scores.insert(model.clone(), dists.score_dist(idx, label).sample(rng));
    }

    let scam = cfg.p_scam.map(|p| rng.random::<f64>() < p);
    let adult = cfg.p_adult.map(|p| rng.random::<f64>() < p);

    let author_idx = rng.random_range(0..author_pool);
    let author_verified = rng.random::<f64>() < 0.015;
    let followers = dists.followers.sample(rng).round() as u64;
    let following = dists.following.sample(rng).round() as u64;
    let tweet_count = (dists.tweet_count.sample(rng).round() as u64).max(1);
    let p_reply = if label == Label::Hate { 0.65 } else { 0.55 };
    let is_reply = rng.random::<f64>() < p_reply;
    let p_sensitive = if label == Label::Hate { 0.06 } else { 0.01 };
    let possibly_sensitive = rng.random::<f64>() < p_sensitive;

    let kind_tag = match kind {
        SampleKind::Random => 'r',
        SampleKind::EngagementWeighted => 'w',
    };
    let tweet_id = format!("{stratum}-{kind_tag}{index:07}");
    let text = Some(format!("synthetic post {tweet_id}"));

    AnnotatedTweet {
        tweet_id,
        stratum: stratum.to_string(),
        sample_kind: kind,
        primary_label: label,
        violent,
        scam,
        adult,
        likes,
        replies,
        retweets,
        quotes,
        removed,
        removal_reason,
        author_id: format!("u-{stratum}-{author_idx}"),
        author_verified,
        followers,
        following,
        tweet_count,
        is_reply,
        possibly_sensitive,
        scores,
        text,
    }
}

/// Generate a synthetic corpus from `config`.
///
/// Strata are generated in sorted code order, each from its own RNG
/// substream, so output is identical across runs, platforms, and thread
/// counts.
pub fn generate_synthetic(config: &SynthConfig) -> Result<Corpus> {
    config.validate()?;
    let mut rows = Vec::new();
    for (code, s) in &config.strata {
        let mut rng = stratum_rng(config.seed, code);
        let dists = StratumDists::build(s)?;
        let author_pool = (s.n * 9 / 10).max(1);
        for i in 0..s.n {
            rows.push(generate_row(
                &mut rng,
                code,
                s,
                &dists,
                SampleKind::Random,
                i,
                author_pool,
            ));
        }
        for i in 0..s.ew_n() {
            rows.push(generate_row(
                &mut rng,
                code,
                s,
                &dists,
                SampleKind::EngagementWeighted,
                i,
                author_pool,
            ));
        }
    }
    Ok(Corpus::new(
        rows,
        CorpusSource::Generator { seed: config.seed },
    ))
}
