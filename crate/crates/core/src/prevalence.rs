//! Prevalence estimation with a joint three-category bootstrap,
//! platform-scale volume extrapolation, and expected-exposure arithmetic.
//!
//! Each random-sample row falls into exactly one of three categories —
//! violent hate, non-violent hate, or non-hate — and every bootstrap
//! replicate resamples rows jointly across the three, so the hate and
//! violent-hate replicate shares stay coupled (`p_violent ≤ p_hate` holds
//! inside every draw). Replicate `b` draws from the [`crate::seed`]
//! substream at index `b`, which makes the result independent of how many
//! worker threads execute the resampling.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, SampleKind};
use crate::error::{Error, Result};
use crate::seed::substream;
use crate::stats::{quantile_type7, wilson_interval, ConfidenceSpec, Interval};

/// Daily original-tweet volume for one stratum (`T_ℓ` in the volume
/// extrapolation); treated as fixed and measured without error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageVolume {
    pub stratum: String,
    /// Daily original-tweet count.
    #[serde(rename = "T")]
    pub t: f64,
}

/// Tweets a user is assumed to view per day when converting pooled
/// prevalence into expected exposure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExposureParams {
    /// Tweets viewed per user-day.
    pub f: f64,
}

impl Default for ExposureParams {
    fn default() -> Self {
        ExposureParams { f: 200.0 }
    }
}

/// Joint prevalence estimate for one stratum, over its random-sample rows.
#[derive(Debug, Clone, Serialize)]
pub struct PrevalenceEstimate {
    pub stratum: String,
    /// Random-sample rows the estimate is based on.
    pub n: usize,
    pub n_hate: u64,
    pub n_violent: u64,
    /// Share of rows labeled hate (violent or non-violent).
    pub p_hate: f64,
    /// Share of rows labeled violent hate.
    pub p_violent: f64,
    /// Percentile-bootstrap interval for `p_hate`.
    pub ci_hate: Interval,
    /// Percentile-bootstrap interval for `p_violent`.
    pub ci_violent: Interval,
    /// One-sided Wilson upper bound, set only when no hate rows were
    /// observed and the bootstrap interval is therefore degenerate at 0.
    pub wilson_fallback_hate: Option<Interval>,
    /// As above, for the violent-hate count.
    pub wilson_fallback_violent: Option<Interval>,
    pub b: u32,
    pub seed: u64,
    /// Per-replicate `(p_hate, p_violent)` pairs, kept for paired
    /// extrapolation across strata.
    #[serde(skip)]
    replicates: Vec<(f64, f64)>,
}

impl PrevalenceEstimate {
    /// Per-replicate `(p_hate, p_violent)` pairs, in replicate order.
    pub fn replicates(&self) -> &[(f64, f64)] {
        &self.replicates
    }
}

/// Which prevalence margin to extrapolate to platform volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeTarget {
    Hate,
    ViolentHate,
}

impl VolumeTarget {
    fn pick(self, pair: (f64, f64)) -> f64 {
        match self {
            VolumeTarget::Hate => pair.0,
            VolumeTarget::ViolentHate => pair.1,
        }
    }

    fn point(self, est: &PrevalenceEstimate) -> f64 {
        match self {
            VolumeTarget::Hate => est.p_hate,
            VolumeTarget::ViolentHate => est.p_violent,
        }
    }
}

/// One stratum's contribution to the platform-level volume.
#[derive(Debug, Clone, Serialize)]
pub struct StratumVolume {
    pub stratum: String,
    /// Prevalence used for this stratum (selected margin).
    pub p: f64,
    /// Daily original-tweet count `T_ℓ`.
    pub t: f64,
    /// Daily volume estimate `Ĥ_ℓ = p̂_ℓ · T_ℓ`.
    pub h: f64,
}

/// Platform-level daily volume `H = Σ_ℓ p̂_ℓ·T_ℓ` with a paired-replicate
/// percentile interval.
#[derive(Debug, Clone, Serialize)]
pub struct PlatformVolume {
    pub target: VolumeTarget,
    pub h_point: f64,
    pub h_lo: f64,
    pub h_hi: f64,
    pub per_stratum: Vec<StratumVolume>,
    /// Total daily tweet volume across the covered strata.
    pub total_t: f64,
    pub b: u32,
}

impl PlatformVolume {
    /// Volume-weighted pooled prevalence `H / Σ T_ℓ`.
    pub fn pooled_prevalence(&self) -> f64 {
        if self.total_t > 0.0 {
            self.h_point / self.total_t
        } else {
            0.0
        }
    }
}

/// Category codes for the joint resampler: 0 non-hate, 1 non-violent hate,
/// 2 violent hate.
fn categorize(corpus: &Corpus, stratum: &str) -> Result<Vec<u8>> {
    let rows = corpus.sample_rows(stratum, SampleKind::Random)?;
    if rows.is_empty() {
        return Err(Error::invalid(format!(
            "stratum `{stratum}` has no random-sample rows"
        )));
    }
    Ok(rows
        .iter()
        .map(|r| {
            if r.is_violent_hate() {
                2
            } else if r.is_hate() {
                1
            } else {
                0
            }
        })
        .collect())
}

fn shares(cats: &[u8]) -> (f64, f64) {
    let n = cats.len() as f64;
    let hate = cats.iter().filter(|&&c| c >= 1).count() as f64;
    let violent = cats.iter().filter(|&&c| c == 2).count() as f64;
    (hate / n, violent / n)
}

/// Estimate hate and violent-hate prevalence in one stratum's
/// random-sample rows, with a joint three-category percentile bootstrap
/// (`B` replicates seeded from `seed`).
pub fn estimate_prevalence(
    corpus: &Corpus,
    stratum: &str,
    b: u32,
    seed: u64,
    spec: &ConfidenceSpec,
) -> Result<PrevalenceEstimate> {
    if b == 0 {
        return Err(Error::invalid("bootstrap needs at least one replicate"));
    }
    let cats = categorize(corpus, stratum)?;
    let n = cats.len();
    let n_hate = cats.iter().filter(|&&c| c >= 1).count() as u64;
    let n_violent = cats.iter().filter(|&&c| c == 2).count() as u64;
    let (p_hate, p_violent) = shares(&cats);

    let replicates: Vec<(f64, f64)> = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, u64::from(i));
            let mut hate = 0u64;
            let mut violent = 0u64;
            for _ in 0..n {
                match cats[rng.random_range(0..n)] {
                    2 => {
                        hate += 1;
                        violent += 1;
                    }
                    1 => hate += 1,
                    _ => {}
                }
            }
            (hate as f64 / n as f64, violent as f64 / n as f64)
        })
        .collect();

    let tail = spec.tail();
    let mut hate_reps: Vec<f64> = replicates.iter().map(|r| r.0).collect();
    let mut violent_reps: Vec<f64> = replicates.iter().map(|r| r.1).collect();
    hate_reps.sort_by(f64::total_cmp);
    violent_reps.sort_by(f64::total_cmp);
    let ci_hate = Interval {
        lo: quantile_type7(&hate_reps, tail),
        hi: quantile_type7(&hate_reps, 1.0 - tail),
    };
    let ci_violent = Interval {
        lo: quantile_type7(&violent_reps, tail),
        hi: quantile_type7(&violent_reps, 1.0 - tail),
    };

    let wilson_fallback_hate = if n_hate == 0 {
        let (_, hi) = wilson_interval(0, n as u64, spec)?;
        Some(Interval { lo: 0.0, hi })
    } else {
        None
    };
    let wilson_fallback_violent = if n_violent == 0 {
        let (_, hi) = wilson_interval(0, n as u64, spec)?;
        Some(Interval { lo: 0.0, hi })
    } else {
        None
    };

    Ok(PrevalenceEstimate {
        stratum: stratum.to_string(),
        n,
        n_hate,
        n_violent,
        p_hate,
        p_violent,
        ci_hate,
        ci_violent,
        wilson_fallback_hate,
        wilson_fallback_violent,
        b,
        seed,
        replicates,
    })
}

/// Extrapolate per-stratum prevalence to a platform-wide daily volume
/// `H = Σ_ℓ p̂_ℓ·T_ℓ`. The interval pairs replicate `b` across strata
/// (`H⁽ᵇ⁾ = Σ_ℓ p̂_ℓ⁽ᵇ⁾·T_ℓ`), so every estimate must carry the same
/// replicate count. Volumes for strata without an estimate are ignored.
pub fn extrapolate_platform_volume(
    estimates: &[PrevalenceEstimate],
    volumes: &[LanguageVolume],
    target: VolumeTarget,
    spec: &ConfidenceSpec,
) -> Result<PlatformVolume> {
    if estimates.is_empty() {
        return Err(Error::invalid("no prevalence estimates to extrapolate"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for est in estimates {
        if !seen.insert(est.stratum.as_str()) {
            return Err(Error::invalid(format!(
                "duplicate prevalence estimate for stratum `{}`",
                est.stratum
            )));
        }
    }
    let b = estimates[0].b;
    if estimates.iter().any(|e| e.b != b) {
        return Err(Error::invalid(
            "paired extrapolation needs the same replicate count in every stratum",
        ));
    }

    let mut vol_by_stratum = std::collections::BTreeMap::new();
    for v in volumes {
        if !v.t.is_finite() || v.t < 0.0 {
            return Err(Error::invalid(format!(
                "volume for stratum `{}` must be finite and non-negative, got {}",
                v.stratum, v.t
            )));
        }
        if vol_by_stratum.insert(v.stratum.as_str(), v.t).is_some() {
            return Err(Error::invalid(format!(
                "duplicate volume entry for stratum `{}`",
                v.stratum
            )));
        }
    }

    let mut per_stratum = Vec::with_capacity(estimates.len());
    let mut h_point = 0.0;
    let mut total_t = 0.0;
    for est in estimates {
        let t = *vol_by_stratum
            .get(est.stratum.as_str())
            .ok_or_else(|| Error::MissingEntry {
                table: "volume",
                stratum: est.stratum.clone(),
            })?;
        let p = target.point(est);
        let h = p * t;
        h_point += h;
        total_t += t;
        per_stratum.push(StratumVolume {
            stratum: est.stratum.clone(),
            p,
            t,
            h,
        });
    }

    let mut h_reps: Vec<f64> = (0..b as usize)
        .map(|r| {
            estimates
                .iter()
                .map(|est| {
                    let t = vol_by_stratum[est.stratum.as_str()];
                    target.pick(est.replicates[r]) * t
                })
                .sum()
        })
        .collect();
    h_reps.sort_by(f64::total_cmp);
    let tail = spec.tail();

    Ok(PlatformVolume {
        target,
        h_point,
        h_lo: quantile_type7(&h_reps, tail),
        h_hi: quantile_type7(&h_reps, 1.0 - tail),
        per_stratum,
        total_t,
        b,
    })
}

/// Expected hateful tweets seen per user-day: `p_pooled × F`.
pub fn expected_exposure(p_pooled: f64, params: &ExposureParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_pooled) {
        return Err(Error::invalid(format!(
            "pooled prevalence must lie in [0, 1], got {p_pooled}"
        )));
    }
    if !params.f.is_finite() || params.f <= 0.0 {
        return Err(Error::invalid(format!(
            "tweets viewed per day must be positive and finite, got {}",
            params.f
        )));
    }
    Ok(p_pooled * params.f)
}

/// Read a volume table from CSV with header `stratum,T`; strata must be
/// unique and volumes non-negative.
pub fn load_volumes(path: &Path) -> Result<Vec<LanguageVolume>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let expected = ["stratum", "T"];
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::schema(format!(
            "volume table must have columns stratum,T; got {}",
            got.join(",")
        )));
    }
    let mut out: Vec<LanguageVolume> = Vec::new();
    for (i, record) in reader.deserialize::<LanguageVolume>().enumerate() {
        let row = record.map_err(|e| Error::row(i + 2, e.to_string()))?;
        if !row.t.is_finite() || row.t < 0.0 {
            return Err(Error::row(
                i + 2,
                format!("volume must be finite and non-negative, got {}", row.t),
            ));
        }
        if out.iter().any(|v| v.stratum == row.stratum) {
            return Err(Error::row(
                i + 2,
                format!("duplicate volume entry for stratum `{}`", row.stratum),
            ));
        }
        out.push(row);
    }
    if out.is_empty() {
        return Err(Error::schema("volume table has no rows"));
    }
    Ok(out)
}
