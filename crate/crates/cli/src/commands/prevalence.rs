//! `prevalence` — bootstrap prevalence per stratum, optional platform
//! extrapolation, and expected user exposure.
//!
//! Each stratum's estimate draws from its own seed substream, so adding
//! or removing strata never changes any other stratum's interval.

use std::path::PathBuf;

use clap::Args;
use modaudit_core::prevalence::{
    estimate_prevalence, expected_exposure, extrapolate_platform_volume, ExposureParams,
    PrevalenceEstimate, VolumeTarget,
};
use modaudit_core::stats::ConfidenceSpec;
use serde_json::json;

use crate::commands::{load_corpus_at, stratum_seed, volumes_at};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{path_str, write_csv, write_report, Cell};

#[derive(Debug, Args)]
pub struct PrevalenceArgs {
    /// Corpus file (CSV or JSONL); may also come from the config.
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// Volume table for platform extrapolation; skipped when absent.
    #[arg(long, value_name = "PATH")]
    pub volumes: Option<PathBuf>,

    /// Bootstrap replicates.
    #[arg(long, value_name = "N")]
    pub b: Option<u32>,

    /// Confidence level.
    #[arg(long, value_name = "P")]
    pub level: Option<f64>,

    /// Tweets a user views per day when converting prevalence to
    /// expected exposure.
    #[arg(long, value_name = "F", default_value_t = 200.0)]
    pub tweets_per_day: f64,
}

fn estimate_rows(estimates: &[PrevalenceEstimate]) -> Vec<Vec<Cell>> {
    estimates
        .iter()
        .map(|e| {
            vec![
                Cell::from(e.stratum.as_str()),
                Cell::from(e.n as u64),
                Cell::from(e.n_hate),
                Cell::from(e.n_violent),
                Cell::from(e.p_hate),
                Cell::from(e.ci_hate.lo),
                Cell::from(e.ci_hate.hi),
                Cell::from(e.p_violent),
                Cell::from(e.ci_violent.lo),
                Cell::from(e.ci_violent.hi),
                Cell::from(e.wilson_fallback_hate.as_ref().map(|i| i.hi)),
                Cell::from(e.wilson_fallback_violent.as_ref().map(|i| i.hi)),
            ]
        })
        .collect()
}

pub fn run(cfg: &RunConfig, args: &PrevalenceArgs) -> CliResult<()> {
    let mut cfg = cfg.clone();
    if let Some(b) = args.b {
        cfg.b = b;
    }
    if let Some(level) = args.level {
        cfg.level = level;
    }
    let path = cfg.corpus_path(&args.corpus)?;
    let corpus = load_corpus_at(&path)?;
    let spec = ConfidenceSpec::from_level(cfg.level)?;

    let strata: Vec<String> = corpus.strata().iter().cloned().collect();
    let estimates: Vec<PrevalenceEstimate> = strata
        .iter()
        .map(|s| {
            Ok(estimate_prevalence(
                &corpus,
                s,
                cfg.b,
                stratum_seed(cfg.seed, s),
                &spec,
            )?)
        })
        .collect::<CliResult<_>>()?;

    let header = [
        "stratum",
        "n",
        "n_hate",
        "n_violent",
        "p_hate",
        "hate_lo",
        "hate_hi",
        "p_violent",
        "violent_lo",
        "violent_hi",
        "wilson_hate_hi",
        "wilson_violent_hi",
    ];
    let csv_path = write_csv(
        &cfg.out_dir,
        "prevalence.csv",
        &header,
        &estimate_rows(&estimates),
    )?;

    let platform = match args.volumes.clone().or_else(|| cfg.volumes.clone()) {
        None => None,
        Some(volumes_path) => {
            let (volumes, _) = volumes_at(&volumes_path)?;
            let hate =
                extrapolate_platform_volume(&estimates, &volumes, VolumeTarget::Hate, &spec)?;
            let violent = extrapolate_platform_volume(
                &estimates,
                &volumes,
                VolumeTarget::ViolentHate,
                &spec,
            )?;
            let params = ExposureParams {
                f: args.tweets_per_day,
            };
            let exposure = json!({
                "tweets_viewed_per_day": params.f,
                "hate_tweets_per_user_day":
                    expected_exposure(hate.pooled_prevalence(), &params)?,
                "violent_hate_tweets_per_user_day":
                    expected_exposure(violent.pooled_prevalence(), &params)?,
            });
            Some(json!({
                "volumes": path_str(&volumes_path),
                "hate": hate,
                "violent_hate": violent,
                "exposure": exposure,
            }))
        }
    };

    let results = json!({
        "corpus": path_str(&path),
        "plot_data": path_str(&csv_path),
        "per_stratum": estimates,
        "platform": platform,
    });
    write_report(&cfg.out_dir, "prevalence", &cfg, "figS1", results)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::testutil;
    use modaudit_core::corpus::{write_corpus, CorpusFormat};

    #[test]
    fn prevalence_reports_per_stratum_intervals_and_platform_volume() {
        let dir = tempfile::tempdir().unwrap();
        let corpus_path = dir.path().join("c.csv");
        write_corpus(&testutil::corpus(), &corpus_path, CorpusFormat::Csv).unwrap();
        let volumes_path = dir.path().join("v.csv");
        std::fs::write(&volumes_path, "stratum,T\nar,1000000\nen,4000000\n").unwrap();

        let cfg = RunConfig {
            out_dir: dir.path().join("out"),
            ..RunConfig::default()
        };
        let args = PrevalenceArgs {
            corpus: Some(corpus_path),
            volumes: Some(volumes_path),
            b: Some(80),
            level: None,
            tweets_per_day: 200.0,
        };
        run(&cfg, &args).unwrap();

        let report: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("out/prevalence_report.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(
            report["results"]["per_stratum"].as_array().unwrap().len(),
            2
        );
        // 6 hate of 30 random rows per stratum -> pooled prevalence 0.2,
        // so the platform point estimate is 0.2 * 5e6 = 1e6.
        let h = report["results"]["platform"]["hate"]["h_point"]
            .as_f64()
            .unwrap();
        assert!((h - 1.0e6).abs() < 1e-6);
        let exposure = report["results"]["platform"]["exposure"]["hate_tweets_per_user_day"]
            .as_f64()
            .unwrap();
        assert!((exposure - 0.2 * 200.0).abs() < 1e-9);

        let csv = std::fs::read_to_string(dir.path().join("out/prevalence.csv")).unwrap();
        assert_eq!(csv.lines().count(), 3);
    }
}
