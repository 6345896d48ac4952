//! Run configuration: defaults, JSON config files, and flag overrides.
//!
//! Precedence, highest first: command-line flag (for `--seed`, the
//! `MODAUDIT_SEED` environment variable acts as the flag's default),
//! then the `--config` JSON file, then built-in defaults.

use std::path::{Path, PathBuf};

use modaudit_core::corpus::SynthConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// One run's effective configuration, echoed verbatim in every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Annotated corpus (CSV or JSONL, inferred from the extension).
    pub corpus: Option<PathBuf>,
    /// Daily tweet-volume table (`stratum,T`).
    pub volumes: Option<PathBuf>,
    /// Hourly wage table (`stratum,hourly_wage_usd`).
    pub wages: Option<PathBuf>,
    /// Reported staffing table (`stratum,reported_moderators`).
    pub staffing: Option<PathBuf>,
    /// Master seed; every randomized stage derives substreams from it.
    pub seed: u64,
    /// Bootstrap replicates.
    pub b: u32,
    /// Confidence level for every interval.
    pub level: f64,
    /// Ranking weight between predicted hatefulness and engagement.
    pub alpha: f64,
    /// Independent reviewers per tweet.
    pub k: f64,
    /// Tweets reviewed per moderator-hour.
    pub r: f64,
    /// Working hours per moderator-day.
    pub h: f64,
    /// Directory that receives report and plot-data files.
    pub out_dir: PathBuf,
    /// Optional synthetic-generator section used by `synth`; its own
    /// seed field is ignored in favor of the run seed.
    pub synth: Option<SynthConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            volumes: None,
            wages: None,
            staffing: None,
            seed: 42,
            b: 1000,
            level: 0.95,
            alpha: 0.5,
            k: 3.0,
            r: 100.0,
            h: 8.0,
            out_dir: PathBuf::from("out"),
            synth: None,
        }
    }
}

impl RunConfig {
    /// Read a config file; a malformed or unknown-field file is a usage
    /// error, since it makes the invocation itself invalid.
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config `{}`: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config `{}`: {e}", path.display())))
    }

    /// The corpus path, from an explicit flag if given.
    pub fn corpus_path(&self, flag: &Option<PathBuf>) -> CliResult<PathBuf> {
        flag.clone().or_else(|| self.corpus.clone()).ok_or_else(|| {
            CliError::Usage("no corpus given; pass --corpus or set `corpus` in the config".into())
        })
    }

    /// The volume-table path, from an explicit flag if given.
    pub fn volumes_path(&self, flag: &Option<PathBuf>) -> CliResult<PathBuf> {
        flag.clone()
            .or_else(|| self.volumes.clone())
            .ok_or_else(|| {
                CliError::Usage(
                    "no volume table given; pass --volumes or set `volumes` in the config".into(),
                )
            })
    }

    /// The wage-table path, from an explicit flag if given.
    pub fn wages_path(&self, flag: &Option<PathBuf>) -> CliResult<PathBuf> {
        flag.clone().or_else(|| self.wages.clone()).ok_or_else(|| {
            CliError::Usage("no wage table given; pass --wages or set `wages` in the config".into())
        })
    }

    /// The staffing-table path, from an explicit flag if given; staffing
    /// is always optional, so absence is not an error.
    pub fn staffing_path(&self, flag: &Option<PathBuf>) -> Option<PathBuf> {
        flag.clone().or_else(|| self.staffing.clone())
    }
}

/// Fold the global flags into the file/default config.
pub fn resolve(
    file: Option<&Path>,
    seed: Option<u64>,
    out_dir: Option<&Path>,
) -> CliResult<RunConfig> {
    let mut cfg = match file {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(d) = out_dir {
        cfg.out_dir = d.to_path_buf();
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_documented_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.b, 1000);
        assert_eq!(cfg.level, 0.95);
        assert_eq!(cfg.alpha, 0.5);
        assert_eq!((cfg.k, cfg.r, cfg.h), (3.0, 100.0, 8.0));
        assert_eq!(cfg.out_dir, PathBuf::from("out"));
    }

    #[test]
    fn flags_override_file_values_and_file_overrides_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"seed": 7, "b": 50, "level": 0.9}"#).unwrap();

        let from_file = resolve(Some(&path), None, None).unwrap();
        assert_eq!(from_file.seed, 7);
        assert_eq!(from_file.b, 50);
        assert_eq!(from_file.level, 0.9);
        assert_eq!(from_file.alpha, 0.5);

        let overridden = resolve(Some(&path), Some(99), Some(Path::new("reports"))).unwrap();
        assert_eq!(overridden.seed, 99);
        assert_eq!(overridden.out_dir, PathBuf::from("reports"));
        assert_eq!(overridden.b, 50);
    }

    #[test]
    fn unknown_config_fields_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"sede": 7}"#).unwrap();
        match RunConfig::load(&path) {
            Err(CliError::Usage(msg)) => assert!(msg.contains("sede")),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn missing_required_paths_are_usage_errors() {
        let cfg = RunConfig::default();
        assert!(matches!(cfg.corpus_path(&None), Err(CliError::Usage(_))));
        let flag = Some(PathBuf::from("c.csv"));
        assert_eq!(cfg.corpus_path(&flag).unwrap(), PathBuf::from("c.csv"));
    }
}
