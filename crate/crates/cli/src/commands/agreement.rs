//! `agreement` — inter-annotator agreement from a rating table.
//!
//! Two input shapes, both CSV:
//! * Fleiss: header `item,<category>,...` with one count column per
//!   category; each row holds one item's rating counts.
//! * Cohen: header `item,rater_a,rater_b` with one label pair per row.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use modaudit_core::stats::{cohens_kappa, fleiss_kappa, AgreementResult};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::{path_str, write_report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    /// Fleiss' kappa over per-item category counts (any rater count).
    Fleiss,
    /// Cohen's kappa over two raters' paired labels.
    Cohen,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    /// Rating table (CSV, shape depends on --kind).
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,

    /// Which agreement statistic to compute.
    #[arg(long, value_enum)]
    pub kind: KindArg,
}

fn read_fleiss(path: &PathBuf) -> CliResult<(Vec<String>, Vec<Vec<u64>>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let cols: Vec<String> = headers.iter().map(str::to_string).collect();
    if cols.first().map(String::as_str) != Some("item") || cols.len() < 3 {
        return Err(CliError::Data(format!(
            "fleiss table must have columns item,<category>,... with at least two \
             categories; got {}",
            cols.join(",")
        )));
    }
    let categories = cols[1..].to_vec();
    let mut counts = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row: Vec<u64> = record
            .iter()
            .skip(1)
            .map(|cell| {
                cell.trim()
                    .parse::<u64>()
                    .map_err(|e| CliError::Data(format!("row {}: bad count `{cell}`: {e}", i + 2)))
            })
            .collect::<CliResult<_>>()?;
        if row.len() != categories.len() {
            return Err(CliError::Data(format!(
                "row {}: expected {} count cells, got {}",
                i + 2,
                categories.len(),
                row.len()
            )));
        }
        counts.push(row);
    }
    Ok((categories, counts))
}

fn read_cohen(path: &PathBuf) -> CliResult<Vec<(String, String)>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols != ["item", "rater_a", "rater_b"] {
        return Err(CliError::Data(format!(
            "cohen table must have columns item,rater_a,rater_b; got {}",
            cols.join(",")
        )));
    }
    let mut pairs = Vec::new();
    for record in reader.records() {
        let record = record?;
        pairs.push((record[1].to_string(), record[2].to_string()));
    }
    Ok(pairs)
}

pub fn run(cfg: &RunConfig, args: &AgreementArgs) -> CliResult<()> {
    let (result, detail): (AgreementResult, serde_json::Value) = match args.kind {
        KindArg::Fleiss => {
            let (categories, counts) = read_fleiss(&args.input)?;
            let result = fleiss_kappa(&counts)?;
            (result, json!({ "categories": categories }))
        }
        KindArg::Cohen => {
            let pairs = read_cohen(&args.input)?;
            let mut labels: Vec<&String> = pairs.iter().flat_map(|(a, b)| [a, b]).collect();
            labels.sort();
            labels.dedup();
            let result = cohens_kappa(&pairs)?;
            (result, json!({ "labels": labels }))
        }
    };

    let figure = match args.kind {
        KindArg::Fleiss => "tableS2",
        KindArg::Cohen => "tableS3",
    };
    let results = json!({
        "input": path_str(&args.input),
        "agreement": result,
        "detail": detail,
    });
    write_report(&cfg.out_dir, "agreement", cfg, figure, results)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fleiss_input_parses_counts_and_rejects_bad_headers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "item,hate,offensive,neutral\nt1,3,0,0\nt2,1,1,1\n").unwrap();
        let (categories, counts) = read_fleiss(&path).unwrap();
        assert_eq!(categories, ["hate", "offensive", "neutral"]);
        assert_eq!(counts, vec![vec![3, 0, 0], vec![1, 1, 1]]);

        std::fs::write(&path, "id,hate\nt1,3\n").unwrap();
        assert!(matches!(read_fleiss(&path), Err(CliError::Data(_))));
    }

    #[test]
    fn agreement_reports_kappa_for_both_kinds() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            out_dir: dir.path().join("out"),
            ..RunConfig::default()
        };

        let fleiss = dir.path().join("f.csv");
        std::fs::write(&fleiss, "item,a,b\nt1,3,0\nt2,0,3\nt3,2,1\n").unwrap();
        run(
            &cfg,
            &AgreementArgs {
                input: fleiss,
                kind: KindArg::Fleiss,
            },
        )
        .unwrap();
        let report: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("out/agreement_report.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(report["results"]["agreement"]["kind"], "fleiss");
        assert_eq!(report["paper_figure_ref"], "tableS2");

        let cohen = dir.path().join("c.csv");
        std::fs::write(&cohen, "item,rater_a,rater_b\nt1,x,x\nt2,x,y\nt3,y,y\n").unwrap();
        run(
            &cfg,
            &AgreementArgs {
                input: cohen,
                kind: KindArg::Cohen,
            },
        )
        .unwrap();
        let report: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("out/agreement_report.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(report["results"]["agreement"]["kind"], "cohen");
        assert_eq!(report["results"]["detail"]["labels"], json!(["x", "y"]));
    }
}
