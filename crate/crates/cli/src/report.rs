//! Report emission: the JSON summary envelope and CSV plot-data files.
//!
//! Every subcommand produces one JSON report with top-level keys
//! `{command, config, results, paper_figure_ref}`, written both to
//! `<out_dir>/<command>_report.json` (dashes replaced by underscores)
//! and to stdout. All numbers are rounded to 9 significant digits with
//! round-half-even before serialization, so identical runs produce
//! byte-identical files on every platform.

use std::path::{Path, PathBuf};

use modaudit_core::numfmt::{fmt_f64, round_json_floats};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliResult;

/// The JSON summary envelope.
#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub results: Value,
    pub paper_figure_ref: &'a str,
}

/// Serialize the report (rounded), write it under `out_dir`, and echo it
/// to stdout. Returns the report path.
pub fn write_report(
    out_dir: &Path,
    command: &str,
    config: &RunConfig,
    figure_ref: &str,
    results: Value,
) -> CliResult<PathBuf> {
    let report = Report {
        command,
        config,
        results,
        paper_figure_ref: figure_ref,
    };
    let mut value = serde_json::to_value(&report)?;
    round_json_floats(&mut value);
    let text = format!("{}\n", serde_json::to_string_pretty(&value)?);

    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(format!("{}_report.json", command.replace('-', "_")));
    std::fs::write(&path, &text)?;
    print!("{text}");
    Ok(path)
}

/// A cell of a CSV plot-data file. Floats go through the shared rounding
/// so CSV and JSON agree; absent values serialize as empty cells.
pub enum Cell {
    Str(String),
    Float(f64),
    Int(u64),
    Opt(Option<f64>),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Float(x) => fmt_f64(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Opt(Some(x)) => fmt_f64(*x),
            Cell::Opt(None) => String::new(),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_string())
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::Opt(x)
    }
}

/// Write one CSV file under `out_dir` and return its path.
pub fn write_csv(
    out_dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> CliResult<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    let mut writer = csv::Writer::from_path(&path)?;
    writer.write_record(header)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        writer.write_record(row.iter().map(Cell::render))?;
    }
    writer.flush()?;
    Ok(path)
}

/// `path` as a displayable string for report JSON.
pub fn path_str(path: &Path) -> String {
    path.display().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_has_the_four_envelope_keys_and_rounded_floats() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::default();
        let results = serde_json::json!({ "x": 0.123_456_789_123_456_78 });
        let path = write_report(dir.path(), "eval-ranker", &cfg, "fig3", results).unwrap();
        assert!(path.ends_with("eval_ranker_report.json"));

        let text = std::fs::read_to_string(&path).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let obj = v.as_object().unwrap();
        for key in ["command", "config", "results", "paper_figure_ref"] {
            assert!(obj.contains_key(key), "missing key {key}");
        }
        assert_eq!(obj["command"], "eval-ranker");
        assert_eq!(obj["paper_figure_ref"], "fig3");
        // 9 significant digits, round-half-even.
        assert_eq!(obj["results"]["x"].as_f64().unwrap(), 0.123456789);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn csv_cells_render_floats_consistently_and_blanks_for_none() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![vec![
            Cell::from("ar"),
            Cell::from(0.25),
            Cell::from(3u64),
            Cell::from(None),
        ]];
        let path = write_csv(dir.path(), "t.csv", &["s", "x", "n", "o"], &rows).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, "s,x,n,o\nar,0.25,3,\n");
    }
}
