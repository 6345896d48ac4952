//! `synth` — generate a synthetic annotated corpus.
//!
//! The generator configuration comes from the run config's `synth`
//! section; without one, the default eight-language configuration is
//! used. The generator seed always equals the run seed, so `--seed`
//! fully determines the corpus.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use modaudit_core::corpus::{
    generate_synthetic, summarize_strata, write_corpus, CorpusFormat, SynthConfig,
};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{path_str, write_report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for CorpusFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => CorpusFormat::Csv,
            FormatArg::Jsonl => CorpusFormat::Jsonl,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Corpus file to write; defaults to `<out-dir>/synthetic.csv`.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Corpus file format; defaults to the extension of `--out`.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

pub fn run(cfg: &RunConfig, args: &SynthArgs) -> CliResult<()> {
    let mut synth_cfg = cfg
        .synth
        .clone()
        .unwrap_or_else(|| SynthConfig::default_eight_strata(cfg.seed));
    synth_cfg.seed = cfg.seed;

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| cfg.out_dir.join("synthetic.csv"));
    let format: CorpusFormat = match args.format {
        Some(f) => f.into(),
        None => CorpusFormat::infer(&out)?,
    };

    let corpus = generate_synthetic(&synth_cfg)?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    write_corpus(&corpus, &out, format)?;

    let results = json!({
        "out": path_str(&out),
        "format": match format {
            CorpusFormat::Csv => "csv",
            CorpusFormat::Jsonl => "jsonl",
        },
        "rows": corpus.len(),
        "strata": corpus.strata().iter().collect::<Vec<_>>(),
        "summary": summarize_strata(&corpus),
    });
    write_report(&cfg.out_dir, "synth", cfg, "tableS5", results)?;
    Ok(())
}
