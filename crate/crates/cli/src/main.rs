//! `modaudit` — command-line surface of the moderation-audit pipeline.
//!
//! One dispatcher, nine subcommands, deterministic outputs: every
//! subcommand resolves a [`config::RunConfig`] (defaults ← JSON config
//! file ← flags), runs the corresponding library pipeline, and writes
//! CSV plot data plus a JSON summary report. Identical inputs and seed
//! produce byte-identical outputs at any worker count.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "modaudit",
    version,
    about = "Audit pipeline for content moderation: synthetic corpora, prevalence and \
             exposure estimates, ranker evaluation, triage simulation, and staffing costs",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// JSON run-config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed for every randomized stage.
    #[arg(long, global = true, env = "MODAUDIT_SEED", value_name = "U64")]
    seed: Option<u64>,

    /// Threads for parallel stages; 0 or absent uses all cores.
    /// Results never depend on this, only wall-clock time does.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Directory receiving report and plot-data files.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic annotated corpus.
    Synth(commands::synth::SynthArgs),
    /// Per-stratum counts, removal rates, and suspension rates.
    Summarize(commands::summarize::SummarizeArgs),
    /// Bootstrap prevalence, platform volumes, and user exposure.
    Prevalence(commands::prevalence::PrevalenceArgs),
    /// Evaluate score models as rankers: AP, PR curves, top bins.
    EvalRanker(commands::eval_ranker::EvalRankerArgs),
    /// Inter-annotator agreement from a rating table.
    Agreement(commands::agreement::AgreementArgs),
    /// Linear probability and engagement models with robust errors.
    Regress(commands::regress::RegressArgs),
    /// Coverage and avoided-engagement curves over moderator grids.
    Simulate(commands::simulate::SimulateArgs),
    /// Cost a moderator allocation that meets an outcome target.
    Allocate(commands::allocate::AllocateArgs),
    /// Allocation-cost sensitivity across workforce parameters.
    Sweep(commands::sweep::SweepArgs),
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = config::resolve(
        cli.global.config.as_deref(),
        cli.global.seed,
        cli.global.out_dir.as_deref(),
    )?;
    match &cli.command {
        Command::Synth(args) => commands::synth::run(&cfg, args),
        Command::Summarize(args) => commands::summarize::run(&cfg, args),
        Command::Prevalence(args) => commands::prevalence::run(&cfg, args),
        Command::EvalRanker(args) => commands::eval_ranker::run(&cfg, args),
        Command::Agreement(args) => commands::agreement::run(&cfg, args),
        Command::Regress(args) => commands::regress::run(&cfg, args),
        Command::Simulate(args) => commands::simulate::run(&cfg, args),
        Command::Allocate(args) => commands::allocate::run(&cfg, args),
        Command::Sweep(args) => commands::sweep::run(&cfg, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.workers {
        // A second configuration attempt in the same process is harmless:
        // results are pool-size independent by construction.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if matches!(err, CliError::Usage(_)) {
                eprintln!("Run `modaudit --help` for usage.");
            }
            ExitCode::from(err.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_internally_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn seed_flag_and_env_both_reach_the_parser() {
        let cli = Cli::try_parse_from(["modaudit", "summarize", "c.csv", "--seed", "7"]).unwrap();
        assert_eq!(cli.global.seed, Some(7));

        let err = Cli::try_parse_from(["modaudit", "nonsense"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);

        let err = Cli::try_parse_from(["modaudit"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
