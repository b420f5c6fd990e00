//! `sc2wm`: one entry point wiring the world-model toolkit end to end.
//!
//! Subcommands cover the full pipeline: validate corpora (`parse`), build
//! instruction-tuning datasets (`build-dataset`), roll scenarios forward
//! (`simulate`), run predictor backends over windows (`predict`), score
//! predictions offline (`evaluate`), run Generate-Simulate-Refine episodes
//! (`agent run`), and aggregate online match metrics (`report online`).
//!
//! Every subcommand accepts `--config <file>` (TOML or JSON mirroring the
//! `RunConfig` keys); explicit flags override file values, and the merged
//! config is persisted next to the outputs. Exit codes: 0 on success, 1 on
//! data errors (with the first failing record's locator), 2 on usage
//! errors. Machine-readable output goes to files only; standard output
//! carries a human summary.

mod cmd;
mod config;
mod error;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cmd::agent::AgentCommand;
use cmd::dataset::BuildDatasetArgs;
use cmd::evaluate::EvaluateArgs;
use cmd::parse::ParseArgs;
use cmd::predict::PredictArgs;
use cmd::report::ReportCommand;
use cmd::simulate::SimulateArgs;

#[derive(Parser)]
#[command(name = "sc2wm", version, about = "StarCraft II world-model toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus file record by record.
    Parse(ParseArgs),
    /// Window trajectories into a split dynamics-prediction dataset.
    BuildDataset(BuildDatasetArgs),
    /// Roll scripted scenarios forward into 1 Hz trajectories.
    Simulate(SimulateArgs),
    /// Predict future observations for a windows corpus.
    Predict(PredictArgs),
    /// Score predictions against ground truth across four dimensions.
    Evaluate(EvaluateArgs),
    /// Run world-model agent episodes.
    Agent {
        #[command(subcommand)]
        command: AgentCommand,
    },
    /// Aggregate reports over recorded artifacts.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Parse(args) => cmd::parse::run(args),
        Command::BuildDataset(args) => cmd::dataset::run(args),
        Command::Simulate(args) => cmd::simulate::run(args),
        Command::Predict(args) => cmd::predict::run(args),
        Command::Evaluate(args) => cmd::evaluate::run(args),
        Command::Agent { command } => match command {
            AgentCommand::Run(args) => cmd::agent::run(args),
        },
        Command::Report { command } => match command {
            ReportCommand::Online(args) => cmd::report::run(args),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
