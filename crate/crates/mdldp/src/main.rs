use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mdldp::{export, run_experiment, Experiment, ExperimentKind, Format, HarnessError, Overrides};

/// Run multidimensional LDP attack and utility experiments.
#[derive(Parser)]
#[command(name = "mdldp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and exact attack accuracy over an epsilon grid.
    Analytic(RunArgs),
    /// Monte-Carlo attack accuracy against single-attribute oracles.
    AttackOracle(RunArgs),
    /// Re-identification across multiple surveys.
    Reident(RunArgs),
    /// Sampled-attribute inference against RS+FD / RS+RFD.
    AttrInfer(RunArgs),
    /// Estimation error of RS+FD versus RS+RFD.
    Mse(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Master seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (overrides `output`); stdout when neither is given.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    runs: Option<usize>,
    /// Worker threads (overrides `threads`, then MDLDP_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<(), HarnessError> {
    let overrides =
        Overrides { seed: args.seed, output: args.out, format: args.format, runs: args.runs, threads: args.threads };
    let exp = Experiment::from_file(&args.config, Some(kind), &overrides)?;
    let rows = run_experiment(&exp)?;
    match &exp.output {
        Some(path) => {
            export::export_results(&rows, exp.format, path)?;
            eprintln!("{}: {} rows written to {}", exp.kind, rows.len(), path.display());
        }
        None => {
            use std::io::Write;
            let bytes = export::render(&rows, exp.format)?;
            std::io::stdout().write_all(&bytes).map_err(|e| HarnessError::Io { path: "<stdout>".into(), source: e })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Analytic(a) => (ExperimentKind::AnalyticAcc, a),
        Command::AttackOracle(a) => (ExperimentKind::OracleAttack, a),
        Command::Reident(a) => (ExperimentKind::Reident, a),
        Command::AttrInfer(a) => (ExperimentKind::AttrInfer, a),
        Command::Mse(a) => (ExperimentKind::MseUtility, a),
    };
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
