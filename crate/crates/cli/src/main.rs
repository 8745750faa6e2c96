//! `radopt`: experiment driver for Riemannian adaptive optimization.

mod commands;
mod config;
mod data;
mod error;
mod experiment;
mod matrix;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, RunArgs, Task};
use crate::error::{CliError, CliResult};

const AFTER_HELP: &str = "\
Exit status: 0 success, 2 configuration error, 3 runtime or numeric error, 4 I/O error.
Precedence: command-line flags, then --config JSON, then RADOPT_OUT_DIR (output directory only), then defaults.";

#[derive(Debug, Parser)]
#[command(name = "radopt", version, about = "Riemannian adaptive optimizers: Poincaré embeddings, Stiefel PCA and convergence-bound checks", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment; the task may instead come from --config
    Run {
        #[arg(value_enum)]
        task: Option<Task>,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Train Poincaré embeddings of an edge list (same as `run embed`)
    Embed(RunArgs),
    /// Stochastic PCA on the Stiefel manifold (same as `run pca`)
    Pca(RunArgs),
    /// Deterministic toy problem with a checkable bound (same as `run toy-convex`)
    #[command(name = "toy", alias = "toy-convex")]
    Toy(RunArgs),
    /// Run a built-in optimizer matrix over one task and compare the variants
    Matrix(MatrixArgs),
    /// Re-evaluate a saved embedding against an edge list
    Eval(commands::EvalArgs),
    /// Evaluate the convergence bounds from parameters alone
    Bounds(commands::BoundsArgs),
}

#[derive(Debug, Args)]
struct MatrixArgs {
    /// constant-paper (CS1..CA4) or diminishing-paper (DS1..DA4)
    name: String,
    /// Task the variants run [default: embed]
    #[arg(long, value_enum)]
    task: Option<Task>,
    /// Comma-separated subset of variant labels
    #[arg(long, value_name = "LABELS")]
    only: Option<String>,
    #[command(flatten)]
    args: RunArgs,
}

fn run_one(task: Option<Task>, args: &RunArgs) -> CliResult<String> {
    let cfg = ExperimentConfig::resolve(task, args)?;
    let data = data::load_dataset(&cfg)?;
    Ok(experiment::run_experiment(&cfg, &data)?.line)
}

fn run_matrix(m: &MatrixArgs) -> CliResult<String> {
    let variants = matrix::select(matrix::builtin(&m.name)?, m.only.as_deref())?;
    let task = m.task.or_else(|| m.args.config.is_none().then_some(Task::Embed));
    let template = ExperimentConfig::resolve(task, &m.args)?;
    let data = data::load_dataset(&template)?;
    let outcomes = matrix::run_matrix(&template, &variants, &data)?;
    for o in &outcomes {
        match &o.result {
            Ok(s) => {
                let note = o.note.as_deref().map(|n| format!(" [warning: {n}]")).unwrap_or_default();
                eprintln!("{}: {}{note}", o.variant.label, s.line);
            }
            Err(e) => eprintln!("{}: {e}", o.variant.label),
        }
    }
    let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
    let line = format!(
        "matrix {} [{}]: {} of {} variants succeeded -> {}",
        m.name,
        template.task.name(),
        outcomes.len() - failed,
        outcomes.len(),
        template.out_dir.display()
    );
    if failed > 0 {
        return Err(CliError::Runtime(line));
    }
    Ok(line)
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let (line, to_stdout) = match &cli.command {
        Command::Run { task, args } => (run_one(*task, args)?, true),
        Command::Embed(a) => (run_one(Some(Task::Embed), a)?, true),
        Command::Pca(a) => (run_one(Some(Task::Pca), a)?, true),
        Command::Toy(a) => (run_one(Some(Task::Toy), a)?, true),
        Command::Matrix(m) => (run_matrix(m)?, true),
        Command::Eval(a) => (commands::eval(a)?, true),
        // CSV goes to stdout when no --out is given
        Command::Bounds(a) => (commands::bounds(a)?, a.out.is_some()),
    };
    if to_stdout {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("radopt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
