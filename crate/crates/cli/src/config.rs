//! Experiment configuration: command-line flags layered over an optional JSON
//! file, resolved into a validated [`ExperimentConfig`].
//!
//! Precedence, per field: flag, then config file, then (for the output
//! directory only) `RADOPT_OUT_DIR`, then the built-in default.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use radopt_core::bounds::ZetaVariant;
use radopt_core::optim::{validate_schedule, Beta1, LearningRate, ScheduleReport};
use radopt_core::{OptimizerKind, Schedule};

use crate::error::{CliError, CliResult};

pub const OUT_DIR_ENV: &str = "RADOPT_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "radopt-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum Task {
    #[serde(rename = "embed")]
    Embed,
    #[serde(rename = "pca")]
    Pca,
    #[serde(rename = "toy-convex", alias = "toy")]
    #[value(name = "toy-convex", alias = "toy")]
    Toy,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Embed => "embed",
            Task::Pca => "pca",
            Task::Toy => "toy-convex",
        }
    }
}

/// Flags shared by `run`, `embed`, `pca`, `toy` and `matrix`. Every flag can
/// also be given as a key of the same name (with underscores) in `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with any of the keys below; flags override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// rsgd | radagrad | radam | ramsgrad [default: ramsgrad]
    #[arg(long = "opt", alias = "optimizer", value_name = "NAME")]
    pub optimizer: Option<String>,
    /// Learning rate α, or α₀ when --eta is given [default: 0.3 embed, 0.1 pca, 0.05 toy-convex]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Diminishing rate αₙ = α/n^η; omit for a constant rate
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Constant momentum β₁ [default: 0.9]; exclusive with --lambda
    #[arg(long, allow_negative_numbers = true)]
    pub beta1: Option<f64>,
    /// Geometric momentum β₁ₙ = λⁿ; exclusive with --beta1
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Second-moment decay β₂ [default: 0.999]
    #[arg(long, allow_negative_numbers = true)]
    pub beta2: Option<f64>,
    /// ε added to v̂ [default: 1e-8]
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Epochs run at a reduced rate at the start of embed training [default: 0]
    #[arg(long)]
    pub burn_in_epochs: Option<usize>,
    /// Rate multiplier during burn-in [default: 0.01]
    #[arg(long, allow_negative_numbers = true)]
    pub burn_in_factor: Option<f64>,
    /// Accumulate ε into v̂ instead of adding it in the denominator only [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub accumulate_epsilon: Option<bool>,

    /// Input file: edge-list TSV (embed) or matrix CSV (pca)
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Synthetic input instead of --data: tree:B:D, random:N, mammals (embed); spiked:N:D:l1,l2,... (pca)
    #[arg(long, value_name = "SPEC")]
    pub synthetic: Option<String>,
    /// Apply the transitive closure to the edge list [default: true]
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub closure: Option<bool>,

    /// Embedding dimension [default: 5]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Negatives per positive pair [default: 10]
    #[arg(long)]
    pub negatives: Option<usize>,
    /// Training epochs for embed [default: 50]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Reconstruction evaluation period in epochs, 0 for final only [default: 1]
    #[arg(long)]
    pub eval_every: Option<usize>,

    /// Number of principal components [default: 3]
    #[arg(long)]
    pub k: Option<usize>,
    /// Minibatch size for pca [default: 32]
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Iterations for pca and toy-convex [default: 5000 pca, 10000 toy-convex]
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Ball components of the toy-convex task [default: 4]
    #[arg(long)]
    pub components: Option<usize>,
    /// Metrics and bound rows every this many iterations [default: 100]
    #[arg(long)]
    pub log_every: Option<usize>,

    /// Random seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: $RADOPT_OUT_DIR, else radopt-out]
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// printed | literature: which ζ(κ, c) the bound report uses [default: printed]
    #[arg(long, value_name = "VARIANT")]
    pub zeta_variant: Option<String>,
    /// Write the Theorem-1 bound report [default: true]
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub bound_report: Option<bool>,
    /// Warn instead of failing when the schedule breaks the convergence hypotheses [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub allow_hypothesis_violation: Option<bool>,
}

/// The JSON config file. Same keys as the flags; unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub task: Option<Task>,
    pub optimizer: Option<String>,
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub beta1: Option<f64>,
    pub lambda: Option<f64>,
    pub beta2: Option<f64>,
    pub eps: Option<f64>,
    pub burn_in_epochs: Option<usize>,
    pub burn_in_factor: Option<f64>,
    pub accumulate_epsilon: Option<bool>,
    pub data: Option<PathBuf>,
    pub synthetic: Option<String>,
    pub closure: Option<bool>,
    pub dim: Option<usize>,
    pub negatives: Option<usize>,
    pub epochs: Option<usize>,
    pub eval_every: Option<usize>,
    pub k: Option<usize>,
    pub batch_size: Option<usize>,
    pub iterations: Option<usize>,
    pub components: Option<usize>,
    pub log_every: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub zeta_variant: Option<String>,
    pub bound_report: Option<bool>,
    pub allow_hypothesis_violation: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// A fully resolved and validated experiment. Serializes to a JSON file that
/// is itself a valid `--config`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub task: Task,
    pub optimizer: String,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub beta2: f64,
    pub eps: f64,
    pub burn_in_epochs: usize,
    pub burn_in_factor: f64,
    pub accumulate_epsilon: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<String>,
    pub closure: bool,
    pub dim: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub eval_every: usize,
    pub k: usize,
    pub batch_size: usize,
    pub iterations: usize,
    pub components: usize,
    pub log_every: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub zeta_variant: String,
    pub bound_report: bool,
    pub allow_hypothesis_violation: bool,
}

impl ExperimentConfig {
    /// Layers `args` over the file named by `--config` and fills defaults.
    /// `task` comes from the command line (subcommand or positional) when
    /// given, otherwise from the file.
    pub fn resolve(task: Option<Task>, args: &RunArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        Self::merge(task, args, file, std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
    }

    pub fn merge(task: Option<Task>, a: &RunArgs, f: FileConfig, env_out: Option<PathBuf>) -> CliResult<Self> {
        let task = task.or(f.task).ok_or_else(|| {
            CliError::Config("no task given: use `run <embed|pca|toy-convex>` or set \"task\" in --config".into())
        })?;

        // β₁ and λ describe one quantity, so the layer that mentions either wins as a whole
        let (beta1, lambda) =
            if a.beta1.is_some() || a.lambda.is_some() { (a.beta1, a.lambda) } else { (f.beta1, f.lambda) };
        if beta1.is_some() && lambda.is_some() {
            return Err(CliError::Config("beta1 and lambda are exclusive: give a constant or a geometric β₁".into()));
        }
        let beta1 = if lambda.is_none() { Some(beta1.unwrap_or(0.9)) } else { None };

        let (alpha, iterations) = match task {
            Task::Embed => (0.3, 0),
            Task::Pca => (0.1, 5000),
            Task::Toy => (0.05, 10_000),
        };
        let cfg = ExperimentConfig {
            task,
            optimizer: a.optimizer.clone().or(f.optimizer).unwrap_or_else(|| "ramsgrad".into()),
            alpha: a.alpha.or(f.alpha).unwrap_or(alpha),
            eta: a.eta.or(f.eta),
            beta1,
            lambda,
            beta2: a.beta2.or(f.beta2).unwrap_or(0.999),
            eps: a.eps.or(f.eps).unwrap_or(1e-8),
            burn_in_epochs: a.burn_in_epochs.or(f.burn_in_epochs).unwrap_or(0),
            burn_in_factor: a.burn_in_factor.or(f.burn_in_factor).unwrap_or(0.01),
            accumulate_epsilon: a.accumulate_epsilon.or(f.accumulate_epsilon).unwrap_or(false),
            data: a.data.clone().or(f.data),
            synthetic: a.synthetic.clone().or(f.synthetic),
            closure: a.closure.or(f.closure).unwrap_or(true),
            dim: a.dim.or(f.dim).unwrap_or(5),
            negatives: a.negatives.or(f.negatives).unwrap_or(10),
            epochs: a.epochs.or(f.epochs).unwrap_or(50),
            eval_every: a.eval_every.or(f.eval_every).unwrap_or(1),
            k: a.k.or(f.k).unwrap_or(3),
            batch_size: a.batch_size.or(f.batch_size).unwrap_or(32),
            iterations: a.iterations.or(f.iterations).unwrap_or(iterations),
            components: a.components.or(f.components).unwrap_or(4),
            log_every: a.log_every.or(f.log_every).unwrap_or(100),
            seed: a.seed.or(f.seed).unwrap_or(0),
            out_dir: a.out_dir.clone().or(f.out_dir).or(env_out).unwrap_or_else(|| DEFAULT_OUT_DIR.into()),
            zeta_variant: a.zeta_variant.clone().or(f.zeta_variant).unwrap_or_else(|| "printed".into()),
            bound_report: a.bound_report.or(f.bound_report).unwrap_or(true),
            allow_hypothesis_violation: a.allow_hypothesis_violation.or(f.allow_hypothesis_violation).unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn optimizer_kind(&self) -> CliResult<OptimizerKind> {
        self.optimizer.parse().map_err(CliError::config)
    }

    pub fn zeta(&self) -> CliResult<ZetaVariant> {
        self.zeta_variant.parse().map_err(CliError::config)
    }

    pub fn schedule(&self) -> Schedule<f64> {
        Schedule {
            learning_rate: match self.eta {
                None => LearningRate::Constant(self.alpha),
                Some(eta) => LearningRate::Diminishing { alpha0: self.alpha, eta },
            },
            beta1: match self.lambda {
                Some(l) => Beta1::Geometric(l),
                None => Beta1::Constant(self.beta1.unwrap_or(0.9)),
            },
            beta2: self.beta2,
            epsilon: self.eps,
            burn_in_epochs: self.burn_in_epochs,
            burn_in_factor: self.burn_in_factor,
        }
    }

    /// Checks value ranges and the schedule. A hypothesis violation is an
    /// error unless `allow_hypothesis_violation` is set, in which case it is
    /// reported on stderr.
    pub fn validate(&self) -> CliResult<()> {
        self.optimizer_kind()?;
        self.zeta()?;
        self.schedule().validate().map_err(CliError::config)?;
        let positive = [
            ("log_every", self.log_every),
            ("batch_size", self.batch_size),
            ("k", self.k),
            ("dim", self.dim),
            ("components", self.components),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::Config(format!("{name} must be at least 1")));
        }
        if self.task == Task::Embed && self.negatives == 0 {
            return Err(CliError::Config("negatives must be at least 1".into()));
        }
        if self.data.is_some() && self.synthetic.is_some() {
            return Err(CliError::Config("data and synthetic are exclusive".into()));
        }
        if self.task != Task::Toy && self.data.is_none() && self.synthetic.is_none() {
            return Err(CliError::Config(format!(
                "the {} task needs --data FILE or --synthetic SPEC",
                self.task.name()
            )));
        }
        if let Some(warning) = self.hypothesis_check()? {
            eprintln!("warning: {warning}; proceeding because hypothesis violations are allowed");
        }
        Ok(())
    }

    /// `Ok(Some(message))` for a tolerated violation.
    pub fn hypothesis_check(&self) -> CliResult<Option<String>> {
        match validate_schedule(&self.schedule()) {
            ScheduleReport::Ok => Ok(None),
            violation => {
                let msg = violation.into_result().expect_err("not ok").to_string();
                if self.allow_hypothesis_violation {
                    Ok(Some(msg))
                } else {
                    Err(CliError::Config(format!("{msg} (pass --allow-hypothesis-violation to run anyway)")))
                }
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}
