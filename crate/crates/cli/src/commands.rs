//! The `eval` and `bounds` subcommands.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::Args;

use radopt_core::bounds::{
    theorem1_series, theorem1_series_unchecked, theorem2_regret_bound, BoundParams, ZetaVariant,
};
use radopt_core::embed::{evaluate_reconstruction, read_embeddings, transitive_closure};
use radopt_core::optim::{validate_schedule, Beta1, LearningRate};
use radopt_core::trace::{ComponentRecord, StepRecord};
use radopt_core::{OptimizerKind, RunTrace, Schedule};

use crate::data::read_edges;
use crate::error::{CliError, CliResult};
use crate::experiment::logged_indices;
use crate::output::{fmt, CsvOut};

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Embedding TSV written by `embed`
    #[arg(long, value_name = "FILE")]
    pub embedding: PathBuf,
    /// Edge-list TSV to reconstruct
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,
    /// Apply the transitive closure to the edge list [default: true]
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set, value_name = "BOOL")]
    pub closure: bool,
    /// Write per-pair ranks (u, v, rank) to this CSV
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

pub fn eval(a: &EvalArgs) -> CliResult<String> {
    let f = File::open(&a.embedding).map_err(|e| CliError::io(&a.embedding, e))?;
    let table = read_embeddings::<f64, _>(BufReader::new(f)).map_err(|e| CliError::io(&a.embedding, e))?;
    let raw = read_edges(&a.data)?;
    let r = if a.closure { transitive_closure(&raw) } else { raw };
    let rep = evaluate_reconstruction(&table, &r).map_err(CliError::runtime)?;
    if let Some(path) = &a.out {
        let mut w = CsvOut::create(path, "eval-ranks", &["u", "v", "rank"])?;
        for (&(u, v), rank) in r.pairs().iter().zip(&rep.ranks) {
            w.row([r.nouns()[u].as_str(), r.nouns()[v].as_str(), &rank.to_string()])?;
        }
        w.finish()?;
    }
    Ok(format!(
        "eval: {} nouns, {} pairs, mean rank {:.4}, MAP {:.4}",
        r.num_nouns(),
        r.num_pairs(),
        rep.mean_rank,
        rep.map
    ))
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// 1: averaged-suboptimality bound per n; 2: RAMSGrad regret bound per horizon
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub theorem: u8,
    /// Gradient-norm bound G
    #[arg(long)]
    pub g: f64,
    /// Diameter bound D of each constraint set
    #[arg(long)]
    pub d: f64,
    /// Number of product components N
    #[arg(long, default_value_t = 1)]
    pub components: usize,
    /// Curvature lower bound κ shared by all components
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Learning rate α (α₀ with --eta); Theorem 2 always uses α/√t
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Diminishing exponent η for Theorem 1
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Constant β₁ [default: 0.9]; exclusive with --lambda
    #[arg(long, allow_negative_numbers = true, conflicts_with = "lambda")]
    pub beta1: Option<f64>,
    /// Geometric β₁ₙ = λⁿ
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0.999, allow_negative_numbers = true)]
    pub beta2: f64,
    #[arg(long, default_value_t = 1e-8, allow_negative_numbers = true)]
    pub eps: f64,
    /// Largest n (Theorem 1) or horizon T (Theorem 2)
    #[arg(long, default_value_t = 10_000)]
    pub n_max: usize,
    /// Row spacing; rows are also written at 1 and n_max
    #[arg(long, default_value_t = 100)]
    pub log_every: usize,
    /// printed | literature
    #[arg(long, default_value = "printed")]
    pub zeta_variant: String,
    /// Evaluate Theorem 1 even if the schedule breaks its hypotheses
    #[arg(long)]
    pub allow_hypothesis_violation: bool,
    /// Output CSV [default: stdout]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

impl BoundsArgs {
    fn params(&self) -> CliResult<BoundParams<f64>> {
        let schedule = Schedule {
            learning_rate: match (self.theorem, self.eta) {
                (2, Some(eta)) if eta != 0.5 => {
                    return Err(CliError::Config("Theorem 2 fixes αₜ = α/√t; omit --eta or pass 0.5".into()))
                }
                (2, _) => LearningRate::Diminishing { alpha0: self.alpha, eta: 0.5 },
                (_, Some(eta)) => LearningRate::Diminishing { alpha0: self.alpha, eta },
                (_, None) => LearningRate::Constant(self.alpha),
            },
            beta1: match self.lambda {
                Some(l) => Beta1::Geometric(l),
                None => Beta1::Constant(self.beta1.unwrap_or(0.9)),
            },
            ..Schedule::constant(self.alpha, 0.0, self.beta2, self.eps)
        };
        if self.components == 0 || self.n_max == 0 || self.log_every == 0 {
            return Err(CliError::Config("components, n-max and log-every must be at least 1".into()));
        }
        let mut p = BoundParams::new(self.g, self.d, vec![self.kappa; self.components], schedule);
        p.zeta_variant = self.zeta_variant.parse::<ZetaVariant>().map_err(CliError::config)?;
        p.validate().map_err(CliError::config)?;
        Ok(p)
    }
}

/// Worst-case trace for Theorem 2: every gradient and every `√v̂` at `G`,
/// so the trace-dependent sums take their largest admissible values.
fn worst_case_trace(p: &BoundParams<f64>, horizon: usize) -> RunTrace<f64> {
    let g = p.g;
    let comp = ComponentRecord { grad_norm: g, m_norm: Some(g), sqrt_v_hat: Some(g), step_norm: 0.0 };
    let mut trace = RunTrace::new(OptimizerKind::RamsGrad, false);
    trace.steps = (1..=horizon)
        .map(|t| StepRecord {
            n: t,
            epoch: 0,
            alpha: p.schedule.alpha(t),
            beta1: p.schedule.beta1(t),
            objective: None,
            max_grad_norm: g,
            max_m_norm: Some(g),
            max_sqrt_v_hat: Some(g),
            max_step_norm: 0.0,
            components: Some(vec![comp.clone(); p.num_components()]),
        })
        .collect();
    trace
}

pub fn bounds(a: &BoundsArgs) -> CliResult<String> {
    let p = a.params()?;
    let logged = logged_indices(a.n_max, a.log_every);
    let mut rows: Vec<[f64; 4]> = Vec::with_capacity(logged.len());
    let mut note = String::new();
    if a.theorem == 1 {
        let series = match validate_schedule(&p.schedule).into_result() {
            Ok(()) => theorem1_series(&p, a.n_max),
            Err(e) if a.allow_hypothesis_violation => {
                eprintln!("warning: {e}; evaluating anyway");
                note = " (hypotheses violated)".into();
                theorem1_series_unchecked(&p, a.n_max)
            }
            Err(e) => {
                return Err(CliError::Config(format!("{e} (pass --allow-hypothesis-violation to evaluate anyway)")))
            }
        }
        .map_err(CliError::config)?;
        rows.extend(logged.iter().map(|&n| {
            let t = series[n - 1];
            [t.term1, t.term2, t.term3, t.total]
        }));
    } else {
        let mut trace = worst_case_trace(&p, a.n_max);
        for &h in logged.iter().rev() {
            trace.steps.truncate(h);
            let t = theorem2_regret_bound(&trace, &p, a.alpha).map_err(CliError::config)?;
            rows.push([t.term1, t.term2, t.term3, t.total]);
        }
        rows.reverse();
    }

    let key = if a.theorem == 1 { "n" } else { "horizon" };
    let kind = format!("theorem{}-bound", a.theorem);
    let header = [key, "term1", "term2", "term3", "total"];
    match &a.out {
        Some(path) => write_rows(CsvOut::create(path, &kind, &header)?, &logged, &rows)?,
        None => write_rows(CsvOut::from_writer(std::io::stdout().lock(), "stdout", &kind, &header)?, &logged, &rows)?,
    }
    let last = rows.last().expect("at least one row");
    let mut line = format!("bounds: theorem {} at {key} = {}: total {:.6e}{note}", a.theorem, a.n_max, last[3]);
    if let Some(path) = &a.out {
        line.push_str(&format!(" -> {}", path.display()));
    }
    Ok(line)
}

fn write_rows<W: Write>(mut w: CsvOut<W>, logged: &[usize], rows: &[[f64; 4]]) -> CliResult<()> {
    for (n, r) in logged.iter().zip(rows) {
        w.row([n.to_string(), fmt(r[0]), fmt(r[1]), fmt(r[2]), fmt(r[3])])?;
    }
    w.finish()
}
