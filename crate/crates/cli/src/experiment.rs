//! Runs one configured experiment and writes its artifacts:
//!
//! | file          | content                                                    |
//! |---------------|------------------------------------------------------------|
//! | `config.json` | the resolved configuration (valid as `--config`)           |
//! | `metrics.csv` | per-epoch (embed) or per-logged-iteration (pca, toy) rows  |
//! | `timing.csv`  | wall-clock stages, kept apart so metrics are reproducible  |
//! | `bounds.csv`  | Theorem-1 terms per logged `n`, with the measured average  |
//! | model         | `embedding.tsv`, `u.csv` or `points.csv`                   |

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use radopt_core::bounds::{averaged_suboptimality, bound_report, BoundParams, BoundRow};
use radopt_core::embed::{
    evaluate_reconstruction, initial_table, train_embeddings_with, write_embeddings, EmbedConfig, RelationSet,
};
use radopt_core::pca::{pca_loss, svd_oracle, train_pca, PcaConfig, PcaProblem};
use radopt_core::toy::{run_toy, ToyConvex};
use radopt_core::{Optimizer, PoincareBall, RunTrace};

use crate::config::ExperimentConfig;
use crate::data::Dataset;
use crate::error::{CliError, CliResult};
use crate::output::{fmt, fmt_opt, with_outputs, Outputs};

/// What a finished run reports back.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub line: String,
    pub out_dir: PathBuf,
}

pub fn run_experiment(cfg: &ExperimentConfig, data: &Dataset) -> CliResult<RunSummary> {
    with_outputs(&cfg.out_dir, |out| {
        out.write_text("config.json", &cfg.to_json())?;
        let line = match data {
            Dataset::Relations(r) => run_embed(cfg, r, out)?,
            Dataset::Matrix(p) => run_pca(cfg, p, out)?,
            Dataset::Toy(t) => run_toy_task(cfg, t, out)?,
        };
        Ok(RunSummary { line: format!("{line} -> {}", out.dir().display()), out_dir: out.dir().to_path_buf() })
    })
}

/// `1`, every multiple of `every`, and `n_max`.
pub fn logged_indices(n_max: usize, every: usize) -> Vec<usize> {
    let mut v: Vec<usize> = std::iter::once(1).chain((every..=n_max).step_by(every.max(1))).collect();
    v.push(n_max);
    v.retain(|&n| n >= 1 && n <= n_max);
    v.dedup();
    v
}

fn write_bounds(out: &mut Outputs, rows: &[BoundRow<f64>]) -> CliResult<usize> {
    let mut w = out.csv("bounds.csv", "bounds", &["n", "term1", "term2", "term3", "total", "measured"])?;
    let mut exceeded = 0;
    for r in rows {
        if r.measured.is_some_and(|m| m > r.total) {
            exceeded += 1;
        }
        w.row([r.n.to_string(), fmt(r.term1), fmt(r.term2), fmt(r.term3), fmt(r.total), fmt_opt(r.measured)])?;
    }
    w.finish()?;
    Ok(exceeded)
}

fn bound_params(cfg: &ExperimentConfig, g: f64, d: f64, kappas: Vec<f64>) -> CliResult<BoundParams<f64>> {
    let mut p = BoundParams::new(g, d, kappas, cfg.schedule());
    p.zeta_variant = cfg.zeta()?;
    p.empirical = true;
    Ok(p)
}

struct Timer {
    start: Instant,
    rows: Vec<(String, u128)>,
}

impl Timer {
    fn new() -> Self {
        Self { start: Instant::now(), rows: Vec::new() }
    }

    fn mark(&mut self, stage: impl Into<String>) {
        self.rows.push((stage.into(), self.start.elapsed().as_millis()));
    }

    fn write(self, out: &mut Outputs) -> CliResult<()> {
        let mut w = out.csv("timing.csv", "timing", &["stage", "elapsed_ms"])?;
        for (stage, ms) in &self.rows {
            w.row([stage.clone(), ms.to_string()])?;
        }
        w.finish()
    }
}

fn run_embed(cfg: &ExperimentConfig, r: &RelationSet, out: &mut Outputs) -> CliResult<String> {
    let mut ec = EmbedConfig::new(cfg.optimizer_kind()?, cfg.schedule());
    ec.dim = cfg.dim;
    ec.epochs = cfg.epochs;
    ec.negatives = cfg.negatives;
    ec.seed = cfg.seed;
    ec.accumulate_epsilon = cfg.accumulate_epsilon;
    ec.eval_every = cfg.eval_every;
    ec.validate().map_err(CliError::config)?;
    if r.num_pairs() == 0 {
        return Err(CliError::Config("the relation set has no pairs".into()));
    }

    let mut timer = Timer::new();
    let init = evaluate_reconstruction(&initial_table::<f64>(r, cfg.dim, cfg.seed), r).map_err(CliError::runtime)?;
    timer.mark("init_eval");
    let t0 = timer.start;
    let mut epoch_marks = Vec::new();
    let (table, trace) = train_embeddings_with(r, &ec, |rec| {
        epoch_marks.push((format!("epoch {}", rec.epoch + 1), t0.elapsed().as_millis()))
    })
    .map_err(CliError::runtime)?;
    timer.rows.extend(epoch_marks);

    let mut w =
        out.csv("metrics.csv", "metrics-embed", &["epoch", "mean_loss", "mean_rank", "map", "alpha", "beta1"])?;
    w.row(["0".into(), String::new(), fmt(init.mean_rank), fmt(init.map), String::new(), String::new()])?;
    for e in &trace.epochs {
        w.row([
            (e.epoch + 1).to_string(),
            fmt(e.mean_loss),
            fmt_opt(e.mean_rank),
            fmt_opt(e.map),
            fmt(e.alpha),
            fmt(e.beta1),
        ])?;
    }
    w.finish()?;

    let path = out.file("embedding.tsv");
    let f = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    write_embeddings(&table, BufWriter::new(f)).map_err(|e| CliError::io(&path, e))?;

    if cfg.bound_report {
        let rows = if trace.is_empty() {
            Vec::new()
        } else {
            let ball = PoincareBall::<f64>::new(cfg.dim);
            let p = bound_params(cfg, trace.observed_gradient_bound(), ball.diameter(), vec![-1.0; r.num_nouns()])?;
            let logged: Vec<usize> = (1..=cfg.epochs).map(|e| e * r.num_pairs()).collect();
            bound_report(&p, &trace, None, &logged, false).map_err(CliError::runtime)?
        };
        write_bounds(out, &rows)?;
    }
    timer.mark("total");
    timer.write(out)?;

    let last = trace.epochs.iter().rev().find(|e| e.map.is_some());
    let (rank, map) = match last {
        Some(e) => (e.mean_rank.unwrap_or(init.mean_rank), e.map.unwrap_or(init.map)),
        None => (init.mean_rank, init.map),
    };
    let loss = trace.epochs.last().map_or("n/a".into(), |e| format!("{:.4}", e.mean_loss));
    Ok(format!(
        "embed [{}]: {} nouns, {} pairs, {} epochs, final loss {loss}, MAP {:.4} (init {:.4}), mean rank {:.3}",
        cfg.optimizer,
        r.num_nouns(),
        r.num_pairs(),
        cfg.epochs,
        map,
        init.map,
        rank
    ))
}

fn run_pca(cfg: &ExperimentConfig, p: &PcaProblem<f64>, out: &mut Outputs) -> CliResult<String> {
    if cfg.iterations == 0 {
        return Err(CliError::Config("iterations must be at least 1".into()));
    }
    let mut timer = Timer::new();
    let sol = svd_oracle(p);
    timer.mark("svd_oracle");
    let mut pc = PcaConfig::new(cfg.optimizer_kind()?, cfg.schedule());
    pc.batch_size = cfg.batch_size;
    pc.iterations = cfg.iterations;
    pc.seed = cfg.seed;
    pc.accumulate_epsilon = cfg.accumulate_epsilon;
    // the averaged suboptimality in the bound report needs f at every iterate
    pc.eval_every = if cfg.bound_report { 1 } else { cfg.log_every };
    let (u, trace) = train_pca(p, &pc, Some(&sol)).map_err(CliError::runtime)?;
    timer.mark("train");

    let f_star = sol.f_value;
    let gap = |f: f64| (f - f_star).max(0.0);
    let mut w = out.csv("metrics.csv", "metrics-pca", &["iter", "f", "gap", "relative_gap", "alpha"])?;
    for it in (0..cfg.iterations).step_by(cfg.log_every) {
        let s = &trace.steps[it];
        let f = s.objective.expect("objective recorded at logged iterations");
        w.row([it.to_string(), fmt(f), fmt(gap(f)), fmt(gap(f) / f_star.abs()), fmt(s.alpha)])?;
    }
    let f_final = pca_loss(p, &u).map_err(CliError::runtime)?;
    w.row([
        cfg.iterations.to_string(),
        fmt(f_final),
        fmt(gap(f_final)),
        fmt(gap(f_final) / f_star.abs()),
        String::new(),
    ])?;
    w.finish()?;

    let k = p.k();
    let header: Vec<String> = (1..=k).map(|j| format!("u{j}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut w = out.csv("u.csv", "stiefel-point", &header)?;
    for row in u.mat().rows() {
        w.row(row.iter().map(|&x| fmt(x)))?;
    }
    w.finish()?;

    if cfg.bound_report {
        // Stiefel is not Hadamard: κ = 0 and the chordal diameter 2√k make
        // this a formal evaluation of the bound, not a guarantee
        let bp = bound_params(cfg, trace.observed_gradient_bound(), 2.0 * (k as f64).sqrt(), vec![0.0])?;
        let logged = logged_indices(cfg.iterations, cfg.log_every);
        let rows = bound_report(&bp, &trace, Some(f_star), &logged, false).map_err(CliError::runtime)?;
        write_bounds(out, &rows)?;
    }
    timer.mark("total");
    timer.write(out)?;

    let rel = gap(f_final) / f_star.abs();
    Ok(format!(
        "pca [{}]: {}x{} data, k = {k}, {} iterations, f = {f_final:.6}, f* = {f_star:.6}, relative gap {rel:.3e}",
        cfg.optimizer,
        p.n(),
        p.d(),
        cfg.iterations
    ))
}

fn run_toy_task(cfg: &ExperimentConfig, toy: &ToyConvex<f64>, out: &mut Outputs) -> CliResult<String> {
    if cfg.iterations == 0 {
        return Err(CliError::Config("iterations must be at least 1".into()));
    }
    let mut timer = Timer::new();
    let opt = Optimizer::new(cfg.optimizer_kind()?, cfg.schedule()).accumulate_epsilon(cfg.accumulate_epsilon);
    let (points, trace): (_, RunTrace<f64>) = run_toy(toy, &opt, cfg.iterations).map_err(CliError::runtime)?;
    timer.mark("train");

    let avg = averaged_suboptimality(&trace, toy.f_star()).map_err(CliError::runtime)?;
    let logged = logged_indices(cfg.iterations, cfg.log_every);
    let mut w = out.csv("metrics.csv", "metrics-toy", &["n", "f", "avg_suboptimality", "alpha", "beta1"])?;
    for &n in &logged {
        let s = &trace.steps[n - 1];
        w.row([n.to_string(), fmt_opt(s.objective), fmt(avg[n - 1]), fmt(s.alpha), fmt(s.beta1)])?;
    }
    w.finish()?;

    let mut w = out.csv("points.csv", "ball-points", &["component", "x1", "x2"])?;
    for (i, x) in points.iter().enumerate() {
        w.row(std::iter::once(i.to_string()).chain(x.coords().iter().map(|&c| fmt(c))))?;
    }
    w.finish()?;

    let mut verdict = String::new();
    if cfg.bound_report {
        let mut bp = toy.bound_params(cfg.schedule());
        bp.zeta_variant = cfg.zeta()?;
        let rows = bound_report(&bp, &trace, Some(toy.f_star()), &logged, false).map_err(CliError::runtime)?;
        let exceeded = write_bounds(out, &rows)?;
        verdict = if exceeded == 0 {
            format!(", bound holds at all {} logged n", rows.len())
        } else {
            format!(", bound exceeded at {exceeded} of {} logged n", rows.len())
        };
    }
    timer.mark("total");
    timer.write(out)?;

    Ok(format!(
        "toy-convex [{}]: {} components, {} iterations, averaged suboptimality {:.4e}{verdict}",
        cfg.optimizer,
        toy.num_components(),
        cfg.iterations,
        avg.last().copied().unwrap_or(f64::NAN)
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logged_indices_cover_ends() {
        assert_eq!(logged_indices(250, 100), vec![1, 100, 200, 250]);
        assert_eq!(logged_indices(200, 100), vec![1, 100, 200]);
        assert_eq!(logged_indices(1, 100), vec![1]);
        assert_eq!(logged_indices(3, 1), vec![1, 2, 3]);
    }
}
