use std::collections::HashMap;

use ndarray::Array1;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::evaluate_reconstruction;
use super::loss::loss_grad;
use super::relations::{sample_negatives, RelationSet};
use crate::error::{Error, Result};
use crate::optim::{Manifold, Optimizer, OptimizerKind, OptimizerState, PoincareBall, ProductTangent, Schedule};
use crate::poincare::BallPoint;
use crate::scalar::Real;
use crate::trace::{EpochRecord, RunTrace};

/// Initial coordinates are uniform in `[−INIT_RANGE, INIT_RANGE]`.
pub const INIT_RANGE: f64 = 1e-3;

/// One ball point per noun.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<T> {
    symbols: Vec<String>,
    points: Vec<BallPoint<T>>,
}

impl<T: Real> EmbeddingTable<T> {
    pub fn new(symbols: Vec<String>, points: Vec<BallPoint<T>>) -> Result<Self> {
        if symbols.len() != points.len() {
            return Err(Error::DimensionMismatch { expected: symbols.len(), found: points.len() });
        }
        if let Some(d) = points.first().map(BallPoint::dim) {
            if let Some(p) = points.iter().find(|p| p.dim() != d) {
                return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
            }
        }
        Ok(Self { symbols, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, BallPoint::dim)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn points(&self) -> &[BallPoint<T>] {
        &self.points
    }

    /// Largest Euclidean norm in the table.
    pub fn max_norm(&self) -> T {
        self.points.iter().map(BallPoint::norm).fold(T::zero(), T::max)
    }

    /// Reorders the table to follow `r`'s noun indices.
    pub fn aligned_to(&self, r: &RelationSet) -> Result<Vec<BallPoint<T>>> {
        if self.symbols.as_slice() == r.nouns() {
            return Ok(self.points.clone());
        }
        let index: HashMap<&str, usize> = self.symbols.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        r.nouns()
            .iter()
            .map(|s| {
                index.get(s.as_str()).map(|&i| self.points[i].clone()).ok_or_else(|| Error::MissingEmbedding(s.clone()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedConfig<T> {
    pub dim: usize,
    pub optimizer: OptimizerKind,
    pub schedule: Schedule<T>,
    pub epochs: usize,
    /// Negatives sampled per positive.
    pub negatives: usize,
    pub seed: u64,
    pub accumulate_epsilon: bool,
    /// Evaluate mean rank and MAP every this many epochs (and after the
    /// last); 0 disables evaluation during training.
    pub eval_every: usize,
}

impl<T: Real> EmbedConfig<T> {
    pub fn new(optimizer: OptimizerKind, schedule: Schedule<T>) -> Self {
        Self {
            dim: 5,
            optimizer,
            schedule,
            epochs: 50,
            negatives: 10,
            seed: 0,
            accumulate_epsilon: false,
            eval_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be ≥ 1".into()));
        }
        if self.negatives == 0 {
            return Err(Error::InvalidArgument("at least one negative per positive is required".into()));
        }
        self.schedule.validate()
    }
}

fn init_points<T: Real>(n: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<BallPoint<T>> {
    (0..n)
        .map(|_| {
            let c = Array1::from_shape_fn(dim, |_| T::lit(rng.random_range(-INIT_RANGE..=INIT_RANGE)));
            BallPoint::new(c).expect("near-origin point")
        })
        .collect()
}

/// The table [`train_embeddings`] starts from for this seed.
pub fn initial_table<T: Real>(r: &RelationSet, dim: usize, seed: u64) -> EmbeddingTable<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EmbeddingTable { symbols: r.nouns().to_vec(), points: init_points(r.num_nouns(), dim, &mut rng) }
}

pub fn train_embeddings<T: Real>(r: &RelationSet, cfg: &EmbedConfig<T>) -> Result<(EmbeddingTable<T>, RunTrace<T>)> {
    train_embeddings_with(r, cfg, |_| {})
}

/// [`train_embeddings`], calling `on_epoch` after each epoch.
///
/// Each epoch visits the pairs in a seeded random order; every pair is one
/// optimizer step on the full product of balls.
pub fn train_embeddings_with<T: Real>(
    r: &RelationSet,
    cfg: &EmbedConfig<T>,
    mut on_epoch: impl FnMut(&EpochRecord<T>),
) -> Result<(EmbeddingTable<T>, RunTrace<T>)> {
    cfg.validate()?;
    let n = r.num_nouns();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points = init_points(n, cfg.dim, &mut rng);
    let ball = PoincareBall::<T>::new(cfg.dim);
    let opt = Optimizer::new(cfg.optimizer, cfg.schedule).accumulate_epsilon(cfg.accumulate_epsilon);
    let mut state: OptimizerState<T, PoincareBall<T>> = OptimizerState::new(points);
    let mut trace = RunTrace::new(cfg.optimizer, cfg.accumulate_epsilon);
    let mut order: Vec<usize> = (0..r.num_pairs()).collect();

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = T::zero();
        let (alpha, beta1) = cfg.schedule.eval(state.n, epoch);
        for &p in &order {
            let (u, v) = r.pairs()[p];
            let negs = sample_negatives(r, u, cfg.negatives, &mut rng)?;
            let lg = loss_grad(&state.x, u, v, &negs)?;
            let rgrads = lg.grads.into_iter().map(|(i, eg)| (i, ball.egrad_to_rgrad(&state.x[i], &eg))).collect();
            let g = ProductTangent::sparse(n, rgrads)?;
            let mut rec = opt.step(&ball, &mut state, &g, epoch)?;
            rec.objective = Some(lg.loss);
            trace.steps.push(rec);
            loss_sum += lg.loss;
        }
        let mean_loss = if order.is_empty() { T::zero() } else { loss_sum / T::from_usize_lossy(order.len()) };
        let evaluate = cfg.eval_every > 0 && ((epoch + 1) % cfg.eval_every == 0 || epoch + 1 == cfg.epochs);
        let (mean_rank, map) = if evaluate && r.num_pairs() > 0 {
            let table = EmbeddingTable { symbols: r.nouns().to_vec(), points: state.x.clone() };
            let rep = evaluate_reconstruction(&table, r)?;
            (Some(rep.mean_rank), Some(rep.map))
        } else {
            (None, None)
        };
        let rec = EpochRecord { epoch, mean_loss, mean_rank, map, alpha, beta1 };
        on_epoch(&rec);
        trace.epochs.push(rec);
    }
    Ok((EmbeddingTable { symbols: r.nouns().to_vec(), points: state.x }, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::synth::balanced_tree;
    use crate::embed::transitive_closure;
    use crate::poincare::CLIP_RADIUS;

    fn cfg(epochs: usize, seed: u64) -> EmbedConfig<f64> {
        let mut c = EmbedConfig::new(OptimizerKind::RamsGrad, Schedule::constant(0.3, 0.001, 0.999, 1e-8));
        c.epochs = epochs;
        c.seed = seed;
        c
    }

    #[test]
    fn zero_epochs_returns_the_initialization() {
        let r = transitive_closure(&balanced_tree(2, 3));
        let (t, trace) = train_embeddings(&r, &cfg(0, 4)).unwrap();
        assert_eq!(t, initial_table(&r, 5, 4));
        assert!(trace.is_empty());
        assert!(t.max_norm() <= INIT_RANGE * 5f64.sqrt());
    }

    #[test]
    fn training_reduces_loss_and_is_deterministic() {
        let r = transitive_closure(&balanced_tree(2, 3));
        let (a, ta) = train_embeddings(&r, &cfg(100, 1)).unwrap();
        let (b, _) = train_embeddings(&r, &cfg(100, 1)).unwrap();
        assert_eq!(a, b);
        assert!(ta.epochs.last().unwrap().mean_loss < ta.epochs[0].mean_loss);
        assert!(a.max_norm() <= CLIP_RADIUS);
        assert_eq!(ta.len(), 100 * 34);
    }

    #[test]
    fn eval_every_fills_epoch_metrics() {
        let r = transitive_closure(&balanced_tree(2, 2));
        let mut c = cfg(5, 0);
        c.eval_every = 2;
        let mut seen = Vec::new();
        let (_, trace) = train_embeddings_with(&r, &c, |e| seen.push(e.epoch)).unwrap();
        assert_eq!(seen, vec![0, 1, 2, 3, 4]);
        let with_map: Vec<usize> = trace.epochs.iter().filter(|e| e.map.is_some()).map(|e| e.epoch).collect();
        assert_eq!(with_map, vec![1, 3, 4]);
    }

    #[test]
    fn alignment_by_symbol() {
        let r = RelationSet::from_pairs(["a", "b", "c"], [(0, 1)]).unwrap();
        let p = |x: f64| BallPoint::from_slice(&[x]).unwrap();
        let t = EmbeddingTable::new(vec!["c".into(), "a".into(), "b".into()], vec![p(0.3), p(0.1), p(0.2)]).unwrap();
        let aligned = t.aligned_to(&r).unwrap();
        assert_eq!(aligned, vec![p(0.1), p(0.2), p(0.3)]);
        let short = EmbeddingTable::new(vec!["a".into()], vec![p(0.1)]).unwrap();
        assert_eq!(short.aligned_to(&r).unwrap_err(), Error::MissingEmbedding("b".into()));
    }
}
