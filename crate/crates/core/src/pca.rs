//! PCA as optimization on the Stiefel manifold:
//! `min_{U ∈ St(k,d)} f(U) = −(1/n) Σᵢ aᵢᵀ U Uᵀ aᵢ`.
//!
//! The data are not centered; the reference solution is the top-`k`
//! eigenspace of the uncentered second-moment matrix `(1/n) AᵀA`.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::frobenius_sq;
use crate::optim::{Optimizer, OptimizerKind, OptimizerState, ProductTangent, Schedule, Stiefel};
use crate::scalar::Real;
use crate::stiefel::{self, StiefelPoint};
use crate::trace::RunTrace;

/// `n` data rows in `ℝᵈ` and a target dimension `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaProblem<T> {
    data: Array2<T>,
    k: usize,
}

impl<T: Real> PcaProblem<T> {
    pub fn new(data: Array2<T>, k: usize) -> Result<Self> {
        let (n, d) = data.dim();
        if n == 0 {
            return Err(Error::InvalidArgument("PCA needs at least one data row".into()));
        }
        if k == 0 || k > d {
            return Err(Error::InvalidArgument(format!("target dimension k = {k} must be in 1..={d}")));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("PCA data"));
        }
        Ok(Self { data, k })
    }

    pub fn data(&self) -> ArrayView2<'_, T> {
        self.data.view()
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn d(&self) -> usize {
        self.data.ncols()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn manifold(&self) -> Stiefel {
        Stiefel { d: self.d(), k: self.k }
    }

    /// `(1/n) AᵀA`
    pub fn second_moment(&self) -> Array2<T> {
        self.data.t().dot(&self.data) / T::from_usize_lossy(self.n())
    }

    fn check(&self, u: &StiefelPoint<T>) -> Result<()> {
        if u.dim() != (self.d(), self.k) {
            return Err(Error::DimensionMismatch { expected: self.d() * self.k, found: u.dim().0 * u.dim().1 });
        }
        Ok(())
    }
}

/// Reference minimizer and its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaSolution<T> {
    pub u: StiefelPoint<T>,
    pub f_value: T,
}

/// `f(U) = −(1/n) ‖AU‖²_F`
pub fn pca_loss<T: Real>(p: &PcaProblem<T>, u: &StiefelPoint<T>) -> Result<T> {
    p.check(u)?;
    Ok(-frobenius_sq(p.data.dot(&u.mat()).view()) / T::from_usize_lossy(p.n()))
}

/// Euclidean gradient of the minibatch objective, `−(2/|B|) Σ_{i∈B} aᵢ(aᵢᵀU)`.
pub fn pca_egrad<T: Real>(p: &PcaProblem<T>, u: &StiefelPoint<T>, batch: &[usize]) -> Result<Array2<T>> {
    p.check(u)?;
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if let Some(&i) = batch.iter().find(|&&i| i >= p.n()) {
        return Err(Error::InvalidArgument(format!("row index {i} out of range for {} rows", p.n())));
    }
    let rows = p.data.select(Axis(0), batch);
    let scale = -T::lit(2.0) / T::from_usize_lossy(batch.len());
    Ok(rows.t().dot(&rows.dot(&u.mat())) * scale)
}

/// Riemannian minibatch gradient: the Euclidean one projected onto `T_U St`.
pub fn pca_stochastic_grad<T: Real>(p: &PcaProblem<T>, u: &StiefelPoint<T>, batch: &[usize]) -> Result<Array2<T>> {
    let eg = pca_egrad(p, u, batch)?;
    stiefel::tangent_project(u, eg.view())
}

/// Full-batch Riemannian gradient.
pub fn pca_full_grad<T: Real>(p: &PcaProblem<T>, u: &StiefelPoint<T>) -> Result<Array2<T>> {
    let all: Vec<usize> = (0..p.n()).collect();
    pca_stochastic_grad(p, u, &all)
}

/// Top-`k` eigenvectors of the second-moment matrix, computed in `f64`.
pub fn svd_oracle<T: Real>(p: &PcaProblem<T>) -> PcaSolution<T> {
    let d = p.d();
    let m = p.second_moment();
    let sym = DMatrix::from_fn(d, d, |i, j| m[[i, j]].as_f64());
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = &order[..p.k];
    let u = Array2::from_shape_fn((d, p.k), |(i, j)| T::lit(eig.eigenvectors[(i, top[j])]));
    let u = StiefelPoint::from_qf(u.view()).expect("eigenvectors have full rank");
    let f_value = pca_loss(p, &u).expect("shapes agree");
    PcaSolution { u, f_value }
}

/// `f(U) − f(U*)`, clamped at 0.
pub fn optimality_gap<T: Real>(p: &PcaProblem<T>, u: &StiefelPoint<T>, sol: &PcaSolution<T>) -> Result<T> {
    Ok((pca_loss(p, u)? - sol.f_value).max(T::zero()))
}

/// `gap / |f(U*)|`
pub fn relative_gap<T: Real>(p: &PcaProblem<T>, u: &StiefelPoint<T>, sol: &PcaSolution<T>) -> Result<T> {
    Ok(optimality_gap(p, u, sol)? / sol.f_value.abs().max(T::min_positive_value()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcaConfig<T> {
    pub optimizer: OptimizerKind,
    pub schedule: Schedule<T>,
    pub batch_size: usize,
    pub iterations: usize,
    pub seed: u64,
    pub accumulate_epsilon: bool,
    /// Record the full objective every this many iterations (0 = never).
    pub eval_every: usize,
}

impl<T: Real> PcaConfig<T> {
    pub fn new(optimizer: OptimizerKind, schedule: Schedule<T>) -> Self {
        Self {
            optimizer,
            schedule,
            batch_size: 32,
            iterations: 5000,
            seed: 0,
            accumulate_epsilon: false,
            eval_every: 1,
        }
    }
}

/// `qf` of a seeded standard Gaussian `d×k` matrix.
pub fn random_stiefel<T: Real, R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> StiefelPoint<T> {
    loop {
        let g = Array2::from_shape_fn((d, k), |_| T::lit(rng.sample(StandardNormal)));
        if let Ok(u) = StiefelPoint::from_qf(g.view()) {
            return u;
        }
    }
}

/// Minibatch training from a seeded random start. The objective is recorded
/// at the iterate each gradient is taken at; when `solution` is given its
/// value becomes the trace's `f*`.
pub fn train_pca<T: Real>(
    p: &PcaProblem<T>,
    cfg: &PcaConfig<T>,
    solution: Option<&PcaSolution<T>>,
) -> Result<(StiefelPoint<T>, RunTrace<T>)> {
    cfg.schedule.validate()?;
    if cfg.batch_size == 0 {
        return Err(Error::EmptyBatch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let manifold = p.manifold();
    let init = random_stiefel(p.d(), p.k(), &mut rng);
    let opt = Optimizer::new(cfg.optimizer, cfg.schedule).accumulate_epsilon(cfg.accumulate_epsilon);
    let mut state: OptimizerState<T, Stiefel> = OptimizerState::new(vec![init]);
    let mut trace = RunTrace::new(cfg.optimizer, cfg.accumulate_epsilon);
    trace.f_star = solution.map(|s| s.f_value);
    let b = cfg.batch_size.min(p.n());
    for it in 0..cfg.iterations {
        let batch = rand::seq::index::sample(&mut rng, p.n(), b).into_vec();
        let u = &state.x[0];
        let objective = if cfg.eval_every > 0 && it % cfg.eval_every == 0 { Some(pca_loss(p, u)?) } else { None };
        let g = pca_stochastic_grad(p, u, &batch)?;
        let mut rec = opt.step(&manifold, &mut state, &ProductTangent::dense(vec![g]), 0)?;
        rec.objective = objective;
        trace.steps.push(rec);
    }
    let u = state.x.pop().expect("one component");
    Ok((u, trace))
}

/// Synthetic rows `aᵢ = Q diag(√λ) zᵢ` with `zᵢ ~ N(0, I)` and a random
/// rotation `Q`; `spectrum` gives the leading eigenvalues and the remaining
/// ones are 1.
pub fn spiked_problem(n: usize, d: usize, k: usize, spectrum: &[f64], seed: u64) -> Result<PcaProblem<f64>> {
    if spectrum.len() > d {
        return Err(Error::InvalidArgument(format!("{} eigenvalues given for dimension {d}", spectrum.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_stiefel::<f64, _>(d, d, &mut rng).into_mat();
    let scale = Array1::from_shape_fn(d, |j| spectrum.get(j).copied().unwrap_or(1.0).sqrt());
    let z = Array2::from_shape_fn((n, d), |_| rng.sample::<f64, _>(StandardNormal));
    let data = (z * &scale).dot(&q.t());
    PcaProblem::new(data, k)
}
