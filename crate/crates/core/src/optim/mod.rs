//! Riemannian stochastic optimizers on a product `M = M₁ × ⋯ × M_N` of
//! identical factors.
//!
//! All four methods share [`OptimizerState`] and differ only in how the
//! scaling of the step is computed:
//!
//! | kind       | momentum | second moment            |
//! |------------|----------|--------------------------|
//! | `Rsgd`     | no       | none                     |
//! | `RAdaGrad` | no       | `vᵢ += ‖gᵢ‖²`            |
//! | `RAdam`    | yes      | `v̂ᵢ = vᵢ`                |
//! | `RamsGrad` | yes      | `v̂ᵢ = max(v̂ᵢ, vᵢ)`       |
//!
//! Adaptivity is per component, not per coordinate: each factor carries one
//! scalar `vᵢ`.

mod manifold;
mod schedule;

use std::fmt;
use std::str::FromStr;

pub use manifold::{Euclidean, Manifold, PoincareBall, Stiefel, TangentVector};
pub use schedule::{
    validate_schedule, validate_schedule_until, Beta1, Hypothesis, LearningRate, Schedule, ScheduleReport,
    VALIDATION_HORIZON,
};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::trace::{ComponentRecord, StepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizerKind {
    Rsgd,
    RAdaGrad,
    RAdam,
    RamsGrad,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 4] =
        [OptimizerKind::Rsgd, OptimizerKind::RAdaGrad, OptimizerKind::RAdam, OptimizerKind::RamsGrad];

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerKind::Rsgd => "rsgd",
            OptimizerKind::RAdaGrad => "radagrad",
            OptimizerKind::RAdam => "radam",
            OptimizerKind::RamsGrad => "ramsgrad",
        }
    }

    pub fn has_momentum(&self) -> bool {
        matches!(self, OptimizerKind::RAdam | OptimizerKind::RamsGrad)
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OptimizerKind::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s)).ok_or_else(|| {
            Error::InvalidArgument(format!("unknown optimizer {s:?}; expected rsgd, radagrad, radam or ramsgrad"))
        })
    }
}

/// A tangent vector of the product manifold. Components not listed are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTangent<V> {
    len: usize,
    entries: Vec<(usize, V)>,
}

impl<V> ProductTangent<V> {
    pub fn dense(components: Vec<V>) -> Self {
        let len = components.len();
        Self { len, entries: components.into_iter().enumerate().collect() }
    }

    /// `entries` must have distinct indices below `len`; they are sorted here.
    pub fn sparse(len: usize, mut entries: Vec<(usize, V)>) -> Result<Self> {
        entries.sort_by_key(|(i, _)| *i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument(format!("component {} listed twice", w[0].0)));
            }
        }
        if let Some((i, _)) = entries.last() {
            if *i >= len {
                return Err(Error::DimensionMismatch { expected: len, found: i + 1 });
            }
        }
        Ok(Self { len, entries })
    }

    pub fn zeros(len: usize) -> Self {
        Self { len, entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn entries(&self) -> &[(usize, V)] {
        &self.entries
    }
}

/// State of the optimizers: `x_n`, the transported momentum `τ_{n−1}`, `v`,
/// `v̂`, and the iteration counter `n`.
///
/// `τ` is `None` where it is the zero vector. It starts at zero at `x₁`.
#[derive(Debug, Clone)]
pub struct OptimizerState<T: Real, M: Manifold<T>> {
    pub x: Vec<M::Point>,
    pub tau: Vec<Option<M::Tangent>>,
    pub v: Vec<T>,
    pub v_hat: Vec<T>,
    pub n: usize,
}

impl<T: Real, M: Manifold<T>> OptimizerState<T, M> {
    pub fn new(x: Vec<M::Point>) -> Self {
        let n_comp = x.len();
        Self { x, tau: vec![None; n_comp], v: vec![T::zero(); n_comp], v_hat: vec![T::zero(); n_comp], n: 1 }
    }

    pub fn num_components(&self) -> usize {
        self.x.len()
    }
}

/// Optimizer configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimizer<T> {
    pub kind: OptimizerKind,
    pub schedule: Schedule<T>,
    /// Store `v̂ₙ = max(v̂ₙ₋₁, vₙ) + ε` literally (ε compounds every step).
    /// When false, `v̂ₙ = max(v̂ₙ₋₁, vₙ)` is stored and `√(v̂ₙ + ε)` divides.
    pub accumulate_epsilon: bool,
    /// Emit a [`ComponentRecord`] per component in every [`StepRecord`].
    pub record_components: bool,
}

impl<T: Real> Optimizer<T> {
    pub fn new(kind: OptimizerKind, schedule: Schedule<T>) -> Self {
        Self { kind, schedule, accumulate_epsilon: false, record_components: false }
    }

    pub fn accumulate_epsilon(mut self, on: bool) -> Self {
        self.accumulate_epsilon = on;
        self
    }

    pub fn record_components(mut self, on: bool) -> Self {
        self.record_components = on;
        self
    }

    /// One iteration on every component, advancing `state.n`. `epoch` only
    /// selects the burn-in multiplier.
    pub fn step<M: Manifold<T>>(
        &self,
        manifold: &M,
        state: &mut OptimizerState<T, M>,
        grad: &ProductTangent<M::Tangent>,
        epoch: usize,
    ) -> Result<StepRecord<T>> {
        let n_comp = state.num_components();
        if grad.len() != n_comp {
            return Err(Error::DimensionMismatch { expected: n_comp, found: grad.len() });
        }
        let sched = &self.schedule;
        let (alpha, beta1) = sched.eval(state.n, epoch);
        let beta2 = sched.beta2;
        let eps = sched.epsilon;

        let mut rec = StepRecord {
            n: state.n,
            epoch,
            alpha,
            beta1,
            objective: None,
            max_grad_norm: T::zero(),
            max_m_norm: self.kind.has_momentum().then_some(T::zero()),
            max_sqrt_v_hat: self.kind.has_momentum().then_some(T::zero()),
            max_step_norm: T::zero(),
            components: self.record_components.then(|| Vec::with_capacity(n_comp)),
        };

        let mut cursor = grad.entries().iter().peekable();
        for i in 0..n_comp {
            let g = match cursor.peek() {
                Some((j, g)) if *j == i => {
                    cursor.next();
                    Some(g)
                }
                _ => None,
            };
            let x = &state.x[i];
            let g_norm_sq = g.map_or(T::zero(), |g| manifold.inner(x, g, g));
            let g_norm = g_norm_sq.max(T::zero()).sqrt();
            let mut m_norm = None;
            let mut step_norm = T::zero();

            match self.kind {
                OptimizerKind::Rsgd => {
                    if let Some(g) = g.filter(|g| !g.is_zero()) {
                        let new_x = manifold.exp_project(x, &g.scaled(-alpha))?;
                        step_norm = alpha * g_norm;
                        state.x[i] = new_x;
                    }
                }
                OptimizerKind::RAdaGrad => {
                    state.v[i] += g_norm_sq;
                    let denom = (state.v[i] + eps).sqrt();
                    if let Some(g) = g.filter(|g| !g.is_zero()) {
                        if denom > T::zero() {
                            let scale = alpha / denom;
                            let new_x = manifold.exp_project(x, &g.scaled(-scale))?;
                            step_norm = scale * g_norm;
                            state.x[i] = new_x;
                        }
                    }
                }
                OptimizerKind::RAdam | OptimizerKind::RamsGrad => {
                    let m = match (state.tau[i].take(), g) {
                        (None, None) => None,
                        (Some(mut t), None) => {
                            t.scale_mut(beta1);
                            Some(t)
                        }
                        (None, Some(g)) => Some(g.scaled(T::one() - beta1)),
                        (Some(mut t), Some(g)) => {
                            t.scale_mut(beta1);
                            t.axpy(T::one() - beta1, g);
                            Some(t)
                        }
                    };
                    state.v[i] = beta2 * state.v[i] + (T::one() - beta2) * g_norm_sq;
                    let base = if self.kind == OptimizerKind::RamsGrad {
                        // ties keep the previous value
                        if state.v[i] > state.v_hat[i] {
                            state.v[i]
                        } else {
                            state.v_hat[i]
                        }
                    } else {
                        state.v[i]
                    };
                    let denom = if self.accumulate_epsilon {
                        state.v_hat[i] = base + eps;
                        state.v_hat[i].sqrt()
                    } else {
                        state.v_hat[i] = base;
                        (base + eps).sqrt()
                    };

                    match m.filter(|m| !m.is_zero()) {
                        Some(m) => {
                            let mn = manifold.norm(x, &m);
                            m_norm = Some(mn);
                            if denom > T::zero() {
                                let scale = alpha / denom;
                                let new_x = manifold.exp_project(x, &m.scaled(-scale))?;
                                state.tau[i] = Some(manifold.transport(x, &new_x, &m));
                                state.x[i] = new_x;
                                step_norm = scale * mn;
                            } else {
                                state.tau[i] = Some(m);
                            }
                        }
                        None => m_norm = Some(T::zero()),
                    }
                }
            }

            rec.max_grad_norm = rec.max_grad_norm.max(g_norm);
            rec.max_step_norm = rec.max_step_norm.max(step_norm);
            let sqrt_v_hat = self.kind.has_momentum().then(|| state.v_hat[i].sqrt());
            if let (Some(acc), Some(mn)) = (rec.max_m_norm.as_mut(), m_norm) {
                *acc = acc.max(mn);
            }
            if let (Some(acc), Some(sv)) = (rec.max_sqrt_v_hat.as_mut(), sqrt_v_hat) {
                *acc = acc.max(sv);
            }
            if let Some(comps) = rec.components.as_mut() {
                comps.push(ComponentRecord { grad_norm: g_norm, m_norm, sqrt_v_hat, step_norm });
            }
        }
        if !step_is_finite(&rec) {
            return Err(Error::NonFinite("optimizer step"));
        }
        state.n += 1;
        Ok(rec)
    }
}

fn step_is_finite<T: Real>(rec: &StepRecord<T>) -> bool {
    rec.max_grad_norm.is_finite() && rec.max_step_norm.is_finite()
}

/// Algorithm-1 step (modified RAMSGrad) with the schedule's parameters.
pub fn ramsgrad_step<T: Real, M: Manifold<T>>(
    manifold: &M,
    state: &mut OptimizerState<T, M>,
    grad: &ProductTangent<M::Tangent>,
    schedule: &Schedule<T>,
    epoch: usize,
) -> Result<StepRecord<T>> {
    Optimizer::new(OptimizerKind::RamsGrad, *schedule).step(manifold, state, grad, epoch)
}

/// RAMSGrad without the running max: `v̂ₙ = vₙ`.
pub fn radam_step<T: Real, M: Manifold<T>>(
    manifold: &M,
    state: &mut OptimizerState<T, M>,
    grad: &ProductTangent<M::Tangent>,
    schedule: &Schedule<T>,
    epoch: usize,
) -> Result<StepRecord<T>> {
    Optimizer::new(OptimizerKind::RAdam, *schedule).step(manifold, state, grad, epoch)
}

/// `x ← Π_X[exp_x(−αₙ g)]`.
pub fn rsgd_step<T: Real, M: Manifold<T>>(
    manifold: &M,
    state: &mut OptimizerState<T, M>,
    grad: &ProductTangent<M::Tangent>,
    schedule: &Schedule<T>,
    epoch: usize,
) -> Result<StepRecord<T>> {
    Optimizer::new(OptimizerKind::Rsgd, *schedule).step(manifold, state, grad, epoch)
}

/// `vᵢ ← vᵢ + ‖gᵢ‖²`, `xᵢ ← Π_X[exp(−αₙ gᵢ/√(vᵢ + ε))]`.
pub fn radagrad_step<T: Real, M: Manifold<T>>(
    manifold: &M,
    state: &mut OptimizerState<T, M>,
    grad: &ProductTangent<M::Tangent>,
    schedule: &Schedule<T>,
    epoch: usize,
) -> Result<StepRecord<T>> {
    Optimizer::new(OptimizerKind::RAdaGrad, *schedule).step(manifold, state, grad, epoch)
}
