//! Per-iteration measurements recorded by the training loops.

use crate::optim::OptimizerKind;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentRecord<T> {
    /// `‖gᵢ‖_{xᵢ}`
    pub grad_norm: T,
    /// `‖mᵢ‖_{xᵢ}`; absent for optimizers without momentum.
    pub m_norm: Option<T>,
    /// `√v̂ᵢ` as stored (ε-free unless ε accumulation is on).
    pub sqrt_v_hat: Option<T>,
    /// Riemannian length of the tangent step handed to the exponential map.
    pub step_norm: T,
}

/// One optimizer iteration `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    pub n: usize,
    pub epoch: usize,
    pub alpha: T,
    pub beta1: T,
    /// `f(x_n)` (or the sampled `f_{t_n}(x_n)`), evaluated at the iterate the
    /// gradient was taken at.
    pub objective: Option<T>,
    pub max_grad_norm: T,
    pub max_m_norm: Option<T>,
    pub max_sqrt_v_hat: Option<T>,
    pub max_step_norm: T,
    pub components: Option<Vec<ComponentRecord<T>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord<T> {
    pub epoch: usize,
    pub mean_loss: T,
    pub mean_rank: Option<T>,
    pub map: Option<T>,
    pub alpha: T,
    pub beta1: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<T> {
    pub optimizer: OptimizerKind,
    pub accumulate_epsilon: bool,
    pub steps: Vec<StepRecord<T>>,
    pub epochs: Vec<EpochRecord<T>>,
    pub f_star: Option<T>,
}

impl<T: Real> RunTrace<T> {
    pub fn new(optimizer: OptimizerKind, accumulate_epsilon: bool) -> Self {
        Self { optimizer, accumulate_epsilon, steps: Vec::new(), epochs: Vec::new(), f_star: None }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Largest gradient norm seen over the run, over all components.
    pub fn observed_gradient_bound(&self) -> T {
        self.steps.iter().fold(T::zero(), |g, s| g.max(s.max_grad_norm))
    }

    pub fn objectives(&self) -> Option<Vec<T>> {
        self.steps.iter().map(|s| s.objective).collect()
    }
}
