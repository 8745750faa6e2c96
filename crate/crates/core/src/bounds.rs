//! Computable forms of the convergence theory: the curvature factor ζ, the
//! right-hand side of the averaged-suboptimality bound for Algorithm 1, the
//! regret bound for diminishing-rate RAMSGrad, and trace-based measurements
//! to compare them against.

use crate::error::{Error, Result};
use crate::optim::{validate_schedule, Manifold, OptimizerKind, Schedule};
use crate::scalar::Real;
use crate::trace::RunTrace;

/// Absolute tolerance of [`lemma2_check`].
pub const LEMMA2_TOL: f64 = 1e-9;

/// How the curvature and side length combine inside ζ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZetaVariant {
    /// `s = √(|κ| c)`
    #[default]
    Printed,
    /// `s = √|κ| · c`, the form used by the triangle-comparison literature.
    Literature,
}

impl std::str::FromStr for ZetaVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "printed" => Ok(ZetaVariant::Printed),
            "literature" => Ok(ZetaVariant::Literature),
            _ => Err(Error::InvalidArgument(format!("unknown zeta variant {s:?}; expected printed or literature"))),
        }
    }
}

/// `ζ(κ, c) = s / tanh(s)`, with `s` chosen by `variant`; equals 1 at `s = 0`.
pub fn zeta<T: Real>(kappa: T, c: T, variant: ZetaVariant) -> T {
    let k = kappa.abs();
    let s = match variant {
        ZetaVariant::Printed => (k * c).sqrt(),
        ZetaVariant::Literature => k.sqrt() * c,
    };
    if s < T::lit(1e-4) {
        // s/tanh(s) = 1 + s²/3 − s⁴/45 + …
        let s2 = s * s;
        T::one() + s2 / T::lit(3.0) - s2 * s2 / T::lit(45.0)
    } else {
        s / s.tanh()
    }
}

/// Problem constants entering the bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundParams<T> {
    /// `G ≥ sup ‖grad f_t(x)‖_x`
    pub g: T,
    /// Diameter bound on every `X_i`.
    pub d: T,
    /// Sectional-curvature lower bounds `κᵢ ≤ 0`, one per component.
    pub kappas: Vec<T>,
    /// ε used by the optimizer; must be positive here.
    pub epsilon: T,
    /// Learning-rate and momentum schedule; `β₁₁` and `β₂` are read from it.
    pub schedule: Schedule<T>,
    pub zeta_variant: ZetaVariant,
    /// True when `G` or `D` were estimated from a run rather than derived.
    pub empirical: bool,
}

impl<T: Real> BoundParams<T> {
    pub fn new(g: T, d: T, kappas: Vec<T>, schedule: Schedule<T>) -> Self {
        Self { g, d, kappas, epsilon: schedule.epsilon, schedule, zeta_variant: ZetaVariant::Printed, empirical: false }
    }

    pub fn num_components(&self) -> usize {
        self.kappas.len()
    }

    pub fn beta11(&self) -> T {
        self.schedule.beta1(1)
    }

    pub fn beta2(&self) -> T {
        self.schedule.beta2
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.kappas.is_empty() {
            return bad("at least one component is required".into());
        }
        if !(self.g > T::zero() && self.g.is_finite()) {
            return bad(format!("G must be positive, got {}", self.g));
        }
        if !(self.d > T::zero() && self.d.is_finite()) {
            return bad(format!("D must be positive, got {}", self.d));
        }
        if let Some(k) = self.kappas.iter().find(|k| !(**k <= T::zero())) {
            return bad(format!("curvature bounds must be ≤ 0, got {k}"));
        }
        if !(self.epsilon > T::zero()) {
            return bad(format!("ε must be positive for the bound, got {}", self.epsilon));
        }
        self.schedule.validate()
    }

    /// `Σᵢ ζ(κᵢ, D)`
    pub fn zeta_sum(&self) -> T {
        self.kappas.iter().map(|&k| zeta(k, self.d, self.zeta_variant)).sum()
    }
}

/// The three terms of the Algorithm-1 bound at iteration `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Terms<T> {
    pub n: usize,
    /// `NGD²/(2(1−β₁₁)) · 1/(n αₙ)`
    pub term1: T,
    /// `G²/(2√ε(1−β₁₁)) Σᵢζ(κᵢ,D) · (1/n)Σₖαₖ`
    pub term2: T,
    /// `NGD/(1−β₁₁) · (1/n)Σₖβ₁ₖ`
    pub term3: T,
    pub total: T,
}

/// Bound on `(1/n)Σₖ f(x_k) − f(x*)` for Algorithm 1. Fails when the
/// schedule breaks the monotonicity hypotheses.
pub fn theorem1_bound<T: Real>(p: &BoundParams<T>, n: usize) -> Result<Theorem1Terms<T>> {
    validate_schedule(&p.schedule).into_result()?;
    theorem1_bound_unchecked(p, n)
}

/// [`theorem1_bound`] without the hypothesis check.
pub fn theorem1_bound_unchecked<T: Real>(p: &BoundParams<T>, n: usize) -> Result<Theorem1Terms<T>> {
    Ok(*theorem1_series_unchecked(p, n)?.last().expect("n ≥ 1"))
}

/// The bound for every `n = 1..=n_max`, with running sums.
pub fn theorem1_series<T: Real>(p: &BoundParams<T>, n_max: usize) -> Result<Vec<Theorem1Terms<T>>> {
    validate_schedule(&p.schedule).into_result()?;
    theorem1_series_unchecked(p, n_max)
}

pub fn theorem1_series_unchecked<T: Real>(p: &BoundParams<T>, n_max: usize) -> Result<Vec<Theorem1Terms<T>>> {
    p.validate()?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("iteration index must be ≥ 1".into()));
    }
    let big_n = T::from_usize_lossy(p.num_components());
    let one_minus_b = T::one() - p.beta11();
    let c_rate = big_n * p.g * p.d * p.d / (T::lit(2.0) * one_minus_b);
    let c_alpha = p.g * p.g / (T::lit(2.0) * p.epsilon.sqrt() * one_minus_b) * p.zeta_sum();
    let c_beta = big_n * p.g * p.d / one_minus_b;

    let mut out = Vec::with_capacity(n_max);
    let mut sum_alpha = T::zero();
    let mut sum_beta = T::zero();
    for n in 1..=n_max {
        let alpha_n = p.schedule.alpha(n);
        sum_alpha += alpha_n;
        sum_beta += p.schedule.beta1(n);
        let nf = T::from_usize_lossy(n);
        let term1 = c_rate / (nf * alpha_n);
        let term2 = c_alpha * sum_alpha / nf;
        let term3 = c_beta * sum_beta / nf;
        out.push(Theorem1Terms { n, term1, term2, term3, total: term1 + term2 + term3 });
    }
    Ok(out)
}

/// Constant-rate envelope `NGD²/(2α(1−β₁₁))·(1/n) + C₁α + C₂β`, with
/// `C₁ = G²Σζ/(√ε(1−β₁₁))` and `C₂ = NGD/(1−β₁₁)`.
///
/// `C₁` is twice the coefficient of `α` in [`theorem1_bound`], so this
/// envelope dominates the bound rather than equalling it.
pub fn corollary1_envelope<T: Real>(p: &BoundParams<T>, n: usize, alpha: T, beta: T) -> Result<T> {
    p.validate()?;
    let big_n = T::from_usize_lossy(p.num_components());
    let one_minus_b = T::one() - p.beta11();
    let c1 = p.g * p.g / (p.epsilon.sqrt() * one_minus_b) * p.zeta_sum();
    let c2 = big_n * p.g * p.d / one_minus_b;
    let term1 = big_n * p.g * p.d * p.d / (T::lit(2.0) * alpha * one_minus_b) / T::from_usize_lossy(n.max(1));
    Ok(term1 + c1 * alpha + c2 * beta)
}

/// Closed-form constant `K` with `theorem1_bound(n) · n^{1−η} ≤ K` for
/// `αₙ = α₀/n^η` and `β₁ₙ = λⁿ`.
pub fn corollary2_constant<T: Real>(p: &BoundParams<T>) -> Result<T> {
    p.validate()?;
    let (alpha0, eta) = match p.schedule.learning_rate {
        crate::optim::LearningRate::Diminishing { alpha0, eta } => (alpha0, eta),
        _ => return Err(Error::InvalidArgument("a diminishing schedule is required".into())),
    };
    let lambda = match p.schedule.beta1 {
        crate::optim::Beta1::Geometric(l) => l,
        crate::optim::Beta1::Constant(_) => {
            return Err(Error::InvalidArgument("a geometric β₁ schedule is required".into()))
        }
    };
    let big_n = T::from_usize_lossy(p.num_components());
    let one_minus_b = T::one() - p.beta11();
    let k1 = big_n * p.g * p.d * p.d / (T::lit(2.0) * one_minus_b * alpha0);
    // (1/n)Σ α₀k^{−η} ≤ α₀ n^{−η}/(1−η)
    let k2 = p.g * p.g / (T::lit(2.0) * p.epsilon.sqrt() * one_minus_b) * p.zeta_sum() * alpha0 / (T::one() - eta);
    // Σ λᵏ ≤ λ/(1−λ) and n^{−η} ≤ 1
    let k3 = big_n * p.g * p.d / one_minus_b * lambda / (T::one() - lambda);
    Ok(k1 + k2 + k3)
}

/// The three terms of the RAMSGrad regret bound at horizon `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Terms<T> {
    pub horizon: usize,
    pub term1: T,
    pub term2: T,
    pub term3: T,
    pub total: T,
}

/// Regret bound for RAMSGrad with `αₜ = α/√t`, evaluated from a trace with
/// per-component records. `γ = β₁/√β₂` must be `< 1`.
pub fn theorem2_regret_bound<T: Real>(trace: &RunTrace<T>, p: &BoundParams<T>, alpha: T) -> Result<Theorem2Terms<T>> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if !(p.d > T::zero()) || p.kappas.is_empty() {
        return Err(Error::InvalidArgument("D must be positive and κ non-empty".into()));
    }
    let beta1 = p.beta11();
    let beta2 = p.beta2();
    let gamma = if beta1 == T::zero() { T::zero() } else { beta1 / beta2.sqrt() };
    if !(gamma < T::one()) {
        return Err(Error::InvalidArgument(format!("γ = β₁/√β₂ must be < 1, got {gamma}")));
    }
    let n_comp = p.num_components();
    let horizon = trace.len();
    let mut sum_weighted = vec![T::zero(); n_comp];
    let mut sum_grad_sq = vec![T::zero(); n_comp];
    let mut last_sqrt_v_hat = vec![T::zero(); n_comp];
    for step in &trace.steps {
        let comps = step.components.as_ref().ok_or(Error::MissingComponentRecords("the regret bound"))?;
        if comps.len() != n_comp {
            return Err(Error::DimensionMismatch { expected: n_comp, found: comps.len() });
        }
        for (i, c) in comps.iter().enumerate() {
            let sv = c.sqrt_v_hat.ok_or(Error::MissingComponentRecords("the regret bound (√v̂)"))?;
            sum_weighted[i] += step.beta1 * sv / step.alpha;
            sum_grad_sq[i] += c.grad_norm * c.grad_norm;
            last_sqrt_v_hat[i] = sv;
        }
    }
    let two = T::lit(2.0);
    let d2 = p.d * p.d;
    let tf = T::from_usize_lossy(horizon);
    let one_minus_b = T::one() - beta1;
    let term1 = tf.sqrt() * d2 / (two * alpha * one_minus_b) * last_sqrt_v_hat.iter().copied().sum::<T>();
    let term2 = d2 / (two * one_minus_b) * sum_weighted.iter().copied().sum::<T>();
    let lead = alpha * (T::one() + tf.ln()).sqrt()
        / (one_minus_b * one_minus_b * (T::one() - gamma) * (T::one() - beta2).sqrt());
    let term3 = lead
        * p.kappas
            .iter()
            .zip(&sum_grad_sq)
            .map(|(&k, &s)| (zeta(k, p.d, p.zeta_variant) + T::one()) / two * s.sqrt())
            .sum::<T>();
    Ok(Theorem2Terms { horizon, term1, term2, term3, total: term1 + term2 + term3 })
}

/// `((1/n)Σ_{k≤n} f(x_k)) − f*` for every prefix of the trace.
pub fn averaged_suboptimality<T: Real>(trace: &RunTrace<T>, f_star: T) -> Result<Vec<T>> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut sum = T::zero();
    trace
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let f = s.objective.ok_or_else(|| Error::InvalidArgument(format!("step {} has no objective", s.n)))?;
            sum += f;
            Ok(sum / T::from_usize_lossy(k + 1) - f_star)
        })
        .collect()
}

/// Cumulative regret `Σ_{t≤T} f_t(x_t) − T f*` for a deterministic objective.
pub fn measured_regret<T: Real>(trace: &RunTrace<T>, f_star: T) -> Result<Vec<T>> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut sum = T::zero();
    trace
        .steps
        .iter()
        .map(|s| {
            let f = s.objective.ok_or_else(|| Error::InvalidArgument(format!("step {} has no objective", s.n)))?;
            sum += f - f_star;
            Ok(sum)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma2Quantity {
    /// `‖mₖ‖ ≤ G`
    Momentum,
    /// `√v̂ₖ ≤ G`
    SecondMoment,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lemma2Report<T> {
    Ok {
        steps_checked: usize,
    },
    /// The trace has no momentum or was produced with ε accumulation.
    NotApplicable,
    Violation {
        n: usize,
        component: Option<usize>,
        quantity: Lemma2Quantity,
        value: T,
        bound: T,
    },
}

impl<T> Lemma2Report<T> {
    pub fn is_ok(&self) -> bool {
        matches!(self, Lemma2Report::Ok { .. })
    }
}

/// Checks `‖mₖᵢ‖ ≤ G` and `√v̂ₖᵢ ≤ G` at every step, to [`LEMMA2_TOL`].
pub fn lemma2_check<T: Real>(trace: &RunTrace<T>, g_obs: T) -> Lemma2Report<T> {
    let applicable = matches!(trace.optimizer, OptimizerKind::RamsGrad | OptimizerKind::RAdam);
    if !applicable || trace.accumulate_epsilon {
        return Lemma2Report::NotApplicable;
    }
    let limit = g_obs + T::lit(LEMMA2_TOL);
    let check = |n: usize, component: Option<usize>, m: Option<T>, sv: Option<T>| {
        if let Some(m) = m.filter(|&m| !(m <= limit)) {
            return Some(Lemma2Report::Violation {
                n,
                component,
                quantity: Lemma2Quantity::Momentum,
                value: m,
                bound: g_obs,
            });
        }
        if let Some(sv) = sv.filter(|&sv| !(sv <= limit)) {
            return Some(Lemma2Report::Violation {
                n,
                component,
                quantity: Lemma2Quantity::SecondMoment,
                value: sv,
                bound: g_obs,
            });
        }
        None
    };
    for step in &trace.steps {
        if let Some(comps) = &step.components {
            for (i, c) in comps.iter().enumerate() {
                if let Some(v) = check(step.n, Some(i), c.m_norm, c.sqrt_v_hat) {
                    return v;
                }
            }
        }
        if let Some(v) = check(step.n, None, step.max_m_norm, step.max_sqrt_v_hat) {
            return v;
        }
    }
    Lemma2Report::Ok { steps_checked: trace.len() }
}

/// Largest pairwise distance between iterates, per component, over a set
/// of snapshots; the maximum over components is returned.
pub fn estimate_diameter<T: Real, M: Manifold<T>>(manifold: &M, snapshots: &[Vec<M::Point>]) -> T {
    let n_comp = snapshots.first().map_or(0, Vec::len);
    let mut best = T::zero();
    for i in 0..n_comp {
        for (a, sa) in snapshots.iter().enumerate() {
            for sb in &snapshots[a + 1..] {
                best = best.max(manifold.distance(&sa[i], &sb[i]));
            }
        }
    }
    best
}

/// One row of a bound report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow<T> {
    pub n: usize,
    pub term1: T,
    pub term2: T,
    pub term3: T,
    pub total: T,
    pub measured: Option<T>,
}

/// Pairs the bound series with the measured averaged suboptimality (when
/// `f*` is known) at each of the `logged` iteration indices.
pub fn bound_report<T: Real>(
    p: &BoundParams<T>,
    trace: &RunTrace<T>,
    f_star: Option<T>,
    logged: &[usize],
    check_hypotheses: bool,
) -> Result<Vec<BoundRow<T>>> {
    let n_max = logged.iter().copied().max().unwrap_or(0);
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let series = if check_hypotheses { theorem1_series(p, n_max)? } else { theorem1_series_unchecked(p, n_max)? };
    let measured = match f_star {
        Some(fs) => Some(averaged_suboptimality(trace, fs)?),
        None => None,
    };
    Ok(logged
        .iter()
        .map(|&n| {
            let t = series[n - 1];
            BoundRow {
                n,
                term1: t.term1,
                term2: t.term2,
                term3: t.term3,
                total: t.total,
                measured: measured.as_ref().and_then(|m| m.get(n - 1).copied()),
            }
        })
        .collect())
}
