//! Learning-rate and momentum schedules, plus the burn-in multiplier.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Horizon of the numerical hypothesis sweep in [`validate_schedule`].
pub const VALIDATION_HORIZON: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearningRate<T> {
    /// `αₙ = α`
    Constant(T),
    /// `αₙ = α₀ / n^η`
    Diminishing { alpha0: T, eta: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta1<T> {
    /// `β₁ₙ = β`
    Constant(T),
    /// `β₁ₙ = λⁿ`
    Geometric(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule<T> {
    pub learning_rate: LearningRate<T>,
    pub beta1: Beta1<T>,
    pub beta2: T,
    pub epsilon: T,
    pub burn_in_epochs: usize,
    pub burn_in_factor: T,
}

impl<T: Real> Schedule<T> {
    pub fn constant(alpha: T, beta1: T, beta2: T, epsilon: T) -> Self {
        Self {
            learning_rate: LearningRate::Constant(alpha),
            beta1: Beta1::Constant(beta1),
            beta2,
            epsilon,
            burn_in_epochs: 0,
            burn_in_factor: T::lit(0.01),
        }
    }

    pub fn diminishing(alpha0: T, eta: T, lambda: T, beta2: T, epsilon: T) -> Self {
        Self {
            learning_rate: LearningRate::Diminishing { alpha0, eta },
            beta1: Beta1::Geometric(lambda),
            beta2,
            epsilon,
            burn_in_epochs: 0,
            burn_in_factor: T::lit(0.01),
        }
    }

    pub fn with_burn_in(mut self, epochs: usize, factor: T) -> Self {
        self.burn_in_epochs = epochs;
        self.burn_in_factor = factor;
        self
    }

    /// Checks parameter ranges. This does not check the monotonicity
    /// hypotheses; see [`validate_schedule`].
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSchedule(msg));
        match self.learning_rate {
            LearningRate::Constant(a) if !(a > T::zero() && a.is_finite()) => {
                return bad(format!("learning rate must be positive, got {a}"))
            }
            LearningRate::Diminishing { alpha0, eta } => {
                if !(alpha0 > T::zero() && alpha0.is_finite()) {
                    return bad(format!("initial learning rate must be positive, got {alpha0}"));
                }
                if !(eta >= T::lit(0.5) && eta < T::one()) {
                    return bad(format!("η must lie in [1/2, 1), got {eta}"));
                }
            }
            _ => {}
        }
        let b = match self.beta1 {
            Beta1::Constant(b) | Beta1::Geometric(b) => b,
        };
        if !(b >= T::zero() && b < T::one()) {
            return bad(format!("β₁ parameter must lie in [0, 1), got {b}"));
        }
        if !(self.beta2 >= T::zero() && self.beta2 < T::one()) {
            return bad(format!("β₂ must lie in [0, 1), got {}", self.beta2));
        }
        if !(self.epsilon >= T::zero() && self.epsilon.is_finite()) {
            return bad(format!("ε must be non-negative, got {}", self.epsilon));
        }
        if !(self.burn_in_factor > T::zero() && self.burn_in_factor.is_finite()) {
            return bad(format!("burn-in factor must be positive, got {}", self.burn_in_factor));
        }
        Ok(())
    }

    /// `αₙ` without burn-in.
    pub fn alpha(&self, n: usize) -> T {
        let n = n.max(1);
        match self.learning_rate {
            LearningRate::Constant(a) => a,
            LearningRate::Diminishing { alpha0, eta } => alpha0 / T::from_usize_lossy(n).powf(eta),
        }
    }

    /// `β₁ₙ`.
    pub fn beta1(&self, n: usize) -> T {
        let n = n.max(1);
        match self.beta1 {
            Beta1::Constant(b) => b,
            Beta1::Geometric(lambda) => match i32::try_from(n) {
                Ok(e) => lambda.powi(e),
                Err(_) => lambda.powf(T::from_usize_lossy(n)),
            },
        }
    }

    /// `(αₙ, β₁ₙ)` at iteration `n ≥ 1`; during burn-in epochs `α` is scaled
    /// by `burn_in_factor`. `n` keeps advancing during burn-in.
    pub fn eval(&self, n: usize, epoch: usize) -> (T, T) {
        let mut alpha = self.alpha(n);
        if epoch < self.burn_in_epochs {
            alpha *= self.burn_in_factor;
        }
        (alpha, self.beta1(n))
    }
}

/// Which convergence hypothesis failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// `β₁ₙ ≤ β₁,ₙ₋₁`
    Beta1NonIncreasing,
    /// `αₙ(1 − β₁ₙ) ≤ αₙ₋₁(1 − β₁,ₙ₋₁)`
    EffectiveRateNonIncreasing,
}

impl Hypothesis {
    pub fn condition(&self) -> &'static str {
        match self {
            Hypothesis::Beta1NonIncreasing => "β₁ₙ ≤ β₁,ₙ₋₁",
            Hypothesis::EffectiveRateNonIncreasing => "αₙ(1 − β₁ₙ) ≤ αₙ₋₁(1 − β₁,ₙ₋₁)",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.condition())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleReport {
    Ok,
    Violation { n: usize, hypothesis: Hypothesis },
}

impl ScheduleReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, ScheduleReport::Ok)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            ScheduleReport::Ok => Ok(()),
            ScheduleReport::Violation { n, hypothesis } => {
                Err(Error::HypothesisViolated { n, condition: hypothesis.condition() })
            }
        }
    }
}

/// Sweeps `n = 2..=10⁴` for the two monotonicity hypotheses and reports the
/// first violation. Burn-in is ignored.
pub fn validate_schedule<T: Real>(sched: &Schedule<T>) -> ScheduleReport {
    validate_schedule_until(sched, VALIDATION_HORIZON)
}

pub fn validate_schedule_until<T: Real>(sched: &Schedule<T>, horizon: usize) -> ScheduleReport {
    // A few ulps of slack so that mathematically equal terms compare equal.
    let slack = T::one() + T::lit(4.0) * T::epsilon();
    let mut prev_beta = sched.beta1(1);
    let mut prev_eff = sched.alpha(1) * (T::one() - prev_beta);
    for n in 2..=horizon {
        let beta = sched.beta1(n);
        let eff = sched.alpha(n) * (T::one() - beta);
        if beta > prev_beta * slack {
            return ScheduleReport::Violation { n, hypothesis: Hypothesis::Beta1NonIncreasing };
        }
        if eff > prev_eff * slack {
            return ScheduleReport::Violation { n, hypothesis: Hypothesis::EffectiveRateNonIncreasing };
        }
        prev_beta = beta;
        prev_eff = eff;
    }
    ScheduleReport::Ok
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_schedule_values() {
        let ca1 = Schedule::constant(0.3, 0.9, 0.999, 1e-8);
        for n in [1, 7, 1000] {
            assert_eq!(ca1.eval(n, 50), (0.3, 0.9));
        }
    }

    #[test]
    fn diminishing_schedule_values() {
        let ds1 = Schedule::diminishing(30.0, 0.5, 0.5, 0.999, 1e-8);
        assert_eq!(ds1.eval(4, 0).0, 15.0);
        assert_eq!(ds1.beta1(3), 0.125);
    }

    #[test]
    fn burn_in_scales_alpha_only() {
        let s = Schedule::<f64>::constant(0.3, 0.9, 0.999, 1e-8).with_burn_in(20, 0.01);
        let (a, b) = s.eval(1, 0);
        assert!((a - 0.003).abs() < 1e-18);
        assert_eq!(b, 0.9);
        assert_eq!(s.eval(1, 19).0, 0.3 * 0.01);
        assert_eq!(s.eval(1, 20).0, 0.3);
    }

    #[test]
    fn parameter_validation() {
        assert!(Schedule::diminishing(1.0, 0.4, 0.5, 0.999, 1e-8).validate().is_err());
        assert!(Schedule::diminishing(1.0, 1.0, 0.5, 0.999, 1e-8).validate().is_err());
        assert!(Schedule::diminishing(1.0, 0.5, 0.5, 0.999, 1e-8).validate().is_ok());
        assert!(Schedule::constant(-1.0, 0.9, 0.999, 1e-8).validate().is_err());
        assert!(Schedule::constant(0.1, 1.0, 0.999, 1e-8).validate().is_err());
        assert!(Schedule::constant(0.1, 0.9, 1.0, 1e-8).validate().is_err());
        assert!(Schedule::constant(0.1, 0.9, 0.9, -1.0).validate().is_err());
    }

    #[test]
    fn constant_schedule_satisfies_hypotheses() {
        assert!(validate_schedule(&Schedule::constant(0.3, 0.9, 0.999, 1e-8)).is_ok());
        assert!(validate_schedule(&Schedule::constant(0.05, 0.01, 0.999, 1e-8)).is_ok());
    }

    #[test]
    fn diminishing_with_constant_momentum_satisfies_hypotheses() {
        let mut s = Schedule::diminishing(1.0, 0.5, 0.0, 0.999, 1e-8);
        s.beta1 = Beta1::Constant(0.9);
        assert!(validate_schedule(&s).is_ok());
    }

    #[test]
    fn geometric_momentum_breaks_effective_rate_monotonicity_at_n2() {
        // α₁(1 − λ) = 0.5 but α₂(1 − λ²) = 0.75/√2 ≈ 0.530.
        let s = Schedule::diminishing(1.0, 0.5, 0.5, 0.999, 1e-8);
        assert_eq!(
            validate_schedule(&s),
            ScheduleReport::Violation { n: 2, hypothesis: Hypothesis::EffectiveRateNonIncreasing }
        );
        // From n = 3 on the product is decreasing.
        let mut prev = s.alpha(2) * (1.0 - s.beta1(2));
        for n in 3..10_000 {
            let eff = s.alpha(n) * (1.0 - s.beta1(n));
            assert!(eff <= prev, "n = {n}");
            prev = eff;
        }
    }

    #[test]
    fn increasing_rate_is_rejected_at_n2() {
        // η = −1 gives αₙ = n. Range validation rejects it; the sweep pinpoints n = 2.
        let mut s = Schedule::diminishing(1.0, -1.0, 0.0, 0.9, 0.0);
        s.beta1 = Beta1::Constant(0.9);
        assert_eq!(s.alpha(5), 5.0);
        assert!(s.validate().is_err());
        assert_eq!(
            validate_schedule(&s),
            ScheduleReport::Violation { n: 2, hypothesis: Hypothesis::EffectiveRateNonIncreasing }
        );
    }
}
