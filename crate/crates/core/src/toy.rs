//! A deterministic, geodesically convex test problem on a product of
//! Poincaré balls: `f(x) = ½ Σᵢ d(xᵢ, pᵢ)²` with fixed targets `pᵢ` inside
//! the clip radius. `f* = 0`, the Riemannian gradient is `−log_{xᵢ}(pᵢ)`,
//! and `D`, `G` follow from the clip radius and the targets, so convergence
//! bounds can be checked along a single path.

use ndarray::Array1;

use crate::bounds::BoundParams;
use crate::error::{Error, Result};
use crate::optim::{Manifold, Optimizer, OptimizerState, PoincareBall, ProductTangent, Schedule};
use crate::poincare::{self, BallPoint};
use crate::scalar::Real;
use crate::trace::RunTrace;

#[derive(Debug, Clone)]
pub struct ToyConvex<T: Real> {
    pub ball: PoincareBall<T>,
    pub targets: Vec<BallPoint<T>>,
    pub init: Vec<BallPoint<T>>,
}

impl<T: Real> ToyConvex<T> {
    pub fn new(targets: Vec<BallPoint<T>>, init: Vec<BallPoint<T>>) -> Result<Self> {
        let dim = targets.first().map(BallPoint::dim).ok_or(Error::InvalidArgument("no targets".into()))?;
        if init.len() != targets.len() {
            return Err(Error::DimensionMismatch { expected: targets.len(), found: init.len() });
        }
        let ball = PoincareBall::new(dim);
        for p in targets.iter().chain(&init) {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
            if !ball.contains(p) {
                return Err(Error::OutsideBall { what: "toy point", norm: p.norm().as_f64() });
            }
        }
        Ok(Self { ball, targets, init })
    }

    /// `n` components in `ℬᵈ`: targets at radius 0.6 on a circle in the
    /// first two coordinates, starts at radius 0.3 on the opposite side.
    pub fn standard(n: usize, dim: usize) -> Self {
        let point = |r: f64, theta: f64| {
            let mut c = Array1::zeros(dim);
            c[0] = T::lit(r * theta.cos());
            if dim > 1 {
                c[1] = T::lit(r * theta.sin());
            }
            BallPoint::new(c).expect("inside the ball")
        };
        let angle = |i: usize| 2.0 * std::f64::consts::PI * i as f64 / n.max(1) as f64 + 0.3;
        let targets = (0..n).map(|i| point(0.6, angle(i))).collect();
        let init = (0..n).map(|i| point(0.3, angle(i) + std::f64::consts::PI)).collect();
        Self::new(targets, init).expect("standard toy is valid")
    }

    pub fn num_components(&self) -> usize {
        self.targets.len()
    }

    pub fn objective(&self, x: &[BallPoint<T>]) -> T {
        let half = T::lit(0.5);
        x.iter().zip(&self.targets).map(|(xi, p)| half * self.ball.distance(xi, p).powi(2)).sum()
    }

    pub fn rgrad(&self, x: &[BallPoint<T>]) -> Result<ProductTangent<Array1<T>>> {
        let g = x
            .iter()
            .zip(&self.targets)
            .map(|(xi, p)| poincare::log_map(xi, p).map(|l| -l))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductTangent::dense(g))
    }

    pub fn f_star(&self) -> T {
        T::zero()
    }

    /// Hyperbolic diameter of the clipped ball.
    pub fn diameter(&self) -> T {
        self.ball.diameter()
    }

    /// `G = maxᵢ (d(0, pᵢ) + d(0, ∂X))`, which bounds `d(x, pᵢ) = ‖grad‖` on `X`.
    pub fn gradient_bound(&self) -> T {
        let half_diam = self.diameter() / T::lit(2.0);
        let origin = BallPoint::origin(self.ball.dim);
        self.targets.iter().map(|p| self.ball.distance(&origin, p) + half_diam).fold(T::zero(), T::max)
    }

    pub fn bound_params(&self, schedule: Schedule<T>) -> BoundParams<T> {
        BoundParams::new(self.gradient_bound(), self.diameter(), vec![-T::one(); self.num_components()], schedule)
    }
}

/// Runs `iterations` full-gradient steps from the toy's starting point,
/// recording `f(x_n)` and per-component statistics at every step.
pub fn run_toy<T: Real>(
    toy: &ToyConvex<T>,
    optimizer: &Optimizer<T>,
    iterations: usize,
) -> Result<(Vec<BallPoint<T>>, RunTrace<T>)> {
    let opt = optimizer.record_components(true);
    let mut state: OptimizerState<T, PoincareBall<T>> = OptimizerState::new(toy.init.clone());
    let mut trace = RunTrace::new(opt.kind, opt.accumulate_epsilon);
    trace.f_star = Some(toy.f_star());
    trace.steps.reserve(iterations);
    for _ in 0..iterations {
        let f = toy.objective(&state.x);
        let g = toy.rgrad(&state.x)?;
        let mut rec = opt.step(&toy.ball, &mut state, &g, 0)?;
        rec.objective = Some(f);
        trace.steps.push(rec);
    }
    Ok((state.x, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{averaged_suboptimality, lemma2_check, theorem1_series};
    use crate::optim::OptimizerKind;

    #[test]
    fn gradient_is_minus_log_and_vanishes_at_targets() {
        let toy = ToyConvex::<f64>::standard(4, 2);
        let g = toy.rgrad(&toy.targets).unwrap();
        assert!(g.entries().iter().all(|(_, v)| v.iter().all(|c| c.abs() < 1e-12)));
        assert_eq!(toy.objective(&toy.targets), 0.0);

        // Riemannian norm of the gradient equals the distance
        let g = toy.rgrad(&toy.init).unwrap();
        for ((_, gi), (x, p)) in g.entries().iter().zip(toy.init.iter().zip(&toy.targets)) {
            let n = toy.ball.norm(x, gi);
            assert!((n - toy.ball.distance(x, p)).abs() < 1e-12);
            assert!(n <= toy.gradient_bound());
        }
    }

    #[test]
    fn gradient_matches_finite_differences_of_the_objective() {
        let toy = ToyConvex::<f64>::standard(3, 2);
        let x = toy.init.clone();
        let g = toy.rgrad(&x).unwrap();
        let h = 1e-6;
        for (i, (_, gi)) in g.entries().iter().enumerate() {
            for j in 0..2 {
                let shift = |s: f64| {
                    let mut y = x.clone();
                    let mut c = y[i].coords().to_owned();
                    c[j] += s;
                    y[i] = BallPoint::new(c).unwrap();
                    toy.objective(&y)
                };
                let fd = (shift(h) - shift(-h)) / (2.0 * h);
                // Euclidean gradient = λ² · Riemannian gradient
                let lambda = x[i].conformal_factor();
                assert!((fd - lambda * lambda * gi[j]).abs() < 1e-6, "{fd} vs {}", lambda * lambda * gi[j]);
            }
        }
    }

    #[test]
    fn ramsgrad_converges_and_stays_below_the_bound() {
        let toy = ToyConvex::<f64>::standard(4, 2);
        let sched = Schedule::constant(0.05, 0.01, 0.999, 1e-8);
        let (x, trace) = run_toy(&toy, &Optimizer::new(OptimizerKind::RamsGrad, sched), 2000).unwrap();
        assert!(toy.objective(&x) < 1e-6);
        let measured = averaged_suboptimality(&trace, 0.0).unwrap();
        let bound = theorem1_series(&toy.bound_params(sched), 2000).unwrap();
        assert!(measured.iter().zip(&bound).all(|(m, b)| *m <= b.total));
        assert!(lemma2_check(&trace, trace.observed_gradient_bound()).is_ok());
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let a = BallPoint::from_slice(&[0.1, 0.0]).unwrap();
        assert!(ToyConvex::new(vec![a.clone()], vec![]).is_err());
        assert!(ToyConvex::new(vec![a], vec![BallPoint::from_slice(&[0.1]).unwrap()]).is_err());
    }
}
