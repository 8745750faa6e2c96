//! The component-manifold contract used by the optimizers, and its three
//! implementations: Euclidean space, the clipped Poincaré ball, and the
//! Stiefel manifold.

use std::fmt::Debug;

use ndarray::{Array, Array1, Array2, Dimension};

use crate::error::Result;
use crate::linalg::{dot, frobenius, frobenius_inner};
use crate::poincare::{self, BallPoint, CLIP_RADIUS};
use crate::scalar::Real;
use crate::stiefel::{self, StiefelPoint};

/// Linear structure of a tangent space.
pub trait TangentVector<T: Real>: Clone + Debug + Send + Sync {
    fn scaled(&self, a: T) -> Self;
    fn scale_mut(&mut self, a: T);
    /// `self += a · other`
    fn axpy(&mut self, a: T, other: &Self);
    fn is_zero(&self) -> bool;
}

impl<T: Real, D: Dimension> TangentVector<T> for Array<T, D> {
    fn scaled(&self, a: T) -> Self {
        self.mapv(|x| x * a)
    }

    fn scale_mut(&mut self, a: T) {
        self.mapv_inplace(|x| x * a);
    }

    fn axpy(&mut self, a: T, other: &Self) {
        self.scaled_add(a, other);
    }

    fn is_zero(&self) -> bool {
        self.iter().all(|x| x.is_zero())
    }
}

/// One factor `M_i` of a product manifold together with its constraint set
/// `X_i`.
///
/// `exp_project` is the composite `Π_{X_i} ∘ exp_x`; components without a
/// closed-form exponential map use a retraction there, and `transport` may
/// be a vector transport rather than parallel transport.
pub trait Manifold<T: Real>: Send + Sync {
    type Point: Clone + Debug + Send + Sync;
    type Tangent: TangentVector<T>;

    fn inner(&self, x: &Self::Point, u: &Self::Tangent, v: &Self::Tangent) -> T;

    fn norm(&self, x: &Self::Point, u: &Self::Tangent) -> T {
        self.inner(x, u, u).max(T::zero()).sqrt()
    }

    fn exp_project(&self, x: &Self::Point, v: &Self::Tangent) -> Result<Self::Point>;

    fn transport(&self, from: &Self::Point, to: &Self::Point, v: &Self::Tangent) -> Self::Tangent;

    fn egrad_to_rgrad(&self, x: &Self::Point, eg: &Self::Tangent) -> Self::Tangent;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> T;

    /// Membership in `X_i`.
    fn contains(&self, x: &Self::Point) -> bool;

    /// Lower bound on sectional curvature, when the component satisfies the
    /// Hadamard-manifold hypotheses.
    fn curvature_lower_bound(&self) -> Option<T>;
}

/// `ℝᵈ` with `X = ℝᵈ`.
#[derive(Debug, Clone, Copy)]
pub struct Euclidean {
    pub dim: usize,
}

impl<T: Real> Manifold<T> for Euclidean {
    type Point = Array1<T>;
    type Tangent = Array1<T>;

    fn inner(&self, _x: &Array1<T>, u: &Array1<T>, v: &Array1<T>) -> T {
        dot(u.view(), v.view())
    }

    fn exp_project(&self, x: &Array1<T>, v: &Array1<T>) -> Result<Array1<T>> {
        Ok(x + v)
    }

    fn transport(&self, _from: &Array1<T>, _to: &Array1<T>, v: &Array1<T>) -> Array1<T> {
        v.clone()
    }

    fn egrad_to_rgrad(&self, _x: &Array1<T>, eg: &Array1<T>) -> Array1<T> {
        eg.clone()
    }

    fn distance(&self, x: &Array1<T>, y: &Array1<T>) -> T {
        crate::linalg::norm((x - y).view())
    }

    fn contains(&self, x: &Array1<T>) -> bool {
        x.len() == self.dim && x.iter().all(|c| c.is_finite())
    }

    fn curvature_lower_bound(&self) -> Option<T> {
        Some(T::zero())
    }
}

/// The Poincaré ball `ℬᵈ` with `X = {‖x‖ ≤ radius}`.
#[derive(Debug, Clone, Copy)]
pub struct PoincareBall<T> {
    pub dim: usize,
    pub radius: T,
}

impl<T: Real> PoincareBall<T> {
    pub fn new(dim: usize) -> Self {
        Self { dim, radius: T::lit(CLIP_RADIUS) }
    }

    /// Diameter of `X` in the hyperbolic metric.
    pub fn diameter(&self) -> T {
        poincare::clipped_ball_diameter(self.radius)
    }
}

impl<T: Real> Manifold<T> for PoincareBall<T> {
    type Point = BallPoint<T>;
    type Tangent = Array1<T>;

    fn inner(&self, x: &BallPoint<T>, u: &Array1<T>, v: &Array1<T>) -> T {
        let lambda = x.conformal_factor();
        lambda * lambda * dot(u.view(), v.view())
    }

    fn exp_project(&self, x: &BallPoint<T>, v: &Array1<T>) -> Result<BallPoint<T>> {
        let raw = poincare::exp_map_raw(x, v.view());
        Ok(poincare::project_to_radius(raw, self.radius))
    }

    fn transport(&self, from: &BallPoint<T>, to: &BallPoint<T>, v: &Array1<T>) -> Array1<T> {
        poincare::parallel_transport_raw(from, to, v.view())
    }

    fn egrad_to_rgrad(&self, x: &BallPoint<T>, eg: &Array1<T>) -> Array1<T> {
        let s = T::one() - x.norm_sq();
        eg.mapv(|c| c * s * s * T::lit(0.25))
    }

    fn distance(&self, x: &BallPoint<T>, y: &BallPoint<T>) -> T {
        poincare::distance_raw(x.coords(), y.coords())
    }

    fn contains(&self, x: &BallPoint<T>) -> bool {
        x.dim() == self.dim && x.norm() <= self.radius
    }

    fn curvature_lower_bound(&self) -> Option<T> {
        Some(-T::one())
    }
}

/// `St(k, d)` under the embedded metric; `X = St(k, d)`.
#[derive(Debug, Clone, Copy)]
pub struct Stiefel {
    pub d: usize,
    pub k: usize,
}

impl<T: Real> Manifold<T> for Stiefel {
    type Point = StiefelPoint<T>;
    type Tangent = Array2<T>;

    fn inner(&self, _x: &StiefelPoint<T>, u: &Array2<T>, v: &Array2<T>) -> T {
        frobenius_inner(u.view(), v.view())
    }

    fn exp_project(&self, x: &StiefelPoint<T>, v: &Array2<T>) -> Result<StiefelPoint<T>> {
        stiefel::qr_retraction(x, v.view())?.reorthonormalized()
    }

    fn transport(&self, from: &StiefelPoint<T>, to: &StiefelPoint<T>, v: &Array2<T>) -> Array2<T> {
        stiefel::vector_transport(from, to, v.view()).expect("shapes fixed by the manifold")
    }

    fn egrad_to_rgrad(&self, x: &StiefelPoint<T>, eg: &Array2<T>) -> Array2<T> {
        stiefel::tangent_project(x, eg.view()).expect("shapes fixed by the manifold")
    }

    /// Chordal (Frobenius) distance; used only for diameter estimates.
    fn distance(&self, x: &StiefelPoint<T>, y: &StiefelPoint<T>) -> T {
        frobenius((&x.mat() - &y.mat()).view())
    }

    fn contains(&self, x: &StiefelPoint<T>) -> bool {
        x.dim() == (self.d, self.k) && x.orthonormality_defect() <= T::lit(stiefel::ORTHONORMALITY_TOL)
    }

    fn curvature_lower_bound(&self) -> Option<T> {
        None
    }
}
