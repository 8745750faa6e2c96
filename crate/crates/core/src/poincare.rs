//! Closed-form geometry of the Poincaré ball `(ℬᵈ, ρ)` with curvature −1.
//!
//! Points are coordinate vectors of Euclidean norm `< 1`; tangent vectors are
//! plain ambient vectors whose base point is passed alongside them. The
//! metric is conformal, `ρ_x = λ_x² ρᴱ` with `λ_x = 2/(1 − ‖x‖²)`.

use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, norm_sq};
use crate::scalar::Real;

/// Radius of the constraint set `X = {x : ‖x‖ ≤ 1 − 10⁻⁵}`.
pub const CLIP_RADIUS: f64 = 1.0 - 1e-5;

/// Upper clamp on `‖(−x) ⊕ y‖` before `atanh`.
pub const ATANH_CLAMP: f64 = 1.0 - 1e-15;

/// Tangent vectors shorter than this are treated as exactly zero by `exp_map`.
pub const ZERO_TANGENT: f64 = 1e-15;

/// A point of the open unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint<T> {
    coords: Array1<T>,
}

impl<T: Real> BallPoint<T> {
    pub fn new(coords: Array1<T>) -> Result<Self> {
        let n = norm(coords.view());
        if !n.is_finite() || n >= T::one() {
            return Err(Error::OutsideBall { what: "point", norm: n.as_f64() });
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[T]) -> Result<Self> {
        Self::new(Array1::from(coords.to_vec()))
    }

    pub fn origin(dim: usize) -> Self {
        Self { coords: Array1::zeros(dim) }
    }

    #[inline]
    pub fn coords(&self) -> ArrayView1<'_, T> {
        self.coords.view()
    }

    pub fn into_coords(self) -> Array1<T> {
        self.coords
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn norm_sq(&self) -> T {
        norm_sq(self.coords.view())
    }

    #[inline]
    pub fn norm(&self) -> T {
        norm(self.coords.view())
    }

    /// `1 − ‖x‖²`, the reciprocal half conformal factor.
    #[inline]
    fn one_minus_norm_sq(&self) -> T {
        T::one() - self.norm_sq()
    }

    /// Conformal factor `λ_x = 2/(1 − ‖x‖²)`.
    #[inline]
    pub fn conformal_factor(&self) -> T {
        T::lit(2.0) / self.one_minus_norm_sq()
    }
}

fn check_dims<T>(a: ArrayView1<'_, T>, b: ArrayView1<'_, T>) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(())
}

/// Möbius addition on raw coordinates, no domain checks.
pub(crate) fn mobius_add_raw<T: Real>(x: ArrayView1<'_, T>, y: ArrayView1<'_, T>) -> Array1<T> {
    let two = T::lit(2.0);
    let xy = dot(x, y);
    let x2 = norm_sq(x);
    let y2 = norm_sq(y);
    let num_x = T::one() + two * xy + y2;
    let num_y = T::one() - x2;
    let denom = T::one() + two * xy + x2 * y2;
    let mut out = x.to_owned() * (num_x / denom);
    out.scaled_add(num_y / denom, &y);
    out
}

/// `x ⊕ y`.
pub fn mobius_add<T: Real>(x: &BallPoint<T>, y: &BallPoint<T>) -> Result<BallPoint<T>> {
    check_dims(x.coords(), y.coords())?;
    let raw = mobius_add_raw(x.coords(), y.coords());
    BallPoint::new(raw)
}

/// `⊖x = −x`.
pub fn mobius_neg<T: Real>(x: &BallPoint<T>) -> BallPoint<T> {
    BallPoint { coords: x.coords.mapv(|c| -c) }
}

/// The gyration `gyr[x, y]` applied to an arbitrary ambient vector `z`.
///
/// `gyr[x, y]` is a linear orthogonal map, so it extends from ball elements
/// to tangent coordinates of any length. It is evaluated in closed form:
/// `z + 2(a·x + b·y)/δ` with
/// `a = −⟨x,z⟩‖y‖² + ⟨y,z⟩ + 2⟨x,y⟩⟨y,z⟩`, `b = −⟨y,z⟩‖x‖² − ⟨x,z⟩`,
/// `δ = 1 + 2⟨x,y⟩ + ‖x‖²‖y‖²`.
pub fn gyration<T: Real>(x: &BallPoint<T>, y: &BallPoint<T>, z: ArrayView1<'_, T>) -> Result<Array1<T>> {
    check_dims(x.coords(), y.coords())?;
    check_dims(x.coords(), z)?;
    Ok(gyration_raw(x.coords(), y.coords(), z))
}

pub(crate) fn gyration_raw<T: Real>(x: ArrayView1<'_, T>, y: ArrayView1<'_, T>, z: ArrayView1<'_, T>) -> Array1<T> {
    let two = T::lit(2.0);
    let xy = dot(x, y);
    let xz = dot(x, z);
    let yz = dot(y, z);
    let x2 = norm_sq(x);
    let y2 = norm_sq(y);
    let a = -xz * y2 + yz + two * xy * yz;
    let b = -yz * x2 - xz;
    let delta = T::one() + two * xy + x2 * y2;
    let mut out = z.to_owned();
    out.scaled_add(two * a / delta, &x);
    out.scaled_add(two * b / delta, &y);
    out
}

/// Geodesic distance `d(x, y) = 2 atanh ‖(−x) ⊕ y‖`.
pub fn distance<T: Real>(x: &BallPoint<T>, y: &BallPoint<T>) -> Result<T> {
    check_dims(x.coords(), y.coords())?;
    Ok(distance_raw(x.coords(), y.coords()))
}

pub(crate) fn distance_raw<T: Real>(x: ArrayView1<'_, T>, y: ArrayView1<'_, T>) -> T {
    let neg_x = x.mapv(|c| -c);
    let u = mobius_add_raw(neg_x.view(), y);
    let r = norm(u.view()).min(T::lit(ATANH_CLAMP));
    T::lit(2.0) * r.atanh()
}

/// Exponential map before projection; the result may touch the unit sphere
/// when `tanh` saturates.
pub(crate) fn exp_map_raw<T: Real>(x: &BallPoint<T>, xi: ArrayView1<'_, T>) -> Array1<T> {
    let xi_norm = norm(xi);
    if xi_norm < T::lit(ZERO_TANGENT) {
        return x.coords.clone();
    }
    let t = (xi_norm / x.one_minus_norm_sq()).tanh() / xi_norm;
    let step = xi.mapv(|c| c * t);
    mobius_add_raw(x.coords(), step.view())
}

/// `exp_x(ξ) = x ⊕ tanh(‖ξ‖/(1 − ‖x‖²)) ξ/‖ξ‖`, with `exp_x(0) = x`.
pub fn exp_map<T: Real>(x: &BallPoint<T>, xi: ArrayView1<'_, T>) -> Result<BallPoint<T>> {
    check_dims(x.coords(), xi)?;
    BallPoint::new(exp_map_raw(x, xi))
}

/// `log_x(y)`, the inverse of [`exp_map`]:
/// `(1 − ‖x‖²) atanh(‖u‖) u/‖u‖` with `u = (−x) ⊕ y`.
pub fn log_map<T: Real>(x: &BallPoint<T>, y: &BallPoint<T>) -> Result<Array1<T>> {
    check_dims(x.coords(), y.coords())?;
    let neg_x = x.coords.mapv(|c| -c);
    let u = mobius_add_raw(neg_x.view(), y.coords());
    let u_norm = norm(u.view());
    if u_norm == T::zero() {
        return Ok(Array1::zeros(x.dim()));
    }
    let r = u_norm.min(T::lit(ATANH_CLAMP));
    let scale = x.one_minus_norm_sq() * r.atanh() / u_norm;
    Ok(u * scale)
}

/// Parallel transport along the geodesic from `x` to `y`:
/// `((1 − ‖y‖²)/(1 − ‖x‖²)) gyr[y, −x] ξ`.
pub fn parallel_transport<T: Real>(x: &BallPoint<T>, y: &BallPoint<T>, xi: ArrayView1<'_, T>) -> Result<Array1<T>> {
    check_dims(x.coords(), y.coords())?;
    check_dims(x.coords(), xi)?;
    Ok(parallel_transport_raw(x, y, xi))
}

pub(crate) fn parallel_transport_raw<T: Real>(x: &BallPoint<T>, y: &BallPoint<T>, xi: ArrayView1<'_, T>) -> Array1<T> {
    let neg_x = x.coords.mapv(|c| -c);
    let rotated = gyration_raw(y.coords(), neg_x.view(), xi);
    rotated * (y.one_minus_norm_sq() / x.one_minus_norm_sq())
}

/// Riemannian gradient from a Euclidean one: `((1 − ‖x‖²)²/4) ∇ᴱf`.
pub fn egrad_to_rgrad<T: Real>(x: &BallPoint<T>, eg: ArrayView1<'_, T>) -> Result<Array1<T>> {
    check_dims(x.coords(), eg)?;
    let s = x.one_minus_norm_sq();
    Ok(eg.mapv(|c| c * s * s * T::lit(0.25)))
}

/// `Π_X`: radial projection onto `{‖x‖ ≤ 1 − 10⁻⁵}`.
pub fn project_to_clipped_ball<T: Real>(x: Array1<T>) -> BallPoint<T> {
    project_to_radius(x, T::lit(CLIP_RADIUS))
}

pub(crate) fn project_to_radius<T: Real>(mut x: Array1<T>, radius: T) -> BallPoint<T> {
    let n = norm(x.view());
    if n > radius {
        let s = radius / n;
        x.mapv_inplace(|c| c * s);
        // Rounding can leave the rescaled norm one ulp above the radius.
        while norm(x.view()) > radius {
            x.mapv_inplace(|c| c * (T::one() - T::epsilon()));
        }
    }
    BallPoint { coords: x }
}

/// `ρ_x(u, v) = (4/(1 − ‖x‖²)²) ⟨u, v⟩`.
pub fn riemannian_inner<T: Real>(x: &BallPoint<T>, u: ArrayView1<'_, T>, v: ArrayView1<'_, T>) -> Result<T> {
    check_dims(x.coords(), u)?;
    check_dims(u, v)?;
    let lambda = x.conformal_factor();
    Ok(lambda * lambda * dot(u, v))
}

/// `‖ξ‖_x = λ_x ‖ξ‖₂`.
pub fn riemannian_norm<T: Real>(x: &BallPoint<T>, xi: ArrayView1<'_, T>) -> T {
    x.conformal_factor() * norm(xi)
}

/// Diameter of the closed ball of Euclidean radius `r` measured in the
/// hyperbolic metric: `2 · 2 atanh(r)`.
pub fn clipped_ball_diameter<T: Real>(radius: T) -> T {
    T::lit(4.0) * radius.atanh()
}
