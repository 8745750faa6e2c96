//! The Stiefel manifold `St(k, d) = {U ∈ ℝ^{d×k} : UᵀU = I_k}` under the
//! embedded (Frobenius) metric, with the QR retraction and the projection
//! vector transport standing in for the exponential map and parallel
//! transport.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg::{orthonormality_defect, sym, thin_qr};
use crate::scalar::Real;

/// Orthonormality drift above which a point is re-orthonormalized.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// A `d×k` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint<T> {
    mat: Array2<T>,
}

impl<T: Real> StiefelPoint<T> {
    /// Accepts `mat` when `‖UᵀU − I‖_F ≤ 1e−10`.
    pub fn new(mat: Array2<T>) -> Result<Self> {
        let (d, k) = mat.dim();
        if k == 0 || k > d {
            return Err(Error::InvalidArgument(format!("St(k, d) needs 1 ≤ k ≤ d, got k={k}, d={d}")));
        }
        let defect = orthonormality_defect(mat.view());
        if !(defect <= T::lit(ORTHONORMALITY_TOL)) {
            return Err(Error::InvalidArgument(format!("columns are not orthonormal (‖UᵀU − I‖_F = {defect})")));
        }
        Ok(Self { mat })
    }

    /// `qf(A)`: the Q factor of `A` with the positive-diagonal convention.
    pub fn from_qf(a: ArrayView2<'_, T>) -> Result<Self> {
        let (q, _) = thin_qr(a)?;
        Ok(Self { mat: q })
    }

    /// First `k` columns of `I_d`.
    pub fn identity_columns(d: usize, k: usize) -> Self {
        let mut mat = Array2::zeros((d, k));
        for j in 0..k.min(d) {
            mat[[j, j]] = T::one();
        }
        Self { mat }
    }

    pub fn mat(&self) -> ArrayView2<'_, T> {
        self.mat.view()
    }

    pub fn into_mat(self) -> Array2<T> {
        self.mat
    }

    pub fn dim(&self) -> (usize, usize) {
        self.mat.dim()
    }

    pub fn orthonormality_defect(&self) -> T {
        orthonormality_defect(self.mat.view())
    }

    /// Re-runs QR when drift exceeds [`ORTHONORMALITY_TOL`].
    pub fn reorthonormalized(self) -> Result<Self> {
        if self.orthonormality_defect() > T::lit(ORTHONORMALITY_TOL) {
            Self::from_qf(self.mat.view())
        } else {
            Ok(self)
        }
    }
}

fn check_shape<T>(u: &StiefelPoint<T>, m: ArrayView2<'_, T>) -> Result<()> {
    if u.mat.dim() != m.dim() {
        let (d, k) = u.mat.dim();
        let (d2, k2) = m.dim();
        return Err(Error::DimensionMismatch { expected: d * k, found: d2 * k2 });
    }
    Ok(())
}

/// `R_U(ξ) = qf(U + ξ)`.
pub fn qr_retraction<T: Real>(u: &StiefelPoint<T>, xi: ArrayView2<'_, T>) -> Result<StiefelPoint<T>> {
    check_shape(u, xi)?;
    let sum = &u.mat + &xi;
    StiefelPoint::from_qf(sum.view())
}

/// `T_{U→V}(ξ) = ξ − V sym(Vᵀξ)`.
///
/// Only `V` enters the formula; `U` is kept in the signature because the
/// transported vector lives at `U`.
pub fn vector_transport<T: Real>(u: &StiefelPoint<T>, v: &StiefelPoint<T>, xi: ArrayView2<'_, T>) -> Result<Array2<T>> {
    check_shape(u, xi)?;
    check_shape(v, xi)?;
    Ok(project_onto(v.mat(), xi))
}

/// Orthogonal projection onto `T_U St(k, d)` under the embedded metric:
/// `G − U sym(UᵀG)`.
pub fn tangent_project<T: Real>(u: &StiefelPoint<T>, g: ArrayView2<'_, T>) -> Result<Array2<T>> {
    check_shape(u, g)?;
    Ok(project_onto(u.mat(), g))
}

fn project_onto<T: Real>(u: ArrayView2<'_, T>, g: ArrayView2<'_, T>) -> Array2<T> {
    let s = sym(u.t().dot(&g).view());
    &g - &u.dot(&s)
}

/// `‖sym(Uᵀξ)‖_F`; zero exactly when `ξ` is tangent at `U`.
pub fn tangency_defect<T: Real>(u: &StiefelPoint<T>, xi: ArrayView2<'_, T>) -> T {
    crate::linalg::frobenius(sym(u.mat.t().dot(&xi).view()).view())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Array2<f64> {
        Array2::from_shape_fn((d, k), |_| StandardNormal.sample(rng))
    }

    fn random_point(rng: &mut ChaCha8Rng, d: usize, k: usize) -> StiefelPoint<f64> {
        StiefelPoint::from_qf(gaussian(rng, d, k).view()).unwrap()
    }

    #[test]
    fn retraction_at_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_point(&mut rng, 6, 3);
        let r = qr_retraction(&u, Array2::zeros((6, 3)).view()).unwrap();
        assert!(frobenius((&r.mat - &u.mat).view()) < 1e-14);
    }

    #[test]
    fn retraction_output_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let u = random_point(&mut rng, 7, 3);
            let xi = tangent_project(&u, gaussian(&mut rng, 7, 3).view()).unwrap();
            let r = qr_retraction(&u, xi.view()).unwrap();
            assert!(r.orthonormality_defect() <= 1e-10);
        }
    }

    #[test]
    fn retraction_hand_example() {
        let u = StiefelPoint::new(array![[1.0], [0.0]]).unwrap();
        let r = qr_retraction(&u, array![[0.0], [1.0]].view()).unwrap();
        let s = 0.5f64.sqrt();
        assert!((r.mat[[0, 0]] - s).abs() < 1e-15 && (r.mat[[1, 0]] - s).abs() < 1e-15);
    }

    #[test]
    fn retraction_agrees_to_first_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_point(&mut rng, 5, 2);
        let xi = tangent_project(&u, gaussian(&mut rng, 5, 2).view()).unwrap();
        let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&t| {
                let step = xi.clone() * t;
                let r = qr_retraction(&u, step.view()).unwrap();
                frobenius((&r.mat - &(&u.mat + &step)).view()) / (t * t)
            })
            .collect();
        let bound = 10.0 * frobenius(xi.view()).powi(2);
        assert!(ratios.iter().all(|&r| r < bound), "{ratios:?}");
    }

    #[test]
    fn retraction_rejects_rank_deficient_input() {
        let u = StiefelPoint::new(array![[1.0], [0.0]]).unwrap();
        let err = qr_retraction(&u, array![[-1.0], [0.0]].view()).unwrap_err();
        assert_eq!(err, Error::RankDeficient { rank: 0, k: 1 });
    }

    #[test]
    fn transport_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let u = random_point(&mut rng, 6, 2);
            let v = random_point(&mut rng, 6, 2);
            let xi = tangent_project(&u, gaussian(&mut rng, 6, 2).view()).unwrap();
            let same = vector_transport(&u, &u, xi.view()).unwrap();
            assert!(frobenius((&same - &xi).view()) < 1e-12);
            let moved = vector_transport(&u, &v, xi.view()).unwrap();
            assert!(tangency_defect(&v, moved.view()) < 1e-12);
            assert!(frobenius(moved.view()) <= frobenius(xi.view()) + 1e-12);
            let zero = vector_transport(&u, &v, Array2::zeros((6, 2)).view()).unwrap();
            assert!(zero.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn tangent_projection_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_point(&mut rng, 6, 3);
        let self_proj = tangent_project(&u, u.mat()).unwrap();
        assert!(frobenius(self_proj.view()) < 1e-14);
        for _ in 0..50 {
            let g = gaussian(&mut rng, 6, 3);
            let p = tangent_project(&u, g.view()).unwrap();
            let pp = tangent_project(&u, p.view()).unwrap();
            assert!(frobenius((&pp - &p).view()) < 1e-12);
            assert!(tangency_defect(&u, p.view()) < 1e-12);
        }
    }

    #[test]
    fn constructor_validates() {
        assert!(StiefelPoint::new(array![[1.0, 0.0], [0.0, 2.0]]).is_err());
        assert!(StiefelPoint::new(array![[1.0, 0.0]]).is_err());
        let drifted = StiefelPoint { mat: array![[1.0 + 1e-6], [0.0]] };
        let fixed = drifted.reorthonormalized().unwrap();
        assert!(fixed.orthonormality_defect() < 1e-15);
    }
}
