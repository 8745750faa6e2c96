//! Small dense helpers on ndarray types: inner products, `sym`, and a thin
//! Householder QR with the positive-diagonal convention.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Zip};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: ArrayView1<'_, T>, b: ArrayView1<'_, T>) -> T {
    a.dot(&b)
}

#[inline]
pub fn norm_sq<T: Real>(a: ArrayView1<'_, T>) -> T {
    a.dot(&a)
}

#[inline]
pub fn norm<T: Real>(a: ArrayView1<'_, T>) -> T {
    norm_sq(a).sqrt()
}

pub fn frobenius_sq<T: Real>(a: ArrayView2<'_, T>) -> T {
    a.iter().fold(T::zero(), |acc, &x| acc + x * x)
}

pub fn frobenius<T: Real>(a: ArrayView2<'_, T>) -> T {
    frobenius_sq(a).sqrt()
}

/// Frobenius inner product `tr(aᵀb)`.
pub fn frobenius_inner<T: Real>(a: ArrayView2<'_, T>, b: ArrayView2<'_, T>) -> T {
    Zip::from(a).and(b).fold(T::zero(), |acc, &x, &y| acc + x * y)
}

/// `(a + aᵀ)/2` for a square matrix.
pub fn sym<T: Real>(a: ArrayView2<'_, T>) -> Array2<T> {
    let half = T::lit(0.5);
    let mut out = a.to_owned();
    out += &a.t();
    out.mapv_inplace(|x| x * half);
    out
}

/// `‖UᵀU − I‖_F`.
pub fn orthonormality_defect<T: Real>(u: ArrayView2<'_, T>) -> T {
    let mut gram = u.t().dot(&u);
    for i in 0..gram.nrows() {
        gram[[i, i]] -= T::one();
    }
    frobenius(gram.view())
}

/// Thin QR factorization `A = QR` of a tall `d×k` matrix by Householder
/// reflections, normalized so that `diag(R) > 0`.
///
/// With that normalization `Q` is a function of `A`, which is what makes
/// `qf` usable as a retraction.
pub fn thin_qr<T: Real>(a: ArrayView2<'_, T>) -> Result<(Array2<T>, Array2<T>)> {
    let (d, k) = a.dim();
    if k > d {
        return Err(Error::DimensionMismatch { expected: d, found: k });
    }
    let scale = frobenius(a).max(T::one());
    let tol = T::epsilon() * T::from_usize_lossy(64 * d.max(1)) * scale;

    let mut r = a.to_owned();
    let mut reflectors: Vec<Array1<T>> = Vec::with_capacity(k);
    for j in 0..k {
        let x = r.slice(s![j.., j]).to_owned();
        let alpha = norm(x.view());
        let mut v = x;
        let sign = if v[0] >= T::zero() { T::one() } else { -T::one() };
        v[0] += sign * alpha;
        let vnorm_sq = norm_sq(v.view());
        if vnorm_sq > T::zero() {
            let two_over = T::lit(2.0) / vnorm_sq;
            let mut block = r.slice_mut(s![j.., j..]);
            let w = v.dot(&block);
            for (i, &vi) in v.iter().enumerate() {
                let coef = vi * two_over;
                let mut row = block.row_mut(i);
                row.scaled_add(-coef, &w);
            }
        }
        reflectors.push(v);
    }

    let rank = (0..k).filter(|&j| r[[j, j]].abs() > tol).count();
    if rank < k {
        return Err(Error::RankDeficient { rank, k });
    }

    // Q = H_1 ⋯ H_k applied to the first k columns of the identity.
    let mut q = Array2::<T>::zeros((d, k));
    for j in 0..k {
        q[[j, j]] = T::one();
    }
    for (j, v) in reflectors.iter().enumerate().rev() {
        let vnorm_sq = norm_sq(v.view());
        if vnorm_sq == T::zero() {
            continue;
        }
        let two_over = T::lit(2.0) / vnorm_sq;
        let mut block = q.slice_mut(s![j.., ..]);
        let w = v.dot(&block);
        for (i, &vi) in v.iter().enumerate() {
            let coef = vi * two_over;
            block.row_mut(i).scaled_add(-coef, &w);
        }
    }

    let mut r_thin = r.slice(s![..k, ..]).to_owned();
    for j in 0..k {
        for i in (j + 1)..k {
            r_thin[[i, j]] = T::zero();
        }
        if r_thin[[j, j]] < T::zero() {
            q.column_mut(j).mapv_inplace(|x| -x);
            r_thin.row_mut(j).mapv_inplace(|x| -x);
        }
    }
    Ok((q, r_thin))
}
