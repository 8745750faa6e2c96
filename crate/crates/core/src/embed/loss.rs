use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};
use crate::linalg::norm_sq;
use crate::poincare::BallPoint;
use crate::scalar::Real;

/// `d(u, w) = arcosh(1 + δ)` with `δ = 2‖u−w‖² / ((1−‖u‖²)(1−‖w‖²))`,
/// evaluated as `log1p(δ + √(δ(δ+2)))` to keep precision at short range.
pub fn poincare_distance<T: Real>(u: ArrayView1<'_, T>, w: ArrayView1<'_, T>) -> T {
    let diff = &u - &w;
    let delta = T::lit(2.0) * norm_sq(diff.view()) / ((T::one() - norm_sq(u)) * (T::one() - norm_sq(w)));
    (delta + (delta * (delta + T::lit(2.0))).sqrt()).ln_1p()
}

/// `d(u, w)` with its Euclidean gradients with respect to `u` and `w`.
/// Both gradients are zero at `u = w`, where `d` is not differentiable.
pub fn distance_grad<T: Real>(u: ArrayView1<'_, T>, w: ArrayView1<'_, T>) -> (T, Array1<T>, Array1<T>) {
    let two = T::lit(2.0);
    let diff = &u - &w;
    let diff_sq = norm_sq(diff.view());
    let a = T::one() - norm_sq(u);
    let b = T::one() - norm_sq(w);
    let delta = two * diff_sq / (a * b);
    let root = (delta * (delta + two)).sqrt();
    let d = (delta + root).ln_1p();
    if diff_sq == T::zero() || root == T::zero() {
        return (d, Array1::zeros(u.len()), Array1::zeros(u.len()));
    }
    // ∂δ/∂u = 4/(ab)·(u − w) + 4‖u−w‖²/(a²b)·u, and ∂d/∂δ = 1/√(δ(δ+2))
    let c = T::lit(4.0) / (a * b * root);
    let gu = (&diff + &u.mapv(|x| x * diff_sq / a)) * c;
    let gw = (&diff.mapv(|x| -x) + &w.mapv(|x| x * diff_sq / b)) * c;
    (d, gu, gw)
}

/// Softmax negative log-likelihood of entry 0 given distances `d`, with
/// `∂loss/∂dⱼ`: `1 − p₀` for the positive and `−pⱼ` for the others.
pub fn softmax_nll<T: Real>(d: &[T]) -> (T, Vec<T>) {
    let dmin = d.iter().copied().fold(T::infinity(), T::min);
    let e: Vec<T> = d.iter().map(|&x| (dmin - x).exp()).collect();
    let s: T = e.iter().copied().sum();
    let loss = d[0] - dmin + s.ln();
    let mut w: Vec<T> = e.iter().map(|&x| -(x / s)).collect();
    w[0] += T::one();
    (loss.max(T::zero()), w)
}

fn check_args<T: Real>(points: &[BallPoint<T>], u: usize, v: usize, negs: &[usize]) -> Result<()> {
    if negs.is_empty() {
        return Err(Error::InvalidArgument("at least one negative is required".into()));
    }
    let n = points.len();
    if let Some(bad) = std::iter::once(&u).chain(std::iter::once(&v)).chain(negs).find(|&&i| i >= n) {
        return Err(Error::InvalidArgument(format!("noun index {bad} out of range for {n} embeddings")));
    }
    Ok(())
}

/// `−log( e^{−d(u,v)} / Σ_{v′ ∈ negs ∪ {v}} e^{−d(u,v′)} )`
pub fn loss_term<T: Real>(points: &[BallPoint<T>], u: usize, v: usize, negs: &[usize]) -> Result<T> {
    check_args(points, u, v, negs)?;
    let pu = points[u].coords();
    let d: Vec<T> =
        std::iter::once(v).chain(negs.iter().copied()).map(|w| poincare_distance(pu, points[w].coords())).collect();
    Ok(softmax_nll(&d).0)
}

/// Loss of one positive together with its Euclidean gradient, one entry per
/// distinct noun involved, sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad<T> {
    pub loss: T,
    pub grads: Vec<(usize, Array1<T>)>,
}

pub fn loss_grad<T: Real>(points: &[BallPoint<T>], u: usize, v: usize, negs: &[usize]) -> Result<LossGrad<T>> {
    check_args(points, u, v, negs)?;
    let pu = points[u].coords();
    let others: Vec<usize> = std::iter::once(v).chain(negs.iter().copied()).collect();
    let parts: Vec<_> = others.iter().map(|&w| distance_grad(pu, points[w].coords())).collect();
    let d: Vec<T> = parts.iter().map(|p| p.0).collect();
    let (loss, coef) = softmax_nll(&d);

    let mut gu = Array1::zeros(pu.len());
    let mut grads = Vec::with_capacity(others.len() + 1);
    for ((&w, (_, du, dw)), &c) in others.iter().zip(&parts).zip(&coef) {
        gu.scaled_add(c, du);
        grads.push((w, dw * c));
    }
    grads.push((u, gu));
    grads.sort_by_key(|(i, _)| *i);
    let mut merged: Vec<(usize, Array1<T>)> = Vec::with_capacity(grads.len());
    for (i, g) in grads {
        match merged.last_mut() {
            Some((j, acc)) if *j == i => *acc += &g,
            _ => merged.push((i, g)),
        }
    }
    Ok(LossGrad { loss, grads: merged })
}

/// Directional-derivative helper for tests: `⟨∇loss, dir⟩`.
#[cfg(test)]
pub(crate) fn grad_dot(g: &LossGrad<f64>, dir: &[(usize, Array1<f64>)]) -> f64 {
    g.grads
        .iter()
        .map(|(i, gi)| {
            dir.iter().filter(|(j, _)| j == i).map(|(_, d)| crate::linalg::dot(gi.view(), d.view())).sum::<f64>()
        })
        .sum()
}
