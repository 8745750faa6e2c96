//! Riemannian adaptive optimization on product manifolds.
//!
//! The crate provides RSGD, RAdaGrad, RAdam and a modified RAMSGrad on
//! products of Poincaré balls, Euclidean spaces or Stiefel manifolds,
//! together with two experiment pipelines (hyperbolic embeddings of
//! hierarchies and PCA on `St(k, d)`) and evaluators for the associated
//! convergence bounds.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which is what the experiments use.

// `!(x <= y)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod embed;
pub mod error;
pub mod linalg;
pub mod optim;
pub mod pca;
pub mod poincare;
pub mod scalar;
pub mod stiefel;
pub mod toy;
pub mod trace;

pub use error::{Error, Result};
pub use optim::{
    Euclidean, Manifold, Optimizer, OptimizerKind, OptimizerState, PoincareBall, ProductTangent, Schedule, Stiefel,
};
pub use scalar::Real;
pub use trace::RunTrace;

pub type BallPoint = poincare::BallPoint<f64>;
pub type StiefelPoint = stiefel::StiefelPoint<f64>;
pub type Schedule64 = optim::Schedule<f64>;
pub type Optimizer64 = optim::Optimizer<f64>;
pub type RunTrace64 = trace::RunTrace<f64>;
pub type BoundParams = bounds::BoundParams<f64>;
pub type EmbeddingTable = embed::EmbeddingTable<f64>;
pub type PcaProblem = pca::PcaProblem<f64>;
pub type PcaSolution = pca::PcaSolution<f64>;

pub type BallPoint32 = poincare::BallPoint<f32>;
pub type Schedule32 = optim::Schedule<f32>;
