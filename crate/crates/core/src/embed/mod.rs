//! Poincaré embeddings of a hierarchy.
//!
//! A transitive-closure relation set `𝒟 = {(u, v)}` (u is-a v) is embedded
//! into a product of `d`-dimensional balls by minimizing the negative
//! log-likelihood of each true pair against sampled non-neighbors of `u`:
//!
//! ```text
//! loss(u, v) = −log( e^{−d(u,v)} / Σ_{v′ ∈ negs ∪ {v}} e^{−d(u,v′)} )
//! ```
//!
//! Reconstruction quality is the mean rank of each true pair among the
//! non-neighbors of `u`, and the mean average precision over `u`.

mod eval;
mod io;
mod loss;
mod relations;
pub mod synth;
mod train;

pub use eval::{evaluate_reconstruction, evaluate_with, EvalReport};
pub use io::{read_embeddings, write_embeddings};
pub use loss::{distance_grad, loss_grad, loss_term, poincare_distance, softmax_nll, LossGrad};
pub use relations::{ingest_edges, sample_negatives, transitive_closure, RelationSet};
pub use train::{initial_table, train_embeddings, train_embeddings_with, EmbedConfig, EmbeddingTable, INIT_RANGE};
