use rayon::prelude::*;

use super::loss::poincare_distance;
use super::relations::RelationSet;
use super::train::EmbeddingTable;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reconstruction quality of an embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<T> {
    /// Mean over pairs of `1 + #{non-neighbors strictly closer to u than v}`.
    pub mean_rank: T,
    /// Mean over nouns with at least one neighbor of their average precision.
    pub map: T,
    /// Rank of each pair, aligned with [`RelationSet::pairs`].
    pub ranks: Vec<usize>,
}

pub fn evaluate_reconstruction<T: Real>(table: &EmbeddingTable<T>, r: &RelationSet) -> Result<EvalReport<T>> {
    let points = table.aligned_to(r)?;
    evaluate_with(r, |u, w| poincare_distance(points[u].coords(), points[w].coords()))
}

struct PerNoun {
    ap_sum: f64,
    /// Ranks in adjacency order.
    ranks: Vec<usize>,
}

/// Evaluation against an arbitrary dissimilarity.
///
/// For `v` a neighbor of `u` at distance `d_v`, precision at `v` is
/// `#{neighbors with d ≤ d_v} / (that + #{non-neighbors with d < d_v})`, so
/// ties are resolved in favor of the true neighbors.
pub fn evaluate_with<T: Real>(r: &RelationSet, dist: impl Fn(usize, usize) -> T + Sync) -> Result<EvalReport<T>> {
    if r.num_pairs() == 0 {
        return Err(Error::InvalidArgument("relation set has no pairs to evaluate".into()));
    }
    let n = r.num_nouns();
    let per_noun: Vec<Option<PerNoun>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let nbrs = r.neighbors(u);
            if nbrs.is_empty() {
                return None;
            }
            let mut pos = Vec::with_capacity(nbrs.len());
            let mut neg = Vec::with_capacity(n - 1 - nbrs.len());
            let mut d_nbr = Vec::with_capacity(nbrs.len());
            let mut it = nbrs.iter().peekable();
            for w in (0..n).filter(|&w| w != u) {
                let d = dist(u, w);
                if it.peek() == Some(&&w) {
                    it.next();
                    pos.push(d);
                    d_nbr.push(d);
                } else {
                    neg.push(d);
                }
            }
            pos.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            neg.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            let mut ap_sum = 0.0;
            let ranks = d_nbr
                .iter()
                .map(|&dv| {
                    let closer_neg = neg.partition_point(|&x| x < dv);
                    let pos_within = pos.partition_point(|&x| x <= dv);
                    ap_sum += pos_within as f64 / (pos_within + closer_neg) as f64;
                    1 + closer_neg
                })
                .collect();
            Some(PerNoun { ap_sum, ranks })
        })
        .collect();

    let mut map_sum = 0.0;
    let mut map_count = 0usize;
    for (u, p) in per_noun.iter().enumerate() {
        if let Some(p) = p {
            map_sum += p.ap_sum / r.neighbors(u).len() as f64;
            map_count += 1;
        }
    }
    let ranks: Vec<usize> = r
        .pairs()
        .iter()
        .map(|&(u, v)| {
            let pos = r.neighbors(u).binary_search(&v).expect("pair is in the adjacency");
            per_noun[u].as_ref().expect("u has neighbors").ranks[pos]
        })
        .collect();
    let rank_sum: f64 = ranks.iter().map(|&k| k as f64).sum();
    Ok(EvalReport { mean_rank: T::lit(rank_sum / ranks.len() as f64), map: T::lit(map_sum / map_count as f64), ranks })
}
