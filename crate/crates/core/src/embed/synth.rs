//! Synthetic hierarchies for tests and desk-scale experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::relations::{transitive_closure, RelationSet};

/// Nouns and pairs of the mammals-subtree closure this generator mimics.
pub const MAMMALS_NOUNS: usize = 1180;
pub const MAMMALS_PAIRS: usize = 6450;

/// Complete `branching`-ary tree with `depth` levels below the root, as
/// child → parent edges (not closed). Nodes are named `n0` (root), `n1`, …
/// in breadth-first order.
pub fn balanced_tree(branching: usize, depth: u32) -> RelationSet {
    let n: usize = (0..=depth).map(|l| branching.pow(l)).sum();
    let nouns = (0..n).map(|i| format!("n{i}"));
    let edges = (1..n).map(|c| (c, (c - 1) / branching));
    RelationSet::from_pairs(nouns, edges).expect("valid tree")
}

fn depths(parent: &[usize]) -> Vec<usize> {
    let mut d = vec![0; parent.len()];
    for i in 1..parent.len() {
        d[i] = d[parent[i]] + 1;
    }
    d
}

/// Random rooted tree on `nodes` nodes whose transitive closure has exactly
/// `pairs` pairs (`Σ depth`). Requires `nodes − 1 ≤ pairs ≤ nodes(nodes−1)/2`.
pub fn tree_with_closure_size(nodes: usize, pairs: usize, seed: u64) -> RelationSet {
    assert!(nodes >= 1 && pairs + 1 >= nodes && pairs <= nodes * (nodes - 1) / 2, "infeasible closure size");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // random recursive tree; parents always precede children
    let mut parent: Vec<usize> = (0..nodes).map(|i| if i == 0 { 0 } else { rng.random_range(0..i) }).collect();
    let mut has_child = vec![false; nodes];
    for &p in &parent[1..] {
        has_child[p] = true;
    }
    let mut depth = depths(&parent);
    let mut total: usize = depth.iter().sum();

    // Re-hang one leaf at a time one level deeper or shallower. Moving a leaf
    // changes only its own depth, so each move shifts the total by exactly 1.
    while total != pairs {
        let deeper = total < pairs;
        let leaf = rng.random_range(1..nodes);
        if has_child[leaf] {
            continue;
        }
        let want = if deeper {
            depth[leaf]
        } else if depth[leaf] >= 2 {
            depth[leaf] - 2
        } else {
            continue;
        };
        let candidates: Vec<usize> = (0..nodes).filter(|&w| w != leaf && depth[w] == want).collect();
        if candidates.is_empty() {
            continue;
        }
        let new_parent = candidates[rng.random_range(0..candidates.len())];
        let old_parent = parent[leaf];
        parent[leaf] = new_parent;
        has_child[new_parent] = true;
        has_child[old_parent] = parent[1..].contains(&old_parent);
        depth[leaf] = want + 1;
        if deeper {
            total += 1;
        } else {
            total -= 1;
        }
    }

    // Renumber so parents precede children, for readable names.
    let mut order: Vec<usize> = (0..nodes).collect();
    order.sort_by_key(|&i| (depth[i], i));
    let mut rank = vec![0; nodes];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let nouns = (0..nodes).map(|r| format!("noun{r:04}"));
    let edges = (1..nodes).map(|i| (rank[i], rank[parent[i]]));
    RelationSet::from_pairs(nouns, edges).expect("valid tree")
}

/// Closure of a synthetic tree with the size of the WordNet mammals closure
/// (1,180 nouns, 6,450 pairs).
pub fn mammals_scale(seed: u64) -> RelationSet {
    transitive_closure(&tree_with_closure_size(MAMMALS_NOUNS, MAMMALS_PAIRS, seed))
}

/// Random relation set on `nouns` nouns: a random forest closed
/// transitively, plus a few extra shortcut pairs.
pub fn random_relations(nouns: usize, seed: u64) -> RelationSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = RelationSet::from_pairs((0..nouns).map(|i| format!("r{i}")), []).expect("unique names");
    for c in 1..nouns {
        if rng.random_bool(0.8) {
            r.insert(c, rng.random_range(0..c)).expect("valid pair");
        }
    }
    let mut r = transitive_closure(&r);
    for _ in 0..nouns / 5 {
        let u = rng.random_range(0..nouns);
        let v = rng.random_range(0..nouns);
        if u != v {
            r.insert(u, v).expect("valid pair");
        }
    }
    r
}
