use std::collections::HashMap;
use std::io::BufRead;

use rand::Rng;

use crate::error::{Error, Result};

/// Interned nouns and a deduplicated set of ordered pairs `(u, v)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationSet {
    nouns: Vec<String>,
    index: HashMap<String, usize>,
    /// Pairs in insertion order.
    pairs: Vec<(usize, usize)>,
    /// Sorted true neighbors of each `u`.
    adjacency: Vec<Vec<usize>>,
}

impl RelationSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set over `nouns` from index pairs.
    pub fn from_pairs<S: Into<String>>(
        nouns: impl IntoIterator<Item = S>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut r = Self::new();
        for s in nouns {
            let s = s.into();
            if r.index.contains_key(&s) {
                return Err(Error::InvalidArgument(format!("duplicate noun {s:?}")));
            }
            r.intern(&s);
        }
        for (u, v) in pairs {
            r.insert(u, v)?;
        }
        Ok(r)
    }

    /// Index of `symbol`, adding it if new.
    pub fn intern(&mut self, symbol: &str) -> usize {
        if let Some(&i) = self.index.get(symbol) {
            return i;
        }
        let i = self.nouns.len();
        self.nouns.push(symbol.to_owned());
        self.index.insert(symbol.to_owned(), i);
        self.adjacency.push(Vec::new());
        i
    }

    /// Adds `(u, v)`; returns false if it was already present.
    pub fn insert(&mut self, u: usize, v: usize) -> Result<bool> {
        let n = self.nouns.len();
        if u >= n || v >= n {
            return Err(Error::InvalidArgument(format!("pair ({u}, {v}) out of range for {n} nouns")));
        }
        if u == v {
            return Err(Error::SelfLoop { line: 0, symbol: self.nouns[u].clone() });
        }
        match self.adjacency[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adjacency[u].insert(pos, v);
                self.pairs.push((u, v));
                Ok(true)
            }
        }
    }

    pub fn num_nouns(&self) -> usize {
        self.nouns.len()
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn nouns(&self) -> &[String] {
        &self.nouns
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u).is_some_and(|a| a.binary_search(&v).is_ok())
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    /// Number of valid negatives for `u`.
    pub fn num_non_neighbors(&self, u: usize) -> usize {
        self.nouns.len() - 1 - self.adjacency[u].len()
    }
}

/// Parses `child<TAB>parent` lines. Blank lines and lines starting with `#`
/// are skipped; duplicates collapse.
pub fn ingest_edges<R: BufRead>(source: R) -> Result<RelationSet> {
    let mut r = RelationSet::new();
    for (i, line) in source.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 2 non-empty tab-separated fields, found {}", fields.len()),
            });
        }
        if fields[0] == fields[1] {
            return Err(Error::SelfLoop { line: lineno, symbol: fields[0].to_owned() });
        }
        let u = r.intern(fields[0]);
        let v = r.intern(fields[1]);
        r.insert(u, v)?;
    }
    Ok(r)
}

/// Smallest superset closed under `(a,b),(b,c) ⇒ (a,c)`. Existing pairs keep
/// their order; new pairs follow, grouped by `u` in index order. Pairs
/// `(a, a)` implied by cycles are dropped.
pub fn transitive_closure(r: &RelationSet) -> RelationSet {
    let n = r.num_nouns();
    let mut out = r.clone();
    let mut seen = vec![usize::MAX; n];
    let mut stack = Vec::new();
    for u in 0..n {
        seen[u] = u;
        stack.extend_from_slice(r.neighbors(u));
        let mut reach = Vec::new();
        while let Some(w) = stack.pop() {
            if seen[w] == u {
                continue;
            }
            seen[w] = u;
            reach.push(w);
            stack.extend_from_slice(r.neighbors(w));
        }
        reach.sort_unstable();
        for w in reach {
            out.insert(u, w).expect("indices in range, no self pairs");
        }
    }
    out
}

/// Draws `k` nouns uniformly, with replacement, from the non-neighbors of
/// `u` other than `u` itself.
pub fn sample_negatives<R: Rng + ?Sized>(r: &RelationSet, u: usize, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    let n = r.num_nouns();
    if u >= n {
        return Err(Error::InvalidArgument(format!("noun index {u} out of range")));
    }
    let eligible = r.num_non_neighbors(u);
    if eligible == 0 {
        return Err(Error::NoNegatives(r.nouns()[u].clone()));
    }
    if 4 * eligible < n {
        // rejection would waste most draws
        let candidates: Vec<usize> = (0..n).filter(|&w| w != u && !r.contains(u, w)).collect();
        return Ok((0..k).map(|_| candidates[rng.random_range(0..candidates.len())]).collect());
    }
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let w = rng.random_range(0..n);
        if w != u && !r.contains(u, w) {
            out.push(w);
        }
    }
    Ok(out)
}
