//! Uniform random labeled trees and Wiener indexes.
//!
//! Trees are sampled through uniformly random Prüfer sequences, which hit
//! each of the n^{n−2} labeled trees exactly once. The Wiener index comes in
//! two conventions (unordered pairs, or both orders of every pair) and two
//! implementations: a linear-time edge-split sum and a quadratic all-pairs
//! BFS oracle that must agree exactly.

use crate::stats::{par_samples, McReport};
use rand::Rng;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("a tree on {n} nodes needs exactly n-1 edges (got {got})")]
    WrongEdgeCount { n: usize, got: usize },
    #[error("edge endpoint {0} out of range")]
    NodeOutOfRange(usize),
    #[error("edges do not form a connected acyclic graph")]
    NotATree,
    #[error("prüfer sequence length {got} does not match n = {n}")]
    BadPruferLength { n: usize, got: usize },
    #[error("brute-force Wiener index limited to n <= {limit} (got {n})")]
    BudgetExceeded { n: usize, limit: usize },
}

/// A tree on nodes 0..n, stored as a parent array rooted at 0 plus adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTree {
    n: usize,
    parent: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
}

impl LabeledTree {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        if n == 0 || edges.len() != n - 1 {
            return Err(TreeError::WrongEdgeCount {
                n,
                got: edges.len(),
            });
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(TreeError::NodeOutOfRange(u));
            }
            if v >= n {
                return Err(TreeError::NodeOutOfRange(v));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        // orient away from root 0; a BFS that reaches everything certifies
        // connectedness, and with n−1 edges that also rules out cycles
        let mut parent = vec![usize::MAX; n];
        parent[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        let mut seen = 1usize;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    seen += 1;
                    queue.push_back(v);
                }
            }
        }
        if seen != n {
            return Err(TreeError::NotATree);
        }
        Ok(LabeledTree {
            n,
            parent,
            adjacency,
        })
    }

    /// Decode a Prüfer sequence over nodes 0..n (empty sequence for n ≤ 2).
    pub fn from_prufer(n: usize, seq: &[usize]) -> Result<Self, TreeError> {
        if n >= 2 && seq.len() != n - 2 || n < 2 && !seq.is_empty() {
            return Err(TreeError::BadPruferLength { n, got: seq.len() });
        }
        if n == 1 {
            return LabeledTree::from_edges(1, &[]);
        }
        if let Some(&bad) = seq.iter().find(|&&x| x >= n) {
            return Err(TreeError::NodeOutOfRange(bad));
        }
        let mut degree = vec![1u32; n];
        for &x in seq {
            degree[x] += 1;
        }
        // pointer-scan decode: O(n) with the classic "leaf" walker
        let mut edges = Vec::with_capacity(n - 1);
        let mut ptr = 0usize;
        while degree[ptr] != 1 {
            ptr += 1;
        }
        let mut leaf = ptr;
        for &x in seq {
            edges.push((leaf, x));
            degree[x] -= 1;
            if degree[x] == 1 && x < ptr {
                leaf = x;
            } else {
                ptr += 1;
                while degree[ptr] != 1 {
                    ptr += 1;
                }
                leaf = ptr;
            }
        }
        edges.push((leaf, n - 1));
        LabeledTree::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parent(&self) -> &[usize] {
        &self.parent
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Path 0 − 1 − … − (n−1).
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        LabeledTree::from_edges(n, &edges).expect("path is a tree")
    }

    /// Star with center 0.
    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        LabeledTree::from_edges(n, &edges).expect("star is a tree")
    }
}

/// Uniform over the n^{n−2} labeled trees on n nodes.
pub fn sample_cayley_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LabeledTree {
    assert!(n >= 1);
    if n <= 2 {
        return LabeledTree::from_prufer(n, &[]).expect("trivial tree");
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    LabeledTree::from_prufer(n, &seq).expect("uniform sequence decodes")
}

/// Whether pair sums count each unordered pair once or in both orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    Ordered,
    Unordered,
}

impl Convention {
    /// How many times one unordered pair is counted.
    pub fn pair_multiplicity(self) -> u64 {
        match self {
            Convention::Ordered => 2,
            Convention::Unordered => 1,
        }
    }
}

/// Wiener index in O(n): every edge splits the tree into components of sizes
/// s and n−s and contributes s·(n−s) distance-one crossings per unordered
/// pair that uses it.
pub fn wiener_index(tree: &LabeledTree, convention: Convention) -> u64 {
    let n = tree.n();
    if n <= 1 {
        return 0;
    }
    // iterative post-order accumulation of subtree sizes
    let mut size = vec![1u64; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0usize];
    let mut visited = vec![false; n];
    visited[0] = true;
    while let Some(u) = stack.pop() {
        order.push(u);
        for &v in &tree.adjacency[u] {
            if !visited[v] {
                visited[v] = true;
                stack.push(v);
            }
        }
    }
    let mut acc = 0u64;
    for &u in order.iter().rev() {
        if u != 0 {
            size[tree.parent[u]] += size[u];
            acc += size[u] * (n as u64 - size[u]);
        }
    }
    acc * convention.pair_multiplicity()
}

const BRUTE_LIMIT: usize = 10_000;

/// All-pairs BFS oracle; exact but quadratic, capped at n = 10 000.
pub fn wiener_brute(tree: &LabeledTree, convention: Convention) -> Result<u64, TreeError> {
    let n = tree.n();
    if n > BRUTE_LIMIT {
        return Err(TreeError::BudgetExceeded {
            n,
            limit: BRUTE_LIMIT,
        });
    }
    let mut total = 0u64;
    let mut dist = vec![u32::MAX; n];
    for src in 0..n {
        dist.fill(u32::MAX);
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &tree.adjacency[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        total += dist.iter().map(|&d| u64::from(d)).sum::<u64>();
    }
    // the double loop over sources counts every pair twice
    Ok(total / 2 * convention.pair_multiplicity())
}

/// Normalized Wiener statistics of uniform labeled trees.
///
/// The normalization divides by pair multiplicity times n^{5/2}, so both
/// conventions estimate the same ξ−η limit; for Cayley trees the offspring
/// variance is 1 and no further constant appears.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WienerScalingReport {
    pub n: usize,
    pub report: McReport,
    #[serde(skip)]
    pub normalized: Vec<f64>,
}

pub fn wiener_scaling_report(
    n: usize,
    n_samples: usize,
    seed: u64,
    convention: Convention,
) -> WienerScalingReport {
    let denom = convention.pair_multiplicity() as f64 * (n as f64).powf(2.5);
    let normalized = par_samples(n_samples, seed, 0, |rng, _| {
        wiener_index(&sample_cayley_tree(n, rng), convention) as f64 / denom
    });
    WienerScalingReport {
        n,
        report: McReport::from_samples(&normalized, n, seed, 0.0),
        normalized,
    }
}
