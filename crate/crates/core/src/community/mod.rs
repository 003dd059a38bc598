//! Structural community detection.
//!
//! Every algorithm returns a [`Partition`]: a total map from vertex to a
//! dense, nominal community id. Ids carry no ordering or similarity
//! meaning; they are assigned in order of first appearance by vertex id.

mod betweenness;
mod eigenvector;
mod spinglass;
mod walktrap;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexId};

pub use betweenness::{edge_betweenness_scores, girvan_newman};
pub use eigenvector::{leading_eigenvector, LeadingEigenvectorOptions, DENSE_LIMIT};
pub use spinglass::{hamiltonian, spinglass, SpinglassOptions};
pub use walktrap::{walktrap, DEFAULT_WALK_LENGTH};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommunityError {
    #[error("modularity is undefined for a graph without edges")]
    NoEdges,
    #[error("partition covers {actual} vertices but the graph has {expected}")]
    PartitionSize { expected: usize, actual: usize },
    #[error("spinglass requires a connected network; got {components} components (pass the largest component instead)")]
    Disconnected { components: usize },
    #[error("eigenvector iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown algorithm {0:?} (expected lev, walktrap, eb or spinglass)")]
    UnknownAlgorithm(String),
}

/// Community membership for every vertex, with ids densely numbered
/// `0..count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    membership: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Renumbers arbitrary labels densely in order of first appearance.
    pub fn from_labels<T: Eq + std::hash::Hash + Clone>(labels: &[T]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let membership = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Partition {
            membership,
            count: ids.len(),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            membership: (0..n).collect(),
            count: n,
        }
    }

    pub fn single(n: usize) -> Self {
        Partition {
            membership: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    pub fn from_groups(n: usize, groups: &[Vec<VertexId>]) -> Self {
        let mut labels = vec![usize::MAX; n];
        for (c, members) in groups.iter().enumerate() {
            for &v in members {
                labels[v] = c;
            }
        }
        debug_assert!(labels.iter().all(|&l| l != usize::MAX));
        Partition::from_labels(&labels)
    }

    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    pub fn community_of(&self, v: VertexId) -> usize {
        self.membership[v]
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    /// Vertex lists per community id.
    pub fn groups(&self) -> Vec<Vec<VertexId>> {
        let mut groups = vec![Vec::new(); self.count];
        for (v, &c) in self.membership.iter().enumerate() {
            groups[c].push(v);
        }
        groups
    }

    /// Unordered-equality with another partition (same blocks, any ids).
    pub fn same_blocks(&self, other: &Partition) -> bool {
        Partition::from_labels(&self.membership) == Partition::from_labels(&other.membership)
    }
}

/// Community sizes, largest first.
pub fn community_sizes(p: &Partition) -> Vec<usize> {
    let mut sizes = vec![0usize; p.community_count()];
    for &c in p.membership() {
        sizes[c] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Weighted Newman modularity
/// `Q = (1/2W) Σ_ij (w_ij - s_i s_j / 2W) δ(c_i, c_j)`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64, CommunityError> {
    if p.len() != g.vertex_count() {
        return Err(CommunityError::PartitionSize {
            expected: g.vertex_count(),
            actual: p.len(),
        });
    }
    let two_w = 2.0 * g.total_weight();
    if two_w <= 0.0 {
        return Err(CommunityError::NoEdges);
    }
    Ok(modularity_of_labels(g, p.membership(), p.community_count(), two_w))
}

pub(crate) fn modularity_of_labels(g: &Graph, labels: &[usize], count: usize, two_w: f64) -> f64 {
    let mut internal = vec![0.0; count];
    let mut strength = vec![0.0; count];
    for e in g.edges() {
        if labels[e.source] == labels[e.target] {
            internal[labels[e.source]] += e.weight;
        }
        strength[labels[e.source]] += e.weight;
        strength[labels[e.target]] += e.weight;
    }
    // One division at the end: integer weights give a correctly rounded Q.
    let numerator: f64 = internal
        .iter()
        .zip(&strength)
        .map(|(&inside, &s)| 2.0 * inside * two_w - s * s)
        .sum();
    numerator / (two_w * two_w)
}

/// One agglomeration step. Leaves are vertices `0..n`; the community made
/// by the k-th merge has id `n + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub score: f64,
}

/// Merge hierarchy over singleton leaves. Divisive algorithms record their
/// splits in reverse so the same cut semantics apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    pub leaves: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn new(leaves: usize) -> Self {
        Dendrogram {
            leaves,
            merges: Vec::new(),
        }
    }

    /// Records a merge of two live communities and returns the new id.
    pub(crate) fn push(&mut self, a: usize, b: usize, score: f64) -> usize {
        self.merges.push(Merge { a, b, score });
        self.leaves + self.merges.len() - 1
    }

    /// The partition after applying the first `steps` merges.
    pub fn cut(&self, steps: usize) -> Partition {
        let steps = steps.min(self.merges.len());
        let total = self.leaves + steps;
        let mut parent: Vec<usize> = (0..total).collect();
        for (k, m) in self.merges[..steps].iter().enumerate() {
            parent[m.a] = self.leaves + k;
            parent[m.b] = self.leaves + k;
        }
        let root = |mut x: usize| {
            while parent[x] != x {
                x = parent[x];
            }
            x
        };
        let labels: Vec<usize> = (0..self.leaves).map(root).collect();
        Partition::from_labels(&labels)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("dendrogram serializes");
        s.push('\n');
        s
    }
}

/// The prefix cut with the highest modularity; ties keep the earliest.
/// Graphs without edges get the all-singletons partition.
pub(crate) fn best_cut(g: &Graph, dendrogram: &Dendrogram) -> Partition {
    let two_w = 2.0 * g.total_weight();
    if two_w <= 0.0 {
        return Partition::singletons(g.vertex_count());
    }
    let mut best = dendrogram.cut(0);
    let mut best_q = modularity_of_labels(g, best.membership(), best.community_count(), two_w);
    for steps in 1..=dendrogram.merges.len() {
        let p = dendrogram.cut(steps);
        let q = modularity_of_labels(g, p.membership(), p.community_count(), two_w);
        if q > best_q + 1e-12 {
            best = p;
            best_q = q;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Lev,
    Walktrap,
    Eb,
    Spinglass,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Lev,
        Algorithm::Walktrap,
        Algorithm::Eb,
        Algorithm::Spinglass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lev => "lev",
            Algorithm::Walktrap => "walktrap",
            Algorithm::Eb => "eb",
            Algorithm::Spinglass => "spinglass",
        }
    }

    /// Column heading used in report grids.
    pub fn abbreviation(self) -> &'static str {
        match self {
            Algorithm::Lev => "LEV",
            Algorithm::Walktrap => "WT",
            Algorithm::Eb => "EB",
            Algorithm::Spinglass => "SG",
        }
    }

    pub fn is_stochastic(self) -> bool {
        self == Algorithm::Spinglass
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = CommunityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "lev" | "leading-eigenvector" => Ok(Algorithm::Lev),
            "walktrap" | "wt" => Ok(Algorithm::Walktrap),
            "eb" | "edge-betweenness" | "girvan-newman" => Ok(Algorithm::Eb),
            "spinglass" | "sg" => Ok(Algorithm::Spinglass),
            _ => Err(CommunityError::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Parameters for all four algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionParams {
    pub leading_eigenvector: LeadingEigenvectorOptions,
    pub walk_length: usize,
    pub spinglass: SpinglassOptions,
}

impl Default for DetectionParams {
    fn default() -> Self {
        DetectionParams {
            leading_eigenvector: LeadingEigenvectorOptions::default(),
            walk_length: DEFAULT_WALK_LENGTH,
            spinglass: SpinglassOptions::default(),
        }
    }
}

/// Runs one algorithm. `seed` is only consulted by spinglass.
pub fn detect(
    g: &Graph,
    algorithm: Algorithm,
    params: &DetectionParams,
    seed: u64,
) -> Result<Partition, CommunityError> {
    match algorithm {
        Algorithm::Lev => leading_eigenvector(g, &params.leading_eigenvector),
        Algorithm::Walktrap => Ok(walktrap(g, params.walk_length)?.1),
        Algorithm::Eb => Ok(girvan_newman(g).1),
        Algorithm::Spinglass => spinglass(g, &params.spinglass, seed),
    }
}
