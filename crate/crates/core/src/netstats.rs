//! Whole-network descriptive statistics.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::{Graph, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("statistic needs at least {needed} vertices, graph has {actual}")]
    TooFewVertices { needed: usize, actual: usize },
    #[error("degree exponent needs at least two distinct nonzero degrees")]
    NoFit,
    #[error("power iteration did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("unknown degree exponent method {0:?} (expected loglog-ls or discrete-mle)")]
    UnknownMethod(String),
}

/// Fraction of ordered vertex pairs that are mutually reachable.
pub fn connectedness(g: &Graph) -> Result<f64, StatsError> {
    connectedness_from_sizes(&g.connected_components().sizes())
}

/// Connectedness from component sizes alone: `Σ n_c(n_c-1) / n(n-1)`.
pub fn connectedness_from_sizes(sizes: &[usize]) -> Result<f64, StatsError> {
    let n: usize = sizes.iter().sum();
    if n < 2 {
        return Err(StatsError::TooFewVertices {
            needed: 2,
            actual: n,
        });
    }
    let reachable: usize = sizes.iter().map(|&c| c * c.saturating_sub(1)).sum();
    Ok(reachable as f64 / (n * (n - 1)) as f64)
}

/// Counts each triangle once.
pub fn triangle_count(g: &Graph) -> usize {
    let mut count = 0;
    for e in g.edges() {
        let (a, b) = (g.incident(e.source), g.incident(e.target));
        // Third vertex above both endpoints so every triangle is seen once.
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if a[i].0 > e.target {
                        count += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    count
}

/// Global transitivity `3·triangles / connected triples` on the unweighted
/// graph; 0 when there are no triples.
pub fn global_clustering(g: &Graph) -> f64 {
    let triples: usize = (0..g.vertex_count())
        .map(|v| {
            let k = g.degree(v);
            k * k.saturating_sub(1) / 2
        })
        .sum();
    if triples == 0 {
        return 0.0;
    }
    3.0 * triangle_count(g) as f64 / triples as f64
}

/// All maximal cliques with at least `min_size` vertices, found by
/// Bron–Kerbosch with pivoting. Each clique is sorted; the list is ordered
/// by size descending, then lexicographically.
pub fn maximal_cliques(g: &Graph, min_size: usize) -> Vec<Vec<VertexId>> {
    let neighbors: Vec<Vec<VertexId>> = (0..g.vertex_count())
        .map(|v| g.incident(v).iter().map(|&(u, _)| u).collect())
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    let candidates: Vec<VertexId> = (0..g.vertex_count()).collect();
    bron_kerbosch(&neighbors, &mut current, candidates, Vec::new(), min_size, &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

fn intersect(set: &[VertexId], sorted_neighbors: &[VertexId]) -> Vec<VertexId> {
    set.iter()
        .copied()
        .filter(|v| sorted_neighbors.binary_search(v).is_ok())
        .collect()
}

fn bron_kerbosch(
    neighbors: &[Vec<VertexId>],
    current: &mut Vec<VertexId>,
    mut candidates: Vec<VertexId>,
    mut excluded: Vec<VertexId>,
    min_size: usize,
    out: &mut Vec<Vec<VertexId>>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() && current.len() >= min_size {
            out.push(current.clone());
        }
        return;
    }
    // Can't reach min_size on this branch.
    if current.len() + candidates.len() < min_size {
        return;
    }
    let pivot = candidates
        .iter()
        .chain(excluded.iter())
        .copied()
        .max_by_key(|&u| {
            (
                intersect(&candidates, &neighbors[u]).len(),
                std::cmp::Reverse(u),
            )
        })
        .expect("candidates is non-empty");
    let branch: Vec<VertexId> = candidates
        .iter()
        .copied()
        .filter(|v| neighbors[pivot].binary_search(v).is_err())
        .collect();
    for v in branch {
        current.push(v);
        bron_kerbosch(
            neighbors,
            current,
            intersect(&candidates, &neighbors[v]),
            intersect(&excluded, &neighbors[v]),
            min_size,
            out,
        );
        current.pop();
        candidates.retain(|&x| x != v);
        excluded.push(v);
        excluded.sort_unstable();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeExponentMethod {
    /// Negated slope of a least-squares line through `(ln k, ln count(k))`.
    #[default]
    LoglogLs,
    /// Discrete power-law maximum likelihood with `k_min = 1`.
    DiscreteMle,
}

impl fmt::Display for DegreeExponentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegreeExponentMethod::LoglogLs => "loglog-ls",
            DegreeExponentMethod::DiscreteMle => "discrete-mle",
        })
    }
}

impl FromStr for DegreeExponentMethod {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "loglog-ls" => Ok(DegreeExponentMethod::LoglogLs),
            "discrete-mle" => Ok(DegreeExponentMethod::DiscreteMle),
            other => Err(StatsError::UnknownMethod(other.to_string())),
        }
    }
}

/// Power-law exponent of the degree distribution. Isolated vertices are
/// ignored.
pub fn degree_exponent(g: &Graph, method: DegreeExponentMethod) -> Result<f64, StatsError> {
    let degrees: Vec<usize> = (0..g.vertex_count())
        .map(|v| g.degree(v))
        .filter(|&k| k > 0)
        .collect();
    degree_exponent_of(&degrees, method)
}

/// As [`degree_exponent`], over an explicit degree sample.
pub fn degree_exponent_of(degrees: &[usize], method: DegreeExponentMethod) -> Result<f64, StatsError> {
    let mut histogram = std::collections::BTreeMap::new();
    for &k in degrees.iter().filter(|&&k| k > 0) {
        *histogram.entry(k).or_insert(0usize) += 1;
    }
    if histogram.len() < 2 {
        return Err(StatsError::NoFit);
    }
    match method {
        DegreeExponentMethod::LoglogLs => {
            let points: Vec<(f64, f64)> = histogram
                .iter()
                .map(|(&k, &c)| ((k as f64).ln(), (c as f64).ln()))
                .collect();
            Ok(-least_squares_slope(&points))
        }
        DegreeExponentMethod::DiscreteMle => {
            let n: usize = histogram.values().sum();
            let sum_ln: f64 = histogram
                .iter()
                .map(|(&k, &c)| c as f64 * (k as f64).ln())
                .sum();
            let log_likelihood = |alpha: f64| -(n as f64) * riemann_zeta(alpha).ln() - alpha * sum_ln;
            Ok(golden_section_max(log_likelihood, 1.0 + 1e-9, 50.0, 1e-12))
        }
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    sxy / sxx
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    (lo + hi) / 2.0
}

/// Riemann zeta for `s > 1` by Euler–Maclaurin summation.
pub(crate) fn riemann_zeta(s: f64) -> f64 {
    const N: usize = 12;
    // B_2j / (2j)!
    const COEFFS: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Rising factorial s(s+1)...(s+2j-2) times N^{-s-2j+1}.
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (j, c) in COEFFS.iter().enumerate() {
        sum += c * rising * power;
        let m = (2 * j) as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power /= n * n;
    }
    sum
}

/// Weighted eigenvector centrality by power iteration, computed per
/// connected component and scaled so each component's maximum is 1.
/// Edgeless components score 0.
pub fn eigenvector_centrality(g: &Graph, tol: f64, max_iter: usize) -> Result<Vec<f64>, StatsError> {
    let mut scores = vec![0.0; g.vertex_count()];
    for component in g.connected_components().components {
        if component.len() < 2 {
            continue;
        }
        let local = g.induced_subgraph(&component);
        let x = component_centrality(&local, tol, max_iter)?;
        for (v, s) in component.iter().zip(x) {
            scores[*v] = s;
        }
    }
    Ok(scores)
}

fn component_centrality(g: &Graph, tol: f64, max_iter: usize) -> Result<Vec<f64>, StatsError> {
    let n = g.vertex_count();
    // Positive shift so the Perron root dominates even on bipartite components.
    let shift = g.edges().iter().map(|e| e.weight).fold(0.0, f64::max);
    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        for (v, slot) in next.iter_mut().enumerate() {
            *slot = shift * x[v] + g.neighbors(v).map(|(u, w)| w * x[u]).sum::<f64>();
        }
        let max = next.iter().copied().fold(0.0, f64::max);
        for value in &mut next {
            *value /= max;
        }
        residual = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if residual < tol {
            return Ok(x);
        }
    }
    Err(StatsError::NoConvergence { residual })
}

pub const DEFAULT_CENTRALITY_TOL: f64 = 1e-10;
pub const DEFAULT_CENTRALITY_MAX_ITER: usize = 10_000;

/// Summary of a network. Undefined statistics serialize as `null`; reals
/// are written at six significant digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetStatsReport {
    pub vertices: usize,
    pub edges: usize,
    pub components: Vec<usize>,
    #[serde(serialize_with = "six_digits")]
    pub connectedness: Option<f64>,
    #[serde(serialize_with = "six_digits")]
    pub clustering: Option<f64>,
    #[serde(serialize_with = "six_digits")]
    pub gamma: Option<f64>,
    pub gamma_method: DegreeExponentMethod,
    pub cliques: usize,
    pub clique_min_size: usize,
}

impl NetStatsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub(crate) fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn six_digits<S: Serializer>(value: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(x) => serializer.serialize_f64(round_significant(*x, 6)),
        None => serializer.serialize_none(),
    }
}

pub fn summary(g: &Graph) -> NetStatsReport {
    summary_with(g, DegreeExponentMethod::default(), 3)
}

pub fn summary_with(g: &Graph, method: DegreeExponentMethod, clique_min_size: usize) -> NetStatsReport {
    NetStatsReport {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        components: g.connected_components().sizes(),
        connectedness: connectedness(g).ok(),
        clustering: (!g.is_empty()).then(|| global_clustering(g)),
        gamma: degree_exponent(g, method).ok(),
        gamma_method: method,
        cliques: maximal_cliques(g, clique_min_size.max(2)).len(),
        clique_min_size,
    }
}
