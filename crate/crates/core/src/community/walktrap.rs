//! Walktrap: agglomerative clustering on random-walk distances.

use std::collections::{BTreeMap, BTreeSet};

use super::{best_cut, CommunityError, Dendrogram, Partition};
use crate::graph::{Graph, VertexId};

pub const DEFAULT_WALK_LENGTH: usize = 4;

struct Cluster {
    size: usize,
    // mean over members of P^t_i· / sqrt(s_k)
    profile: Vec<f64>,
    neighbors: BTreeSet<usize>,
}

/// Probability row `P^t_{v·}` for a walk of `steps` steps started at `v`,
/// with each coordinate scaled by `1/sqrt(s_k)`.
pub(crate) fn walk_profile(g: &Graph, strengths: &[f64], v: VertexId, steps: usize) -> Vec<f64> {
    let n = g.vertex_count();
    let mut current = vec![0.0; n];
    current[v] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..steps {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (j, &mass) in current.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (k, w) in g.neighbors(j) {
                next[k] += mass * w / strengths[j];
            }
        }
        std::mem::swap(&mut current, &mut next);
    }
    for (x, &s) in current.iter_mut().zip(strengths) {
        if s > 0.0 {
            *x /= s.sqrt();
        }
    }
    current
}

fn merge_cost(a: &Cluster, b: &Cluster, n: usize) -> f64 {
    let distance2: f64 = a
        .profile
        .iter()
        .zip(&b.profile)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let (sa, sb) = (a.size as f64, b.size as f64);
    sa * sb / (sa + sb) * distance2 / n as f64
}

/// Agglomerates adjacent communities, each time merging the pair with the
/// smallest increase in mean squared walk distance (Ward criterion), for
/// walks of length `steps`. Returns the full merge trace and its
/// maximum-modularity cut. Isolated vertices stay singletons.
pub fn walktrap(g: &Graph, steps: usize) -> Result<(Dendrogram, Partition), CommunityError> {
    if steps == 0 {
        return Err(CommunityError::InvalidParameter("walk length must be at least 1".into()));
    }
    let n = g.vertex_count();
    let strengths = g.strengths();
    let mut clusters: Vec<Option<Cluster>> = (0..n)
        .map(|v| {
            Some(Cluster {
                size: 1,
                profile: if strengths[v] > 0.0 {
                    walk_profile(g, &strengths, v, steps)
                } else {
                    Vec::new()
                },
                neighbors: g.incident(v).iter().map(|&(u, _)| u).collect(),
            })
        })
        .collect();

    let mut costs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in g.edges() {
        let (a, b) = (e.source, e.target);
        let cost = merge_cost(
            clusters[a].as_ref().unwrap(),
            clusters[b].as_ref().unwrap(),
            n,
        );
        costs.insert((a, b), cost);
    }

    let mut dendrogram = Dendrogram::new(n);
    while let Some((&(a, b), &cost)) = cheapest(&costs) {
        let ca = clusters[a].take().expect("live cluster");
        let cb = clusters[b].take().expect("live cluster");
        let id = dendrogram.push(a, b, cost);
        let size = ca.size + cb.size;
        let profile = ca
            .profile
            .iter()
            .zip(&cb.profile)
            .map(|(x, y)| (ca.size as f64 * x + cb.size as f64 * y) / size as f64)
            .collect();
        let mut neighbors: BTreeSet<usize> = ca.neighbors.union(&cb.neighbors).copied().collect();
        neighbors.remove(&a);
        neighbors.remove(&b);
        for old in [a, b] {
            let stale: Vec<_> = costs
                .keys()
                .filter(|&&(x, y)| x == old || y == old)
                .copied()
                .collect();
            for key in stale {
                costs.remove(&key);
            }
        }
        let merged = Cluster {
            size,
            profile,
            neighbors,
        };
        for &other in &merged.neighbors {
            let c = clusters[other].as_mut().expect("neighbor is live");
            c.neighbors.remove(&a);
            c.neighbors.remove(&b);
            c.neighbors.insert(id);
            let cost = merge_cost(&merged, clusters[other].as_ref().unwrap(), n);
            costs.insert((other, id), cost);
        }
        clusters.push(Some(merged));
        debug_assert_eq!(clusters.len(), id + 1);
    }
    let partition = best_cut(g, &dendrogram);
    Ok((dendrogram, partition))
}

/// Lowest cost; near-equal costs resolve to the smallest pair of ids.
fn cheapest(costs: &BTreeMap<(usize, usize), f64>) -> Option<(&(usize, usize), &f64)> {
    let mut best: Option<(&(usize, usize), &f64)> = None;
    for entry in costs {
        match best {
            None => best = Some(entry),
            Some((_, &c)) => {
                let slack = 1e-12 * c.abs().max(*entry.1);
                // BTreeMap iterates in key order, so only a strictly lower
                // cost displaces the current choice.
                if *entry.1 < c - slack {
                    best = Some(entry);
                }
            }
        }
    }
    best
}
