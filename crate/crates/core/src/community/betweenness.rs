//! Edge betweenness and Girvan–Newman divisive clustering.

use std::collections::VecDeque;

use rayon::prelude::*;

use super::{modularity_of_labels, Dendrogram, Partition};
use crate::graph::{Graph, VertexId};

// Fixed chunking keeps floating-point summation order independent of the
// thread count.
const SOURCE_CHUNK: usize = 16;

/// Brandes accumulation from one source over unweighted shortest paths,
/// restricted to edges flagged alive. Adds ordered-pair credit to `scores`.
fn accumulate_from(g: &Graph, alive: &[bool], source: VertexId, scores: &mut [f64], work: &mut Workspace) {
    let Workspace {
        dist,
        sigma,
        delta,
        order,
        queue,
    } = work;
    for &v in order.iter() {
        dist[v] = usize::MAX;
        sigma[v] = 0.0;
        delta[v] = 0.0;
    }
    order.clear();
    dist[source] = 0;
    sigma[source] = 1.0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(u, e) in g.incident(v) {
            if !alive[e] {
                continue;
            }
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
            if dist[u] == dist[v] + 1 {
                sigma[u] += sigma[v];
            }
        }
    }
    for &w in order.iter().rev() {
        for &(v, e) in g.incident(w) {
            if alive[e] && dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                let credit = sigma[v] / sigma[w] * (1.0 + delta[w]);
                scores[e] += credit;
                delta[v] += credit;
            }
        }
    }
}

struct Workspace {
    dist: Vec<usize>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<VertexId>,
    queue: VecDeque<VertexId>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            dist: vec![usize::MAX; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            // every vertex starts "touched" so the first reset clears it
            order: (0..n).collect(),
            queue: VecDeque::new(),
        }
    }
}

/// Unordered-pair betweenness of alive edges, summed over `sources`.
fn betweenness_from(g: &Graph, alive: &[bool], sources: &[VertexId]) -> Vec<f64> {
    let m = g.edge_count();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut scores = vec![0.0; m];
            let mut work = Workspace::new(g.vertex_count());
            for &s in chunk {
                accumulate_from(g, alive, s, &mut scores, &mut work);
            }
            scores
        })
        .collect();
    let mut total = vec![0.0; m];
    for partial in partials {
        for (t, p) in total.iter_mut().zip(partial) {
            *t += p;
        }
    }
    // Each unordered pair was credited from both ends.
    total.iter_mut().for_each(|x| *x /= 2.0);
    total
}

/// Edge betweenness over unweighted shortest paths, one value per entry of
/// [`Graph::edges`]. Each unordered vertex pair contributes a total of one
/// unit, split equally among its shortest paths.
pub fn edge_betweenness_scores(g: &Graph) -> Vec<f64> {
    let alive = vec![true; g.edge_count()];
    let sources: Vec<VertexId> = (0..g.vertex_count()).collect();
    betweenness_from(g, &alive, &sources)
}

fn reachable(g: &Graph, alive: &[bool], start: VertexId) -> Vec<VertexId> {
    let mut seen = vec![false; g.vertex_count()];
    let mut out = vec![start];
    seen[start] = true;
    let mut i = 0;
    while i < out.len() {
        let v = out[i];
        i += 1;
        for &(u, e) in g.incident(v) {
            if alive[e] && !seen[u] {
                seen[u] = true;
                out.push(u);
            }
        }
    }
    out.sort_unstable();
    out
}

struct Split {
    left: Vec<VertexId>,
    right: Vec<VertexId>,
    score: f64,
}

/// Girvan–Newman: repeatedly removes the edge of highest betweenness
/// (recomputed after every removal; near-ties go to the lowest edge
/// endpoints) until no edges remain. Each split of a component becomes a
/// dendrogram node, scored by the betweenness of the edge whose removal
/// caused it. The returned partition is the split state with the highest
/// weighted modularity on the original graph.
pub fn girvan_newman(g: &Graph) -> (Dendrogram, Partition) {
    let n = g.vertex_count();
    let m = g.edge_count();
    let two_w = 2.0 * g.total_weight();
    let mut alive = vec![true; m];
    let mut scores = edge_betweenness_scores(g);

    let components = g.connected_components();
    let mut labels = components.membership(n);
    let mut label_count = components.len();
    let mut best_labels = labels.clone();
    let mut best_q = if two_w > 0.0 {
        modularity_of_labels(g, &labels, label_count, two_w)
    } else {
        f64::NEG_INFINITY
    };
    let mut splits = Vec::new();

    for _ in 0..m {
        let chosen = highest_alive(&scores, &alive);
        let removed_score = scores[chosen];
        alive[chosen] = false;
        let edge = g.edges()[chosen];
        let side = reachable(g, &alive, edge.source);
        let component = if side.binary_search(&edge.target).is_ok() {
            side
        } else {
            let other = reachable(g, &alive, edge.target);
            for &v in &other {
                labels[v] = label_count;
            }
            label_count += 1;
            let q = modularity_of_labels(g, &labels, label_count, two_w);
            if q > best_q + 1e-12 {
                best_q = q;
                best_labels = labels.clone();
            }
            let mut whole: Vec<VertexId> = side.iter().chain(&other).copied().collect();
            whole.sort_unstable();
            splits.push(Split {
                left: side,
                right: other,
                score: removed_score,
            });
            whole
        };
        // Only edges inside the touched component can change.
        for &v in &component {
            for &(_, e) in g.incident(v) {
                scores[e] = 0.0;
            }
        }
        let partial = betweenness_from(g, &alive, &component);
        for &v in &component {
            for &(_, e) in g.incident(v) {
                scores[e] = partial[e];
            }
        }
    }

    (reverse_splits(n, &splits), Partition::from_labels(&best_labels))
}

fn highest_alive(scores: &[f64], alive: &[bool]) -> usize {
    let mut best: Option<usize> = None;
    for (e, &s) in scores.iter().enumerate() {
        if !alive[e] {
            continue;
        }
        match best {
            None => best = Some(e),
            // Edges are sorted by endpoints, so an earlier index wins ties.
            Some(b) if s > scores[b] + 1e-9 * scores[b].abs().max(1.0) => best = Some(e),
            _ => {}
        }
    }
    best.expect("at least one alive edge")
}

/// Turns a top-down split sequence into bottom-up merges.
fn reverse_splits(n: usize, splits: &[Split]) -> Dendrogram {
    let mut dendrogram = Dendrogram::new(n);
    let mut node: Vec<usize> = (0..n).collect();
    for split in splits.iter().rev() {
        let a = node[split.left[0]];
        let b = node[split.right[0]];
        let id = dendrogram.push(a.min(b), a.max(b), split.score);
        for &v in split.left.iter().chain(&split.right) {
            node[v] = id;
        }
    }
    dendrogram
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::modularity;
    use crate::graph::fixtures::*;

    #[test]
    fn single_edge_scores_one() {
        let g = Graph::from_edge_list(&[("a", "b", 1.0)]).unwrap();
        assert_eq!(edge_betweenness_scores(&g), vec![1.0]);
    }

    #[test]
    fn barbell_bridge_scores_nine() {
        let g = barbell();
        let scores = edge_betweenness_scores(&g);
        let bridge = g.edge_index(2, 3).unwrap();
        assert_eq!(scores[bridge], 9.0);
        let others = scores.iter().enumerate().filter(|&(e, _)| e != bridge);
        assert!(others.map(|(_, &s)| s).fold(0.0, f64::max) <= 4.0);
    }

    #[test]
    fn four_cycle_splits_credit() {
        let g = Graph::from_edge_list(&[("a", "b", 1.0), ("b", "c", 1.0), ("c", "d", 1.0), ("d", "a", 1.0)]).unwrap();
        assert!(edge_betweenness_scores(&g).iter().all(|&s| (s - 2.0).abs() < 1e-12));
    }

    #[test]
    fn barbell_girvan_newman() {
        let g = barbell();
        let (d, p) = girvan_newman(&g);
        assert_eq!(p.membership(), &[0, 0, 0, 1, 1, 1]);
        assert!((modularity(&g, &p).unwrap() - 5.0 / 14.0).abs() < 1e-15);
        // The bridge split is the top of the hierarchy.
        assert_eq!(d.merges.len(), 5);
        assert_eq!(d.merges.last().unwrap().score, 9.0);
        assert!(d.cut(4).same_blocks(&p));
    }

    #[test]
    fn triangle_stays_whole() {
        let (_, p) = girvan_newman(&complete(3));
        assert_eq!(p.community_count(), 1);
    }

    #[test]
    fn disjoint_edges_stay_apart() {
        let g = Graph::from_edge_list(&[("a", "b", 1.0), ("c", "d", 1.0)]).unwrap();
        let (d, p) = girvan_newman(&g);
        assert_eq!(p.membership(), &[0, 0, 1, 1]);
        assert_eq!(d.merges.len(), 2);
    }

    #[test]
    fn scores_do_not_depend_on_thread_count() {
        let g = complete(40);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| edge_betweenness_scores(&g));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let multi = pool.install(|| edge_betweenness_scores(&g));
        assert_eq!(single, multi);
    }
}
