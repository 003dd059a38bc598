use std::collections::BTreeSet;

use netcomm_core::netstats::{
    connectedness, eigenvector_centrality, global_clustering, maximal_cliques, triangle_count,
};
use netcomm_core::graph::GraphBuilder;
use netcomm_core::Graph;
use proptest::prelude::*;

fn random_graph(n: u8, pairs: &[(u8, u8, u8)]) -> Graph {
    let mut rows: Vec<(String, String, f64)> = Vec::new();
    for &(a, b, w) in pairs {
        let (a, b) = (a % n, b % n);
        if a != b {
            rows.push((format!("x{a}"), format!("x{b}"), w as f64));
        }
    }
    Graph::from_edge_list(&rows).unwrap()
}

fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut a = vec![vec![false; n]; n];
    for e in g.edges() {
        a[e.source][e.target] = true;
        a[e.target][e.source] = true;
    }
    a
}

/// Fraction of ordered pairs connected by a path, via transitive closure.
fn closure_connectedness(g: &Graph) -> f64 {
    let n = g.vertex_count();
    let mut reach = adjacency(g);
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let pairs = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && reach[i][j])
        .count();
    pairs as f64 / (n * (n - 1)) as f64
}

/// Every vertex subset that is a clique and cannot be extended.
fn exhaustive_maximal_cliques(g: &Graph, min_size: usize) -> BTreeSet<Vec<usize>> {
    let n = g.vertex_count();
    let a = adjacency(g);
    let is_clique = |mask: u32| {
        (0..n).all(|i| mask >> i & 1 == 0 || (i + 1..n).all(|j| mask >> j & 1 == 0 || a[i][j]))
    };
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize >= min_size
            && is_clique(mask)
            && (0..n).all(|v| mask >> v & 1 == 1 || !is_clique(mask | 1 << v))
        {
            out.insert((0..n).filter(|&v| mask >> v & 1 == 1).collect());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn connectedness_matches_transitive_closure(
        n in 2u8..50,
        pairs in prop::collection::vec((0u8..50, 0u8..50, 1u8..3), 0..60),
    ) {
        let g = random_graph(n, &pairs);
        prop_assume!(g.vertex_count() >= 2);
        let expected = closure_connectedness(&g);
        prop_assert!((connectedness(&g).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn cliques_match_exhaustive_enumeration(
        n in 2u8..=12,
        pairs in prop::collection::vec((0u8..12, 0u8..12, 1u8..2), 0..50),
        min_size in 1usize..5,
    ) {
        let g = random_graph(n, &pairs);
        let found = maximal_cliques(&g, min_size);
        let as_set: BTreeSet<Vec<usize>> = found.iter().cloned().collect();
        prop_assert_eq!(as_set.len(), found.len(), "duplicates reported");
        prop_assert_eq!(as_set, exhaustive_maximal_cliques(&g, min_size));
        for w in found.windows(2) {
            prop_assert!(w[0].len() > w[1].len() || (w[0].len() == w[1].len() && w[0] < w[1]));
        }
    }

    #[test]
    fn clustering_matches_triple_count(
        n in 3u8..20,
        pairs in prop::collection::vec((0u8..20, 0u8..20, 1u8..2), 0..60),
    ) {
        let g = random_graph(n, &pairs);
        let a = adjacency(&g);
        let n = g.vertex_count();
        let (mut triples, mut triangles) = (0usize, 0usize);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != j && j != k && i != k && a[i][j] && a[j][k] {
                        triples += 1;
                        if i < j && j < k && a[i][k] {
                            triangles += 1;
                        }
                    }
                }
            }
        }
        // `triples` counts ordered paths i-j-k, twice each unordered triple.
        let expected = if triples == 0 { 0.0 } else { 6.0 * triangles as f64 / triples as f64 };
        prop_assert_eq!(triangle_count(&g), triangles);
        prop_assert!((global_clustering(&g) - expected).abs() < 1e-12);
    }

    #[test]
    fn centrality_is_a_weighted_eigenvector(
        n in 2u8..25,
        pairs in prop::collection::vec((0u8..25, 0u8..25, 1u8..6), 1..80),
        scale in 0.1f64..10.0,
    ) {
        let g = random_graph(n, &pairs);
        let scores = eigenvector_centrality(&g, 1e-12, 100_000).unwrap();
        prop_assert!(scores.iter().all(|s| (0.0..=1.0 + 1e-12).contains(s)));
        // Residual per component with the Rayleigh quotient as eigenvalue.
        for comp in &g.connected_components().components {
            if comp.len() < 2 {
                continue;
            }
            let av: Vec<f64> = comp
                .iter()
                .map(|&v| g.neighbors(v).map(|(u, w)| w * scores[u]).sum())
                .collect();
            let x: Vec<f64> = comp.iter().map(|&v| scores[v]).collect();
            let lambda = av.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()
                / x.iter().map(|b| b * b).sum::<f64>();
            let residual = av.iter().zip(&x).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
            prop_assert!(residual <= 1e-9 * lambda.max(1.0), "residual {residual}");
        }
        let mut b = GraphBuilder::new();
        for label in g.labels() {
            b.vertex(label);
        }
        for e in g.edges() {
            b.add_edge(e.source, e.target, e.weight * scale).unwrap();
        }
        let h = b.build();
        let scaled = eigenvector_centrality(&h, 1e-12, 100_000).unwrap();
        for v in 0..g.vertex_count() {
            let u = h.vertex_by_label(g.label(v)).unwrap();
            prop_assert!((scores[v] - scaled[u]).abs() < 1e-8);
        }
    }
}

#[test]
fn connectedness_of_isolated_pair_structure() {
    let g = Graph::from_edge_list(&[("a", "b", 1.0), ("c", "d", 1.0)]).unwrap();
    assert!((connectedness(&g).unwrap() - 4.0 / 12.0).abs() < 1e-15);
}
