use std::collections::BTreeMap;

use netcomm_core::ingest::{build_coauthorship, PublicationKind, PublicationRecord};
use netcomm_core::Graph;
use proptest::prelude::*;

fn edge_rows() -> impl Strategy<Value = Vec<(u8, u8, u8)>> {
    prop::collection::vec((0u8..20, 0u8..20, 1u8..5), 0..60)
}

fn build(rows: &[(u8, u8, u8)]) -> Graph {
    let rows: Vec<(String, String, f64)> = rows
        .iter()
        .filter(|(a, b, _)| a != b)
        .map(|&(a, b, w)| (format!("v{a}"), format!("v{b}"), w as f64))
        .collect();
    Graph::from_edge_list(&rows).unwrap()
}

proptest! {
    #[test]
    fn degree_and_strength_sums(rows in edge_rows()) {
        let g = build(&rows);
        let degree_sum: usize = (0..g.vertex_count()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        let strength_sum: f64 = g.strengths().iter().sum();
        prop_assert!((strength_sum - 2.0 * g.total_weight()).abs() < 1e-9);
    }

    #[test]
    fn duplicate_rows_merge_by_summed_weight(rows in edge_rows()) {
        let g = build(&rows);
        let mut expected: BTreeMap<(String, String), f64> = BTreeMap::new();
        for &(a, b, w) in rows.iter().filter(|(a, b, _)| a != b) {
            let (a, b) = (format!("v{a}"), format!("v{b}"));
            let key = if a < b { (a, b) } else { (b, a) };
            *expected.entry(key).or_insert(0.0) += w as f64;
        }
        prop_assert_eq!(g.edge_count(), expected.len());
        for ((a, b), w) in expected {
            let (u, v) = (g.vertex_by_label(&a).unwrap(), g.vertex_by_label(&b).unwrap());
            prop_assert_eq!(g.edge_weight(u, v), Some(w));
            prop_assert_eq!(g.edge_weight(v, u), Some(w));
        }
    }

    #[test]
    fn components_partition_vertices(rows in edge_rows()) {
        let g = build(&rows);
        let comps = g.connected_components();
        let mut seen = vec![0usize; g.vertex_count()];
        for c in &comps.components {
            for &v in c {
                seen[v] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&k| k == 1));
        let membership = comps.membership(g.vertex_count());
        for e in g.edges() {
            prop_assert_eq!(membership[e.source], membership[e.target]);
        }
        prop_assert_eq!(comps.sizes().iter().sum::<usize>(), g.vertex_count());
    }

    #[test]
    fn row_order_does_not_change_the_graph_up_to_labels(rows in edge_rows()) {
        let g = build(&rows);
        let mut reversed = rows.clone();
        reversed.reverse();
        let h = build(&reversed);
        prop_assert_eq!(g.vertex_count(), h.vertex_count());
        prop_assert_eq!(g.edge_count(), h.edge_count());
        for e in g.edges() {
            let (u, v) = (h.vertex_by_label(g.label(e.source)).unwrap(), h.vertex_by_label(g.label(e.target)).unwrap());
            prop_assert_eq!(h.edge_weight(u, v), Some(e.weight));
        }
    }

    #[test]
    fn coauthorship_matches_pair_counter(
        papers in prop::collection::vec(prop::collection::btree_set(0u8..15, 1..6), 1..50)
    ) {
        let records: Vec<PublicationRecord> = papers
            .iter()
            .enumerate()
            .map(|(i, authors)| PublicationRecord {
                id: format!("p{i}"),
                year: 2000,
                kind: PublicationKind::Journal,
                authors: authors.iter().map(|a| format!("author {a}")).collect(),
            })
            .collect();
        let g = build_coauthorship(&records);
        let mut pairs: BTreeMap<(u8, u8), f64> = BTreeMap::new();
        for authors in &papers {
            let list: Vec<u8> = authors.iter().copied().collect();
            for i in 0..list.len() {
                for j in i + 1..list.len() {
                    *pairs.entry((list[i], list[j])).or_insert(0.0) += 1.0;
                }
            }
        }
        let distinct: std::collections::BTreeSet<u8> = papers.iter().flatten().copied().collect();
        prop_assert_eq!(g.vertex_count(), distinct.len());
        prop_assert_eq!(g.edge_count(), pairs.len());
        for ((a, b), w) in pairs {
            let u = g.vertex_by_label(&format!("author {a}")).unwrap();
            let v = g.vertex_by_label(&format!("author {b}")).unwrap();
            prop_assert_eq!(g.edge_weight(u, v), Some(w));
        }
    }
}

#[test]
fn edge_lists_reject_self_loops_and_bad_weights() {
    assert!(Graph::from_edge_list(&[("a", "a", 1.0)]).is_err());
    assert!(Graph::from_edge_list(&[("a", "b", 0.0)]).is_err());
    assert!(Graph::from_edge_list(&[("a", "b", -1.0)]).is_err());
    assert!(Graph::from_edge_list(&[("a", "b", f64::NAN)]).is_err());
    assert!(Graph::from_edge_list(&[("a", "b", 2.0)]).is_ok());
}
