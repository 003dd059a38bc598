//! Undirected weighted simple graphs.
//!
//! Vertices are dense `usize` ids in first-seen order; labels are kept for
//! I/O. Repeated edges between the same pair collapse into one edge whose
//! weight is the sum of the repeated weights.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::BufRead;

use thiserror::Error;

pub type VertexId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("row {row}: self-loop on vertex {label:?}")]
    SelfLoop { row: usize, label: String },
    #[error("row {row}: edge weight must be positive, got {weight}")]
    NonPositiveWeight { row: usize, weight: f64 },
    #[error("edge references undeclared vertex {0}")]
    UnknownVertex(VertexId),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An undirected edge with `source < target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: VertexId,
    pub target: VertexId,
    pub weight: f64,
}

impl Edge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.source == v {
            self.target
        } else {
            self.source
        }
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<Edge>,
    // (neighbor, edge index) sorted by neighbor
    adjacency: Vec<Vec<(VertexId, usize)>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.edges == other.edges
    }
}

impl Graph {
    pub fn empty() -> Self {
        GraphBuilder::new().build()
    }

    /// Builds a graph from labelled rows `(src, dst, weight)`.
    pub fn from_edge_list<S: AsRef<str>>(rows: &[(S, S, f64)]) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::new();
        for (row, (src, dst, weight)) in rows.iter().enumerate() {
            let (src, dst) = (src.as_ref(), dst.as_ref());
            if src == dst {
                return Err(GraphError::SelfLoop {
                    row,
                    label: src.to_string(),
                });
            }
            if !(*weight > 0.0) || !weight.is_finite() {
                return Err(GraphError::NonPositiveWeight {
                    row,
                    weight: *weight,
                });
            }
            let u = builder.vertex(src);
            let v = builder.vertex(dst);
            builder.add_edge(u, v, *weight)?;
        }
        Ok(builder.build())
    }

    /// Reads a `src<TAB>dst[<TAB>weight]` edge list. `#` lines and blank
    /// lines are skipped; the weight defaults to 1.
    pub fn read_edge_tsv<R: BufRead>(reader: R) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: format!("expected 2 or 3 tab-separated fields, got {}", fields.len()),
                });
            }
            let (src, dst) = (fields[0].trim(), fields[1].trim());
            if src.is_empty() || dst.is_empty() {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: "empty vertex label".into(),
                });
            }
            let weight = match fields.get(2) {
                Some(w) => w.trim().parse::<f64>().map_err(|e| GraphError::Parse {
                    line: line_no,
                    message: format!("bad weight {w:?}: {e}"),
                })?,
                None => 1.0,
            };
            if src == dst {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: format!("self-loop on {src:?}"),
                });
            }
            if !(weight > 0.0) || !weight.is_finite() {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: format!("edge weight must be positive, got {weight}"),
                });
            }
            let u = builder.vertex(src);
            let v = builder.vertex(dst);
            builder.add_edge(u, v, weight)?;
        }
        Ok(builder.build())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    /// Edges sorted by `(source, target)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(neighbor, edge index)` pairs sorted by neighbor id.
    pub fn incident(&self, v: VertexId) -> &[(VertexId, usize)] {
        &self.adjacency[v]
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.adjacency[v]
            .iter()
            .map(move |&(u, e)| (u, self.edges[e].weight))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    /// Sum of incident edge weights.
    pub fn strength(&self, v: VertexId) -> f64 {
        self.neighbors(v).map(|(_, w)| w).sum()
    }

    pub fn strengths(&self) -> Vec<f64> {
        (0..self.vertex_count()).map(|v| self.strength(v)).collect()
    }

    /// `(degree, strength)` for every vertex.
    pub fn degrees(&self) -> Vec<(usize, f64)> {
        (0..self.vertex_count())
            .map(|v| (self.degree(v), self.strength(v)))
            .collect()
    }

    /// Total edge weight W (each edge counted once).
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn edge_index(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let adj = &self.adjacency[u];
        adj.binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| adj[i].1)
    }

    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<f64> {
        self.edge_index(u, v).map(|e| self.edges[e].weight)
    }

    /// The subgraph induced by `vertices`; new ids follow the given order.
    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> Graph {
        let mut builder = GraphBuilder::new();
        let mut remap = vec![usize::MAX; self.vertex_count()];
        for &v in vertices {
            remap[v] = builder.vertex(&self.labels[v]);
        }
        for e in &self.edges {
            let (a, b) = (remap[e.source], remap[e.target]);
            if a != usize::MAX && b != usize::MAX {
                builder
                    .add_edge(a, b, e.weight)
                    .expect("endpoints were declared");
            }
        }
        builder.build()
    }

    /// A copy of this graph without the given edge indices.
    pub fn without_edges(&self, removed: &[usize]) -> Graph {
        let mut builder = GraphBuilder::new();
        for label in &self.labels {
            builder.vertex(label);
        }
        for (i, e) in self.edges.iter().enumerate() {
            if !removed.contains(&i) {
                builder
                    .add_edge(e.source, e.target, e.weight)
                    .expect("endpoints were declared");
            }
        }
        builder.build()
    }

    pub fn connected_components(&self) -> ComponentDecomposition {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut members = Vec::new();
            while let Some(v) = queue.pop_front() {
                members.push(v);
                for &(u, _) in &self.adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        // Discovery order already ascends by smallest member; stable sort keeps it for ties.
        components.sort_by_key(|c| std::cmp::Reverse(c.len()));
        ComponentDecomposition { components }
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }
}

/// Incremental constructor that merges repeated edges.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    weights: BTreeMap<(VertexId, VertexId), f64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `label`, declaring it if new.
    pub fn vertex(&mut self, label: &str) -> VertexId {
        if let Some(&v) = self.index.get(label) {
            return v;
        }
        let v = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), v);
        v
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Adds `weight` to edge `{u, v}`. Callers validate self-loops and
    /// weights; this only checks that both endpoints exist.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, weight: f64) -> Result<(), GraphError> {
        let n = self.labels.len();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        debug_assert!(u != v, "self-loops are rejected upstream");
        let key = (u.min(v), u.max(v));
        *self.weights.entry(key).or_insert(0.0) += weight;
        Ok(())
    }

    pub fn build(self) -> Graph {
        let n = self.labels.len();
        let edges: Vec<Edge> = self
            .weights
            .into_iter()
            .map(|((source, target), weight)| Edge {
                source,
                target,
                weight,
            })
            .collect();
        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.source].push((e.target, i));
            adjacency[e.target].push((e.source, i));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Graph {
            labels: self.labels,
            index: self.index,
            edges,
            adjacency,
        }
    }
}

/// Connected components ordered by decreasing size, ties by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    pub components: Vec<Vec<VertexId>>,
}

impl ComponentDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn largest(&self) -> Option<&[VertexId]> {
        self.components.first().map(Vec::as_slice)
    }

    /// Component index of every vertex.
    pub fn membership(&self, vertex_count: usize) -> Vec<usize> {
        let mut out = vec![0; vertex_count];
        for (c, members) in self.components.iter().enumerate() {
            for &v in members {
                out[v] = c;
            }
        }
        out
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Graph;

    /// Two unit-weight triangles {1,2,3} and {4,5,6} joined by the bridge 3-4.
    pub fn barbell() -> Graph {
        Graph::from_edge_list(&[
            ("1", "2", 1.0),
            ("1", "3", 1.0),
            ("2", "3", 1.0),
            ("3", "4", 1.0),
            ("4", "5", 1.0),
            ("4", "6", 1.0),
            ("5", "6", 1.0),
        ])
        .unwrap()
    }

    pub fn barbell_without_bridge() -> Graph {
        let g = barbell();
        let bridge = g.edge_index(2, 3).unwrap();
        g.without_edges(&[bridge])
    }

    pub fn complete(n: usize) -> Graph {
        let mut rows = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                rows.push((i.to_string(), j.to_string(), 1.0));
            }
        }
        Graph::from_edge_list(&rows).unwrap()
    }

    pub fn star(leaves: usize) -> Graph {
        let rows: Vec<_> = (1..=leaves)
            .map(|i| ("c".to_string(), format!("l{i}"), 1.0))
            .collect();
        Graph::from_edge_list(&rows).unwrap()
    }

    pub fn path(n: usize) -> Graph {
        let rows: Vec<_> = (1..n)
            .map(|i| ((i - 1).to_string(), i.to_string(), 1.0))
            .collect();
        Graph::from_edge_list(&rows).unwrap()
    }

    pub fn two_triangles() -> Graph {
        Graph::from_edge_list(&[
            ("a", "b", 1.0),
            ("a", "c", 1.0),
            ("b", "c", 1.0),
            ("d", "e", 1.0),
            ("d", "f", 1.0),
            ("e", "f", 1.0),
        ])
        .unwrap()
    }
}
