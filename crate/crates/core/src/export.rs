//! Graph documents: canonical JSON (lossless), GraphML and DOT.
//!
//! JSON layout:
//!
//! ```text
//! {
//!   "vertices": [{"id": 0, "label": "a", "community": 0,
//!                 "attributes": {"department": "...", "affiliation": null, ...}}, ...],
//!   "edges": [{"source": 0, "target": 1, "weight": 2.0}, ...]
//! }
//! ```
//!
//! `community` and `attributes` are present only when supplied. Vertex ids
//! are dense and listed in order; edges list `source < target`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::community::Partition;
use crate::graph::{Graph, GraphBuilder, GraphError};
use crate::ingest::{AttributeTable, Attributes, Characteristic};
use crate::render::xml_escape;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("unsupported export format {0:?} (expected graphml, dot or json)")]
    UnsupportedFormat(String),
    #[error("graph json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph json: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Graphml,
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "graphml" => Ok(ExportFormat::Graphml),
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(ExportError::UnsupportedFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexDoc {
    id: usize,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    community: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attributes: Option<Attributes>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    source: usize,
    target: usize,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

/// A graph with its optional membership and attributes, as read back
/// from JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDocument {
    pub graph: Graph,
    pub partition: Option<Partition>,
    pub attributes: Option<AttributeTable>,
}

pub fn export_graph(
    g: &Graph,
    partition: Option<&Partition>,
    attrs: Option<&AttributeTable>,
    format: ExportFormat,
) -> Result<String, ExportError> {
    if let Some(p) = partition {
        if p.len() != g.vertex_count() {
            return Err(ExportError::Invalid(format!(
                "membership covers {} vertices, graph has {}",
                p.len(),
                g.vertex_count()
            )));
        }
    }
    Ok(match format {
        ExportFormat::Json => to_json(g, partition, attrs),
        ExportFormat::Graphml => to_graphml(g, partition, attrs),
        ExportFormat::Dot => to_dot(g, partition, attrs),
    })
}

pub fn to_json(g: &Graph, partition: Option<&Partition>, attrs: Option<&AttributeTable>) -> String {
    let doc = GraphDoc {
        vertices: (0..g.vertex_count())
            .map(|v| VertexDoc {
                id: v,
                label: g.label(v).to_string(),
                community: partition.map(|p| p.community_of(v)),
                attributes: attrs.and_then(|t| t.get(g.label(v))).cloned(),
            })
            .collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                source: e.source,
                target: e.target,
                weight: e.weight,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<GraphDocument, ExportError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let mut builder = GraphBuilder::new();
    for (i, v) in doc.vertices.iter().enumerate() {
        if v.id != i {
            return Err(ExportError::Invalid(format!("vertex ids must be 0..n in order; found {} at position {i}", v.id)));
        }
        if builder.vertex(&v.label) != i {
            return Err(ExportError::Invalid(format!("duplicate vertex label {:?}", v.label)));
        }
    }
    for (row, e) in doc.edges.iter().enumerate() {
        if e.source == e.target {
            return Err(GraphError::SelfLoop {
                row,
                label: doc.vertices.get(e.source).map(|v| v.label.clone()).unwrap_or_default(),
            }
            .into());
        }
        if !(e.weight > 0.0) || !e.weight.is_finite() {
            return Err(GraphError::NonPositiveWeight { row, weight: e.weight }.into());
        }
        builder.add_edge(e.source, e.target, e.weight)?;
    }
    let graph = builder.build();

    let with_community = doc.vertices.iter().filter(|v| v.community.is_some()).count();
    let partition = match with_community {
        0 => None,
        n if n == doc.vertices.len() => {
            let labels: Vec<usize> = doc.vertices.iter().map(|v| v.community.unwrap()).collect();
            Some(Partition::from_labels(&labels))
        }
        _ => return Err(ExportError::Invalid("community given for some vertices but not all".into())),
    };

    let mut attributes = None;
    for v in &doc.vertices {
        if let Some(a) = &v.attributes {
            attributes
                .get_or_insert_with(AttributeTable::new)
                .insert(&v.label, a.clone())
                .map_err(|e| ExportError::Invalid(e.to_string()))?;
        }
    }
    Ok(GraphDocument {
        graph,
        partition,
        attributes,
    })
}

fn to_graphml(g: &Graph, partition: Option<&Partition>, attrs: Option<&AttributeTable>) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    if partition.is_some() {
        out.push_str("  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n");
    }
    if attrs.is_some() {
        for c in Characteristic::ALL {
            let _ = writeln!(out, "  <key id=\"{c}\" for=\"node\" attr.name=\"{c}\" attr.type=\"string\"/>");
        }
    }
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    out.push_str("  <graph id=\"coauthorship\" edgedefault=\"undirected\">\n");
    for v in 0..g.vertex_count() {
        let _ = write!(out, "    <node id=\"n{v}\"><data key=\"label\">{}</data>", xml_escape(g.label(v)));
        if let Some(p) = partition {
            let _ = write!(out, "<data key=\"community\">{}</data>", p.community_of(v));
        }
        if let Some(a) = attrs.and_then(|t| t.get(g.label(v))) {
            for c in Characteristic::ALL {
                if let Some(value) = a.get(c) {
                    let _ = write!(out, "<data key=\"{c}\">{}</data>", xml_escape(value));
                }
            }
        }
        out.push_str("</node>\n");
    }
    for (i, e) in g.edges().iter().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\"><data key=\"weight\">{}</data></edge>",
            e.source, e.target, e.weight
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn to_dot(g: &Graph, partition: Option<&Partition>, attrs: Option<&AttributeTable>) -> String {
    let mut out = String::from("graph coauthorship {\n");
    for v in 0..g.vertex_count() {
        let mut fields = vec![format!("label={}", dot_quote(g.label(v)))];
        if let Some(p) = partition {
            fields.push(format!("community={}", p.community_of(v)));
        }
        if let Some(a) = attrs.and_then(|t| t.get(g.label(v))) {
            for c in Characteristic::ALL {
                if let Some(value) = a.get(c) {
                    fields.push(format!("{c}={}", dot_quote(value)));
                }
            }
        }
        let _ = writeln!(out, "  n{v} [{}];", fields.join(", "));
    }
    for e in g.edges() {
        let _ = writeln!(out, "  n{} -- n{} [weight={}];", e.source, e.target, e.weight);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn json_round_trip() {
        let g = barbell();
        let doc = from_json(&export_graph(&g, None, None, ExportFormat::Json).unwrap()).unwrap();
        assert_eq!(doc.graph, g);
        assert!(doc.partition.is_none() && doc.attributes.is_none());
    }

    #[test]
    fn json_round_trip_with_membership_and_attributes() {
        let g = Graph::from_edge_list(&[("a", "b", 0.1 + 0.2), ("b", "c", 1e-7)]).unwrap();
        let p = Partition::from_labels(&[0, 0, 1]);
        let mut t = AttributeTable::new();
        t.insert(
            "a",
            Attributes {
                department: Some("Biology".into()),
                ..Default::default()
            },
        )
        .unwrap();
        let text = to_json(&g, Some(&p), Some(&t));
        let doc = from_json(&text).unwrap();
        assert_eq!(doc.graph, g);
        assert_eq!(doc.partition, Some(p));
        assert_eq!(doc.attributes.unwrap().get("a"), t.get("a"));
    }

    #[test]
    fn dot_carries_membership() {
        let g = barbell();
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let dot = export_graph(&g, Some(&p), None, ExportFormat::Dot).unwrap();
        assert_eq!(dot.matches("community=").count(), 6);
        assert_eq!(dot.matches(" -- ").count(), 7);
    }

    #[test]
    fn graphml_is_well_formed() {
        let g = Graph::from_edge_list(&[("a&b", "<c>", 2.0)]).unwrap();
        let p = Partition::singletons(2);
        let xml = export_graph(&g, Some(&p), None, ExportFormat::Graphml).unwrap();
        let doc = roxmltree::Document::parse(&xml).unwrap();
        assert_eq!(doc.descendants().filter(|n| n.has_tag_name("node")).count(), 2);
        assert!(xml.contains("<data key=\"weight\">2</data>"));
    }

    #[test]
    fn unsupported_format() {
        assert!(matches!("pdf".parse::<ExportFormat>(), Err(ExportError::UnsupportedFormat(_))));
    }

    #[test]
    fn rejects_inconsistent_json() {
        let bad = r#"{"vertices":[{"id":1,"label":"a"}],"edges":[]}"#;
        assert!(from_json(bad).is_err());
        let partial = r#"{"vertices":[{"id":0,"label":"a","community":0},{"id":1,"label":"b"}],"edges":[]}"#;
        assert!(from_json(partial).is_err());
        let loop_ = r#"{"vertices":[{"id":0,"label":"a"}],"edges":[{"source":0,"target":0,"weight":1}]}"#;
        assert!(from_json(loop_).is_err());
    }
}
