//! SVG rendering of network views and community-size histograms.

use std::fmt::Write as _;

use crate::community::{community_sizes, Partition};
use crate::graph::{Graph, VertexId};
use crate::layout::LayoutCoordinates;

/// Categorical palette; categories cycle through it by index.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#ad494a",
];
/// Fill reserved for vertices whose attribute is null.
pub const NULL_FILL: &str = "#d9d9d9";

/// What decides a vertex's fill.
#[derive(Debug, Clone)]
pub enum ColorSource<'a> {
    Uniform,
    Partition(&'a Partition),
    /// One optional value per vertex.
    Attribute { name: String, values: Vec<Option<String>> },
}

/// What decides a vertex's radius.
#[derive(Debug, Clone)]
pub enum SizeSource {
    Uniform,
    /// One score per vertex; radius is affine in the score.
    Scores(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub legend_width: f64,
    pub title: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 800.0,
            height: 800.0,
            margin: 30.0,
            min_radius: 3.0,
            max_radius: 14.0,
            legend_width: 220.0,
            title: None,
        }
    }
}

pub(crate) fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Per-vertex fills plus the legend entries `(caption, fill)`.
fn categories(n: usize, color: &ColorSource) -> (Vec<String>, Vec<(String, String)>) {
    match color {
        ColorSource::Uniform => (vec![PALETTE[0].to_string(); n], Vec::new()),
        ColorSource::Partition(p) => {
            let fills = (0..n)
                .map(|v| PALETTE[p.community_of(v) % PALETTE.len()].to_string())
                .collect();
            let legend = (0..p.community_count())
                .map(|c| (format!("community {c}"), PALETTE[c % PALETTE.len()].to_string()))
                .collect();
            (fills, legend)
        }
        ColorSource::Attribute { values, .. } => {
            let mut distinct: Vec<&str> = values.iter().flatten().map(String::as_str).collect();
            distinct.sort_unstable();
            distinct.dedup();
            let fill_of = |value: &Option<String>| match value {
                Some(v) => {
                    let i = distinct.binary_search(&v.as_str()).expect("value was collected");
                    PALETTE[i % PALETTE.len()].to_string()
                }
                None => NULL_FILL.to_string(),
            };
            let fills = values.iter().map(fill_of).collect();
            let mut legend: Vec<(String, String)> = distinct
                .iter()
                .enumerate()
                .map(|(i, v)| (v.to_string(), PALETTE[i % PALETTE.len()].to_string()))
                .collect();
            if values.iter().any(Option::is_none) {
                legend.push(("null".to_string(), NULL_FILL.to_string()));
            }
            (fills, legend)
        }
    }
}

/// Radius for each vertex: affine from the score range onto
/// `[min_radius, max_radius]`; constant scores and uniform sizing use the
/// midpoint.
pub fn radii(n: usize, size: &SizeSource, opts: &SvgOptions) -> Vec<f64> {
    let mid = (opts.min_radius + opts.max_radius) / 2.0;
    match size {
        SizeSource::Uniform => vec![mid; n],
        SizeSource::Scores(scores) => {
            let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            scores
                .iter()
                .map(|&s| {
                    if hi > lo {
                        opts.min_radius + (s - lo) / (hi - lo) * (opts.max_radius - opts.min_radius)
                    } else {
                        mid
                    }
                })
                .collect()
        }
    }
}

/// One `<circle>` per vertex, one `<line>` per edge, and a legend.
pub fn render_svg(
    g: &Graph,
    layout: &LayoutCoordinates,
    color: &ColorSource,
    size: &SizeSource,
    opts: &SvgOptions,
) -> String {
    let n = g.vertex_count();
    assert_eq!(layout.len(), n, "layout must cover every vertex");
    let (fills, legend) = categories(n, color);
    let radius = radii(n, size, opts);
    let plot = (opts.width - 2.0 * opts.margin, opts.height - 2.0 * opts.margin);
    let at = |v: VertexId| {
        let (x, y) = layout.positions[v];
        (opts.margin + x * plot.0, opts.margin + (1.0 - y) * plot.1)
    };
    let total_width = opts.width + opts.legend_width;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total_width}" height="{h}" viewBox="0 0 {total_width} {h}">"#,
        h = opts.height
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{total_width}" height="{}" fill="white"/>"#, opts.height);
    if let Some(title) = &opts.title {
        let _ = writeln!(svg, r#"<text x="{}" y="20" font-family="sans-serif" font-size="14">{}</text>"#, opts.margin, xml_escape(title));
    }
    let _ = writeln!(svg, r##"<g id="edges" stroke="#999999" stroke-opacity="0.6">"##);
    for e in g.edges() {
        let (a, b) = (at(e.source), at(e.target));
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke-width="{:.2}"/>"#,
            a.0,
            a.1,
            b.0,
            b.1,
            1.0 + e.weight.ln().max(0.0)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r##"<g id="vertices" stroke="#333333" stroke-width="0.5">"##);
    for v in 0..n {
        let (x, y) = at(v);
        let _ = writeln!(
            svg,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{}"><title>{}</title></circle>"#,
            radius[v],
            fills[v],
            xml_escape(g.label(v))
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g id="legend" font-family="sans-serif" font-size="12">"#);
    let legend_x = opts.width + 10.0;
    let heading = match color {
        ColorSource::Uniform => "vertices".to_string(),
        ColorSource::Partition(_) => "membership".to_string(),
        ColorSource::Attribute { name, .. } => name.clone(),
    };
    let _ = writeln!(svg, r#"<text x="{legend_x}" y="{}">{}</text>"#, opts.margin, xml_escape(&heading));
    for (i, (caption, fill)) in legend.iter().enumerate() {
        let y = opts.margin + 18.0 * (i as f64 + 1.0);
        let _ = writeln!(svg, r#"<rect x="{legend_x}" y="{:.1}" width="12" height="12" fill="{fill}"/>"#, y - 10.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{y:.1}">{}</text>"#, legend_x + 18.0, xml_escape(caption));
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}

/// Induced subgraph of one community, with the original ids of its
/// vertices.
pub fn community_view(g: &Graph, p: &Partition, community: usize) -> (Graph, Vec<VertexId>) {
    let members: Vec<VertexId> = (0..g.vertex_count())
        .filter(|&v| p.community_of(v) == community)
        .collect();
    (g.induced_subgraph(&members), members)
}

/// `rank,size` rows, largest community first.
pub fn sizes_csv(p: &Partition) -> String {
    let mut out = String::from("rank,size\n");
    for (i, s) in community_sizes(p).iter().enumerate() {
        let _ = writeln!(out, "{},{s}", i + 1);
    }
    out
}

/// Bar chart of community sizes, largest first.
pub fn sizes_svg(p: &Partition) -> String {
    let sizes = community_sizes(p);
    let (width, height, margin) = (640.0, 400.0, 40.0);
    let max = sizes.first().copied().unwrap_or(1).max(1) as f64;
    let slot = if sizes.is_empty() {
        0.0
    } else {
        (width - 2.0 * margin) / sizes.len() as f64
    };
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">"#);
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r##"<line x1="{margin}" y1="{y}" x2="{x}" y2="{y}" stroke="#333333"/>"##,
        y = height - margin,
        x = width - margin
    );
    for (i, &s) in sizes.iter().enumerate() {
        let h = s as f64 / max * (height - 2.0 * margin);
        let x = margin + i as f64 * slot;
        let _ = writeln!(
            svg,
            r#"<rect class="bar" x="{x:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="{}"><title>{s}</title></rect>"#,
            height - margin - h,
            (slot * 0.8).max(0.5),
            PALETTE[0]
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{margin}" y="{}" font-family="sans-serif" font-size="12">{} communities, largest {}</text>"#,
        margin - 15.0,
        sizes.len(),
        sizes.first().copied().unwrap_or(0)
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::layout::fruchterman_reingold;

    fn fills(svg: &str) -> std::collections::BTreeSet<String> {
        svg.lines()
            .filter(|l| l.starts_with("<circle"))
            .map(|l| l.split("fill=\"").nth(1).unwrap().split('"').next().unwrap().to_string())
            .collect()
    }

    #[test]
    fn empty_graph_renders() {
        let g = Graph::empty();
        let layout = fruchterman_reingold(&g, 10, 0);
        let svg = render_svg(&g, &layout, &ColorSource::Uniform, &SizeSource::Uniform, &SvgOptions::default());
        roxmltree::Document::parse(&svg).unwrap();
        assert!(svg.contains(r#"id="legend""#));
        assert!(!svg.contains("<circle"));
    }

    #[test]
    fn triangles_use_two_colors() {
        let g = barbell();
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let layout = fruchterman_reingold(&g, 50, 0);
        let svg = render_svg(&g, &layout, &ColorSource::Partition(&p), &SizeSource::Uniform, &SvgOptions::default());
        assert_eq!(fills(&svg).len(), 2);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let circles = doc.descendants().filter(|n| n.has_tag_name("circle")).count();
        assert_eq!(circles, 6);
        let lines = doc.descendants().filter(|n| n.has_tag_name("line")).count();
        assert_eq!(lines, 7);
    }

    #[test]
    fn uniform_sizing_gives_equal_radii() {
        let r = radii(6, &SizeSource::Uniform, &SvgOptions::default());
        assert!(r.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn score_sizing_is_monotone() {
        let scores = vec![0.2, 1.0, 0.5, 0.2];
        let r = radii(4, &SizeSource::Scores(scores), &SvgOptions::default());
        assert_eq!(r[1], SvgOptions::default().max_radius);
        assert_eq!(r[0], SvgOptions::default().min_radius);
        assert!(r[2] > r[0] && r[2] < r[1]);
    }

    #[test]
    fn null_attribute_has_reserved_style() {
        let g = path(3);
        let layout = fruchterman_reingold(&g, 10, 0);
        let color = ColorSource::Attribute {
            name: "origin".into(),
            values: vec![Some("Italy".into()), None, Some("<India>".into())],
        };
        let svg = render_svg(&g, &layout, &color, &SizeSource::Uniform, &SvgOptions::default());
        roxmltree::Document::parse(&svg).unwrap();
        assert!(fills(&svg).contains(NULL_FILL));
        assert!(svg.contains(">null<"));
        assert!(svg.contains("&lt;India&gt;"));
    }

    #[test]
    fn histogram_outputs() {
        let p = Partition::from_labels(&[0, 1, 1, 2, 1, 0]);
        assert_eq!(sizes_csv(&p), "rank,size\n1,3\n2,2\n3,1\n");
        let svg = sizes_svg(&p);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("bar")).count(), 3);
    }

    #[test]
    fn view_of_one_community() {
        let g = barbell();
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let (sub, ids) = community_view(&g, &p, 1);
        assert_eq!(ids, vec![3, 4, 5]);
        assert_eq!(sub.edge_count(), 3);
    }
}
