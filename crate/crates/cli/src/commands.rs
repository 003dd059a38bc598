use std::collections::{BTreeMap, HashMap};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use netcomm_core::community::{
    detect, girvan_newman, walktrap, Dendrogram, DetectionParams, LeadingEigenvectorOptions, SpinglassOptions,
};
use netcomm_core::export::{export_graph, from_json, to_json, ExportFormat};
use netcomm_core::graph::VertexId;
use netcomm_core::independence::{independence_grid, largest_component, ReportColumn, MIN_REPLICATES};
use netcomm_core::ingest::{build_coauthorship, load_attributes, parse_publications};
use netcomm_core::layout::fruchterman_reingold_with_area;
use netcomm_core::netstats::{eigenvector_centrality, summary_with, DEFAULT_CENTRALITY_MAX_ITER, DEFAULT_CENTRALITY_TOL};
use netcomm_core::render::{render_svg, sizes_csv, sizes_svg, ColorSource, SizeSource, SvgOptions};
use netcomm_core::{Algorithm, AttributeTable, Characteristic, Graph, Partition};
use serde_json::json;

use crate::args::*;
use crate::error::{CliError, Result};
use crate::manifest::{self, Recorder};

pub fn run(cli: Cli, argv: &[String]) -> Result<()> {
    match cli.command {
        Command::Build(a) => build(a, argv),
        Command::Stats(a) => stats(a, argv),
        Command::Detect(a) => detect_cmd(a, argv),
        Command::Chisq(a) => chisq(a, argv),
        Command::Layout(a) => layout(a, argv),
        Command::Sizes(a) => sizes(a, argv),
        Command::Export(a) => export(a, argv),
        Command::Replay(a) => replay(a),
    }
}

fn utf8(path: &Path, bytes: Vec<u8>) -> Result<String> {
    String::from_utf8(bytes).map_err(|e| CliError::input(path, e))
}

/// Reads a graph JSON document, or an edge-list TSV when the file does not
/// start with `{`.
fn load_graph(rec: &mut Recorder, path: &Path) -> Result<Graph> {
    let text = utf8(path, rec.read("graph", path)?)?;
    if text.trim_start().starts_with('{') {
        Ok(from_json(&text).map_err(|e| CliError::input(path, e))?.graph)
    } else {
        Graph::read_edge_tsv(text.as_bytes()).map_err(|e| CliError::input(path, e))
    }
}

fn load_attrs(rec: &mut Recorder, path: &Path) -> Result<AttributeTable> {
    let bytes = rec.read("attributes", path)?;
    load_attributes(bytes.as_slice()).map_err(|e| CliError::input(path, e))
}

/// A membership file restricted to graph vertices: `(vertex, community)`
/// pairs in file order.
struct Membership {
    vertices: Vec<VertexId>,
    communities: Vec<String>,
}

impl Membership {
    fn partition(&self) -> Partition {
        Partition::from_labels(&self.communities)
    }

    fn labels(&self, g: &Graph) -> Vec<String> {
        self.vertices.iter().map(|&v| g.label(v).to_string()).collect()
    }

    fn covers(&self, g: &Graph) -> bool {
        self.vertices.len() == g.vertex_count()
    }

    /// Community per graph vertex, in vertex order, when the file covers
    /// the whole graph.
    fn total_partition(&self, g: &Graph, path: &Path) -> Result<Partition> {
        if !self.covers(g) {
            return Err(CliError::input(
                path,
                format!("membership covers {} of {} vertices", self.vertices.len(), g.vertex_count()),
            ));
        }
        let mut labels = vec![String::new(); g.vertex_count()];
        for (&v, c) in self.vertices.iter().zip(&self.communities) {
            labels[v] = c.clone();
        }
        Ok(Partition::from_labels(&labels))
    }
}

fn load_membership(rec: &mut Recorder, path: &Path, g: &Graph) -> Result<Membership> {
    let bytes = rec.read("membership", path)?;
    let (ids, communities) = parse_membership(path, &bytes)?;
    let mut vertices = Vec::with_capacity(ids.len());
    let mut unknown = Vec::new();
    let mut seen = vec![false; g.vertex_count()];
    for id in &ids {
        match g.vertex_by_label(id) {
            Some(v) if seen[v] => return Err(CliError::input(path, format!("vertex {id:?} listed twice"))),
            Some(v) => {
                seen[v] = true;
                vertices.push(v);
            }
            None => unknown.push(id.as_str()),
        }
    }
    if !unknown.is_empty() {
        let shown: Vec<&str> = unknown.iter().take(10).copied().collect();
        return Err(CliError::input(
            path,
            format!(
                "{} membership label(s) not in the graph: {}{}",
                unknown.len(),
                shown.join(", "),
                if unknown.len() > shown.len() { ", ..." } else { "" }
            ),
        ));
    }
    Ok(Membership { vertices, communities })
}

fn parse_membership(path: &Path, bytes: &[u8]) -> Result<(Vec<String>, Vec<String>)> {
    let mut reader = csv::Reader::from_reader(bytes);
    let headers = reader.headers().map_err(|e| CliError::input(path, e))?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["id", "community"] {
        return Err(CliError::input(path, "membership header must be `id,community`"));
    }
    let (mut ids, mut communities) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| CliError::input(path, e))?;
        ids.push(record[0].to_string());
        communities.push(record[1].trim().to_string());
    }
    Ok((ids, communities))
}

fn membership_csv(g: &Graph, p: &Partition) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "community"]).expect("in-memory write");
    for v in 0..g.vertex_count() {
        w.write_record([g.label(v), &p.community_of(v).to_string()]).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

fn build(a: BuildArgs, argv: &[String]) -> Result<()> {
    let mut rec = Recorder::new("build", argv);
    let g = match (&a.pubs, &a.edges) {
        (Some(path), None) => {
            let bytes = rec.read("publications", path)?;
            let records = parse_publications(BufReader::new(bytes.as_slice())).map_err(|e| CliError::input(path, e))?;
            build_coauthorship(&records)
        }
        (None, Some(path)) => {
            let bytes = rec.read("edges", path)?;
            Graph::read_edge_tsv(bytes.as_slice()).map_err(|e| CliError::input(path, e))?
        }
        _ => return Err(CliError::Usage("give exactly one of --pubs or --edges".into())),
    };
    rec.parameters(json!({ "input": if a.pubs.is_some() { "pubs" } else { "edges" } }));
    rec.write(&a.out, to_json(&g, None, None).as_bytes())?;
    println!("{} vertices, {} edges", g.vertex_count(), g.edge_count());
    rec.finish(&a.out)
}

fn stats(a: StatsArgs, argv: &[String]) -> Result<()> {
    let mut rec = Recorder::new("stats", argv);
    let g = load_graph(&mut rec, &a.graph)?;
    let report = summary_with(&g, a.gamma_method, a.min_clique_size).to_json();
    match &a.out {
        Some(out) => {
            rec.parameters(json!({ "gamma_method": a.gamma_method.to_string(), "min_clique_size": a.min_clique_size }));
            rec.write(out, report.as_bytes())?;
            rec.finish(out)
        }
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

fn detection_params(a: &DetectArgs) -> DetectionParams {
    DetectionParams {
        leading_eigenvector: LeadingEigenvectorOptions {
            tol: a.tol,
            max_iter: a.max_iter,
        },
        walk_length: a.walk_length,
        spinglass: SpinglassOptions {
            q_max: a.spins,
            gamma: a.gamma,
            t_start: a.start_temp,
            t_stop: a.stop_temp,
            cooling: a.cool_fact,
            sweeps_per_temperature: a.sweeps,
        },
    }
}

fn detect_cmd(a: DetectArgs, argv: &[String]) -> Result<()> {
    let mut rec = Recorder::new("detect", argv);
    if a.algo.is_stochastic() && a.seed.is_none() {
        return Err(CliError::Usage(format!("--seed is required for {}", a.algo)));
    }
    if a.dendrogram.is_some() && !matches!(a.algo, Algorithm::Walktrap | Algorithm::Eb) {
        return Err(CliError::Usage("--dendrogram is only available for walktrap and eb".into()));
    }
    let full = load_graph(&mut rec, &a.graph)?;
    let (g, excluded) = if a.largest_component {
        largest_component(&full)
    } else {
        (full, 0)
    };
    let params = detection_params(&a);
    let seed = a.seed.unwrap_or(0);
    let (partition, dendrogram): (Partition, Option<Dendrogram>) = match a.algo {
        Algorithm::Walktrap => {
            let (d, p) = walktrap(&g, params.walk_length)?;
            (p, Some(d))
        }
        Algorithm::Eb => {
            let (d, p) = girvan_newman(&g);
            (p, Some(d))
        }
        other => (detect(&g, other, &params, seed)?, None),
    };

    if let Some(s) = a.seed {
        rec.seed("seed", s);
    }
    rec.parameters(json!({
        "algo": a.algo.name(),
        "largest_component": a.largest_component,
        "excluded_vertices": excluded,
        "tol": a.tol,
        "max_iter": a.max_iter,
        "walk_length": a.walk_length,
        "spins": a.spins,
        "gamma": a.gamma,
        "start_temp": a.start_temp,
        "stop_temp": a.stop_temp,
        "cool_fact": a.cool_fact,
        "sweeps": a.sweeps,
    }));
    rec.write(&a.out, &membership_csv(&g, &partition))?;
    if let (Some(path), Some(d)) = (&a.dendrogram, &dendrogram) {
        rec.write(path, d.to_json().as_bytes())?;
    }
    println!("{}: {} communities over {} vertices", a.algo, partition.community_count(), g.vertex_count());
    if a.largest_component {
        println!("excluded {excluded} vertices outside the largest component");
    }
    rec.finish(&a.out)
}

fn characteristics(names: &[String]) -> Result<Vec<Characteristic>> {
    let mut out = Vec::new();
    for name in names {
        if name.trim().eq_ignore_ascii_case("all") {
            out.extend(Characteristic::ALL);
            continue;
        }
        let c: Characteristic = name.parse().map_err(|e: netcomm_core::ingest::IngestError| CliError::Usage(e.to_string()))?;
        out.push(c);
    }
    let mut seen = Vec::new();
    out.retain(|c| {
        let fresh = !seen.contains(c);
        seen.push(*c);
        fresh
    });
    Ok(out)
}

fn membership_spec(spec: &str) -> (String, PathBuf) {
    match spec.split_once('=') {
        Some((name, path)) if !name.is_empty() => (name.to_string(), PathBuf::from(path)),
        _ => {
            let path = PathBuf::from(spec);
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| spec.to_string());
            (name, path)
        }
    }
}

fn chisq(a: ChisqArgs, argv: &[String]) -> Result<()> {
    let mut rec = Recorder::new("chisq", argv);
    let characteristics = characteristics(&a.characteristic)?;
    if a.replicates < MIN_REPLICATES {
        return Err(CliError::Usage(format!("--replicates must be at least {MIN_REPLICATES}")));
    }
    let g = load_graph(&mut rec, &a.graph)?;
    let attrs = load_attrs(&mut rec, &a.attrs)?;
    let mut columns = Vec::new();
    for spec in &a.membership {
        let (name, path) = membership_spec(spec);
        let m = load_membership(&mut rec, &path, &g)?;
        columns.push(ReportColumn {
            name,
            labels: m.labels(&g),
            partition: Ok(m.partition()),
            excluded_vertices: g.vertex_count() - m.vertices.len(),
        });
    }
    let report = independence_grid(g.labels(), columns, &attrs, &characteristics, a.replicates, a.seed);
    rec.seed("seed", a.seed);
    rec.parameters(json!({
        "replicates": a.replicates,
        "characteristics": characteristics.iter().map(|c| c.name()).collect::<Vec<_>>(),
        "columns": report.columns.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
    }));
    let text = report.to_text();
    rec.write(&a.out, report.to_json().as_bytes())?;
    if let Some(path) = &a.text {
        rec.write(path, text.as_bytes())?;
    }
    print!("{text}");
    rec.finish(&a.out)
}

fn attribute_characteristic(c: ColorBy) -> Option<Characteristic> {
    match c {
        ColorBy::Department => Some(Characteristic::Department),
        ColorBy::Affiliation => Some(Characteristic::Affiliation),
        ColorBy::Origin => Some(Characteristic::Origin),
        ColorBy::Position => Some(Characteristic::Position),
        ColorBy::None | ColorBy::Membership => None,
    }
}

fn layout(a: LayoutArgs, argv: &[String]) -> Result<()> {
    let mut rec = Recorder::new("layout", argv);
    let attribute = attribute_characteristic(a.color_by);
    if attribute.is_some() && a.attrs.is_none() {
        return Err(CliError::Usage(format!("--color-by {:?} needs --attrs", a.color_by).to_lowercase()));
    }
    if (a.color_by == ColorBy::Membership || a.community.is_some()) && a.membership.is_none() {
        return Err(CliError::Usage("--color-by membership and --community need --membership".into()));
    }
    if a.iterations == 0 {
        return Err(CliError::Usage("--iterations must be at least 1".into()));
    }
    if !(a.area > 0.0 && a.area.is_finite()) {
        return Err(CliError::Usage("--area must be positive".into()));
    }
    let full = load_graph(&mut rec, &a.graph)?;
    let attrs = match &a.attrs {
        Some(path) => Some(load_attrs(&mut rec, path)?),
        None => None,
    };
    let membership = match &a.membership {
        Some(path) => Some(load_membership(&mut rec, path, &full)?),
        None => None,
    };

    // Vertices drawn: those with a membership row (all when no file), then
    // only the chosen community.
    let (g, communities): (Graph, Option<Vec<String>>) = match &membership {
        Some(m) => {
            let mut rows: Vec<(VertexId, &String)> = m.vertices.iter().copied().zip(&m.communities).collect();
            if let Some(wanted) = &a.community {
                rows.retain(|(_, c)| *c == wanted);
                if rows.is_empty() {
                    return Err(CliError::Usage(format!("community {wanted:?} is not in the membership file")));
                }
            }
            rows.sort_by_key(|&(v, _)| v);
            let vertices: Vec<VertexId> = rows.iter().map(|&(v, _)| v).collect();
            (full.induced_subgraph(&vertices), Some(rows.iter().map(|(_, c)| (*c).clone()).collect()))
        }
        None => (full, None),
    };

    let partition = communities.as_ref().map(|c| Partition::from_labels(c));
    let color = match (a.color_by, attribute) {
        (_, Some(c)) => ColorSource::Attribute {
            name: c.name().to_string(),
            values: g
                .labels()
                .iter()
                .map(|l| attrs.as_ref().and_then(|t| t.value(l, c)).map(str::to_string))
                .collect(),
        },
        (ColorBy::Membership, None) => ColorSource::Partition(partition.as_ref().expect("membership checked above")),
        _ => ColorSource::Uniform,
    };
    let size = match a.size_by {
        SizeBy::Uniform => SizeSource::Uniform,
        SizeBy::Centrality => SizeSource::Scores(
            eigenvector_centrality(&g, DEFAULT_CENTRALITY_TOL, DEFAULT_CENTRALITY_MAX_ITER)
                .map_err(|e| CliError::Precondition(e.to_string()))?,
        ),
    };
    let coords = fruchterman_reingold_with_area(&g, a.iterations, a.area, a.seed);
    let opts = SvgOptions {
        title: a.title.clone(),
        ..SvgOptions::default()
    };
    let svg = render_svg(&g, &coords, &color, &size, &opts);

    rec.seed("seed", a.seed);
    rec.parameters(json!({
        "iterations": a.iterations,
        "area": a.area,
        "color_by": format!("{:?}", a.color_by).to_lowercase(),
        "size_by": format!("{:?}", a.size_by).to_lowercase(),
        "community": a.community,
        "title": a.title,
        "vertices_drawn": g.vertex_count(),
    }));
    rec.write(&a.out, svg.as_bytes())?;
    if let Some(path) = &a.coords {
        let table: BTreeMap<&str, [f64; 2]> = g
            .labels()
            .iter()
            .zip(&coords.positions)
            .map(|(l, &(x, y))| (l.as_str(), [x, y]))
            .collect();
        let mut text = serde_json::to_string_pretty(&table).expect("coordinates serialize");
        text.push('\n');
        rec.write(path, text.as_bytes())?;
    }
    rec.finish(&a.out)
}

fn sizes(a: SizesArgs, argv: &[String]) -> Result<()> {
    let mut rec = Recorder::new("sizes", argv);
    let bytes = rec.read("membership", &a.membership)?;
    let (_, communities) = parse_membership(&a.membership, &bytes)?;
    let p = Partition::from_labels(&communities);
    rec.write(&a.csv, sizes_csv(&p).as_bytes())?;
    rec.write(&a.svg, sizes_svg(&p).as_bytes())?;
    println!("{} communities", p.community_count());
    rec.finish(&a.csv)
}

fn export(a: ExportArgs, argv: &[String]) -> Result<()> {
    let mut rec = Recorder::new("export", argv);
    let format: ExportFormat = a.format.parse().map_err(|e: netcomm_core::export::ExportError| CliError::Usage(e.to_string()))?;
    let g = load_graph(&mut rec, &a.graph)?;
    let attrs = match &a.attrs {
        Some(path) => Some(load_attrs(&mut rec, path)?),
        None => None,
    };
    let partition = match &a.membership {
        Some(path) => Some(load_membership(&mut rec, path, &g)?.total_partition(&g, path)?),
        None => None,
    };
    let doc = export_graph(&g, partition.as_ref(), attrs.as_ref(), format).map_err(|e| CliError::Input(e.to_string()))?;
    rec.parameters(json!({ "format": a.format.to_lowercase() }));
    rec.write(&a.out, doc.as_bytes())?;
    rec.finish(&a.out)
}

fn replay(a: ReplayArgs) -> Result<()> {
    use clap::Parser;

    let m = manifest::load(&a.manifest)?;
    std::env::set_current_dir(&m.cwd).map_err(|e| CliError::input(&m.cwd, e))?;
    let mut changed = Vec::new();
    for input in &m.inputs {
        let bytes = std::fs::read(&input.path).map_err(|e| CliError::input(&input.path, e))?;
        if manifest::sha256_hex(&bytes) != input.sha256 {
            changed.push(input.path.display().to_string());
        }
    }
    if !changed.is_empty() {
        return Err(CliError::Input(format!("inputs changed since the recorded run: {}", changed.join(", "))));
    }
    let before: HashMap<PathBuf, Option<Vec<u8>>> = m
        .outputs
        .iter()
        .map(|p| (p.clone(), std::fs::read(p).ok()))
        .collect();
    let argv: Vec<String> = std::iter::once("netcomm".to_string()).chain(m.args.iter().cloned()).collect();
    let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Input(format!("recorded arguments no longer parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Input("a replay manifest cannot replay itself".into()));
    }
    run(cli, &m.args)?;
    if a.verify {
        let differing: Vec<String> = m
            .outputs
            .iter()
            .filter(|p| before[*p].as_deref() != std::fs::read(p).ok().as_deref())
            .map(|p| p.display().to_string())
            .collect();
        if !differing.is_empty() {
            return Err(CliError::Mismatch(format!("outputs differ from the recorded run: {}", differing.join(", "))));
        }
        println!("reproduced {} output(s) byte-identically", m.outputs.len());
    }
    Ok(())
}
