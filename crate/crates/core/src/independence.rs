//! Community × attribute contingency tables and Pearson's chi-squared test
//! with Monte Carlo p-values.
//!
//! The null distribution is simulated by uniformly permuting attribute
//! values against community labels, which keeps both table margins fixed.
//! Replicate `b` draws from ChaCha stream `b` of the caller's seed, so the
//! p-value is identical however the replicates are scheduled.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::community::{detect, Algorithm, DetectionParams, Partition};
use crate::graph::Graph;
use crate::ingest::{AttributeTable, Characteristic};

pub const DEFAULT_REPLICATES: usize = 2000;
pub const MIN_REPLICATES: usize = 99;
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndependenceError {
    #[error("no vertex has a non-null {0}")]
    EmptyTable(Characteristic),
    #[error("chi-squared needs at least a 2x2 table, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },
    #[error("at least {MIN_REPLICATES} replicates are required, got {0}")]
    TooFewReplicates(usize),
    #[error("{labels} vertex labels for a partition over {vertices} vertices")]
    LabelCount { labels: usize, vertices: usize },
    #[error("ragged count matrix")]
    Ragged,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// Attribute values, ascending.
    pub row_labels: Vec<String>,
    /// Community ids, ascending.
    pub col_labels: Vec<usize>,
    counts: Vec<u64>,
    /// Vertices left out because their attribute is null.
    pub nulls_excluded: usize,
}

impl ContingencyTable {
    pub fn from_counts(
        row_labels: Vec<String>,
        col_labels: Vec<usize>,
        counts: &[Vec<u64>],
        nulls_excluded: usize,
    ) -> Result<Self, IndependenceError> {
        if counts.len() != row_labels.len() || counts.iter().any(|r| r.len() != col_labels.len()) {
            return Err(IndependenceError::Ragged);
        }
        Ok(ContingencyTable {
            row_labels,
            col_labels,
            counts: counts.concat(),
            nulls_excluded,
        })
    }

    /// An unlabelled table, for tests and ad-hoc use.
    pub fn from_matrix(counts: &[Vec<u64>]) -> Result<Self, IndependenceError> {
        let cols = counts.first().map_or(0, Vec::len);
        Self::from_counts(
            (0..counts.len()).map(|r| r.to_string()).collect(),
            (0..cols).collect(),
            counts,
            0,
        )
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn count(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols() + col]
    }

    pub fn matrix(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.cols().max(1)).map(<[u64]>::to_vec).collect()
    }

    pub fn row_margins(&self) -> Vec<u64> {
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.count(r, c)).sum())
            .collect()
    }

    pub fn col_margins(&self) -> Vec<u64> {
        (0..self.cols())
            .map(|c| (0..self.rows()).map(|r| self.count(r, c)).sum())
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Nominal degrees of freedom `(r-1)(c-1)`.
    pub fn degrees_of_freedom(&self) -> usize {
        self.rows().saturating_sub(1) * self.cols().saturating_sub(1)
    }

    /// One `(row, col)` pair per counted vertex.
    fn observations(&self) -> (Vec<usize>, Vec<usize>) {
        let mut rows = Vec::with_capacity(self.total() as usize);
        let mut cols = Vec::with_capacity(self.total() as usize);
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                for _ in 0..self.count(r, c) {
                    rows.push(r);
                    cols.push(c);
                }
            }
        }
        (rows, cols)
    }

    /// The table produced by Monte Carlo replicate `index` under `seed`.
    pub fn replicate(&self, seed: u64, index: u64) -> ContingencyTable {
        let (mut rows, cols) = self.observations();
        permute(&mut rows, seed, index);
        let mut counts = vec![0u64; self.counts.len()];
        for (r, c) in rows.iter().zip(&cols) {
            counts[r * self.cols() + c] += 1;
        }
        ContingencyTable {
            counts,
            ..self.clone()
        }
    }
}

fn permute(labels: &mut [usize], seed: u64, index: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    labels.shuffle(&mut rng);
}

/// Cross-tabulates attribute value against community for the vertices of
/// `p`, where `labels[v]` names vertex `v`. Vertices whose value is null
/// (or who are missing from the table) are excluded and counted; empty rows
/// and columns never appear.
pub fn contingency_table(
    labels: &[String],
    p: &Partition,
    attrs: &AttributeTable,
    characteristic: Characteristic,
) -> Result<ContingencyTable, IndependenceError> {
    if labels.len() != p.len() {
        return Err(IndependenceError::LabelCount {
            labels: labels.len(),
            vertices: p.len(),
        });
    }
    let mut cells: BTreeMap<(&str, usize), u64> = BTreeMap::new();
    let mut nulls = 0;
    for (v, label) in labels.iter().enumerate() {
        match attrs.value(label, characteristic) {
            Some(value) => *cells.entry((value, p.community_of(v))).or_insert(0) += 1,
            None => nulls += 1,
        }
    }
    if cells.is_empty() {
        return Err(IndependenceError::EmptyTable(characteristic));
    }
    let mut row_labels: Vec<String> = cells.keys().map(|(r, _)| r.to_string()).collect();
    row_labels.dedup();
    let mut col_labels: Vec<usize> = cells.keys().map(|&(_, c)| c).collect();
    col_labels.sort_unstable();
    col_labels.dedup();
    let mut counts = vec![vec![0u64; col_labels.len()]; row_labels.len()];
    for ((value, community), n) in cells {
        let r = row_labels.binary_search_by(|l| l.as_str().cmp(value)).unwrap();
        let c = col_labels.binary_search(&community).unwrap();
        counts[r][c] = n;
    }
    ContingencyTable::from_counts(row_labels, col_labels, &counts, nulls)
}

struct Expected {
    values: Vec<f64>,
}

impl Expected {
    fn of(t: &ContingencyTable) -> Result<Self, IndependenceError> {
        if t.rows() < 2 || t.cols() < 2 || t.total() == 0 {
            return Err(IndependenceError::Shape {
                rows: t.rows(),
                cols: t.cols(),
            });
        }
        let total = t.total() as f64;
        let rm = t.row_margins();
        let cm = t.col_margins();
        let mut values = Vec::with_capacity(t.rows() * t.cols());
        for &r in &rm {
            for &c in &cm {
                values.push(r as f64 * c as f64 / total);
            }
        }
        Ok(Expected { values })
    }

    fn statistic(&self, counts: &[u64]) -> f64 {
        counts
            .iter()
            .zip(&self.values)
            .filter(|(_, &e)| e > 0.0)
            .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
            .sum()
    }
}

/// Pearson's `Σ (O - E)² / E` with `E = row margin · column margin / N`.
pub fn chi_square_statistic(t: &ContingencyTable) -> Result<f64, IndependenceError> {
    Ok(Expected::of(t)?.statistic(&t.counts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    /// Reported for reference only; the p-value is simulated.
    pub df: usize,
    #[serde(rename = "B")]
    pub replicates: usize,
    #[serde(rename = "p")]
    pub p_value: f64,
    pub seed: u64,
    pub nulls_excluded: usize,
}

impl ChiSquareResult {
    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

/// Monte Carlo p-value `(1 + #{replicates ≥ observed}) / (1 + B)`.
pub fn monte_carlo_p(t: &ContingencyTable, replicates: usize, seed: u64) -> Result<ChiSquareResult, IndependenceError> {
    if replicates < MIN_REPLICATES {
        return Err(IndependenceError::TooFewReplicates(replicates));
    }
    let expected = Expected::of(t)?;
    let observed = expected.statistic(&t.counts);
    // Same relative slack as R's chisq.test so ties with the observed value count.
    let threshold = observed * (1.0 - 64.0 * f64::EPSILON);
    let (rows, cols) = t.observations();
    let width = t.cols();
    let exceed: usize = (0..replicates as u64)
        .into_par_iter()
        .map_init(
            || (rows.clone(), vec![0u64; t.counts.len()]),
            |(shuffled, counts), b| {
                shuffled.copy_from_slice(&rows);
                permute(shuffled, seed, b);
                counts.iter_mut().for_each(|c| *c = 0);
                for (r, c) in shuffled.iter().zip(&cols) {
                    counts[r * width + c] += 1;
                }
                usize::from(expected.statistic(counts) >= threshold)
            },
        )
        .sum();
    Ok(ChiSquareResult {
        statistic: observed,
        df: t.degrees_of_freedom(),
        replicates,
        p_value: (1 + exceed) as f64 / (1 + replicates) as f64,
        seed,
        nulls_excluded: t.nulls_excluded,
    })
}

/// One column of a report: a named partition over (a subset of) the graph.
#[derive(Debug, Clone)]
pub struct ReportColumn {
    pub name: String,
    /// Vertex labels aligned with the partition.
    pub labels: Vec<String>,
    pub partition: Result<Partition, String>,
    /// Graph vertices not covered by this partition.
    pub excluded_vertices: usize,
}

#[derive(Debug, Clone)]
pub struct IndependenceReport {
    pub characteristics: Vec<Characteristic>,
    pub columns: Vec<ReportColumn>,
    /// Null count per characteristic over the whole graph.
    pub null_values: Vec<usize>,
    /// `cells[characteristic][column]`; failures are kept in-cell.
    pub cells: Vec<Vec<Result<ChiSquareResult, String>>>,
    pub replicates: usize,
    pub seed: u64,
}

/// Tests every characteristic against every column. A failing cell never
/// aborts the rest of the grid.
pub fn independence_grid(
    graph_labels: &[String],
    columns: Vec<ReportColumn>,
    attrs: &AttributeTable,
    characteristics: &[Characteristic],
    replicates: usize,
    seed: u64,
) -> IndependenceReport {
    let null_values = characteristics
        .iter()
        .map(|&c| {
            graph_labels
                .iter()
                .filter(|l| attrs.value(l, c).is_none())
                .count()
        })
        .collect();
    let cells = characteristics
        .iter()
        .map(|&c| {
            columns
                .iter()
                .map(|col| {
                    let p = col.partition.as_ref().map_err(Clone::clone)?;
                    let table = contingency_table(&col.labels, p, attrs, c).map_err(|e| e.to_string())?;
                    monte_carlo_p(&table, replicates, seed).map_err(|e| e.to_string())
                })
                .collect()
        })
        .collect();
    IndependenceReport {
        characteristics: characteristics.to_vec(),
        columns,
        null_values,
        cells,
        replicates,
        seed,
    }
}

/// Runs each algorithm on `g` and tests the result against every
/// characteristic. Spinglass runs on the largest connected component; the
/// number of vertices it leaves out is recorded on its column.
pub fn independence_report(
    g: &Graph,
    attrs: &AttributeTable,
    algorithms: &[Algorithm],
    characteristics: &[Characteristic],
    params: &DetectionParams,
    replicates: usize,
    seed: u64,
) -> IndependenceReport {
    let columns = algorithms
        .iter()
        .map(|&algorithm| {
            let (graph, excluded) = if algorithm == Algorithm::Spinglass {
                largest_component(g)
            } else {
                (g.clone(), 0)
            };
            ReportColumn {
                name: algorithm.abbreviation().to_string(),
                labels: graph.labels().to_vec(),
                partition: detect(&graph, algorithm, params, seed).map_err(|e| e.to_string()),
                excluded_vertices: excluded,
            }
        })
        .collect();
    independence_grid(g.labels(), columns, attrs, characteristics, replicates, seed)
}

/// The largest connected component and how many vertices it leaves out.
pub fn largest_component(g: &Graph) -> (Graph, usize) {
    let components = g.connected_components();
    match components.largest() {
        Some(members) => (g.induced_subgraph(members), g.vertex_count() - members.len()),
        None => (g.clone(), 0),
    }
}

impl IndependenceReport {
    /// `{characteristic: {column: {statistic, df, B, p, seed, nulls_excluded}}}`
    pub fn to_json_value(&self) -> Value {
        let mut root = Map::new();
        for (ci, c) in self.characteristics.iter().enumerate() {
            let mut row = Map::new();
            for (col, cell) in self.columns.iter().zip(&self.cells[ci]) {
                let value = match cell {
                    Ok(r) => serde_json::to_value(r).expect("result serializes"),
                    Err(e) => json!({ "error": e }),
                };
                row.insert(col.name.clone(), value);
            }
            root.insert(c.name().to_string(), Value::Object(row));
        }
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain-text grid: one row per characteristic with its null count and
    /// one p-value per column. `*` marks p ≤ 0.05.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<16}{:>12}", "characteristic", "null values");
        for col in &self.columns {
            let _ = write!(out, "{:>11}", col.name);
        }
        out.push('\n');
        let mut notes = Vec::new();
        for (ci, c) in self.characteristics.iter().enumerate() {
            let _ = write!(out, "{:<16}{:>12}", c.name(), self.null_values[ci]);
            for (col, cell) in self.columns.iter().zip(&self.cells[ci]) {
                match cell {
                    Ok(r) => {
                        let mark = if r.is_significant(SIGNIFICANCE) { "*" } else { " " };
                        let _ = write!(out, "{:>10.4}{mark}", r.p_value);
                    }
                    Err(e) => {
                        let _ = write!(out, "{:>10} ", "n/a");
                        notes.push(format!("{} / {}: {e}", c.name(), col.name));
                    }
                }
            }
            out.push('\n');
        }
        let _ = writeln!(out, "\nB = {}, seed = {}; * marks p <= {SIGNIFICANCE}", self.replicates, self.seed);
        for col in self.columns.iter().filter(|c| c.excluded_vertices > 0) {
            let _ = writeln!(out, "{}: {} vertices outside the largest component were left out", col.name, col.excluded_vertices);
        }
        for note in notes {
            let _ = writeln!(out, "{note}");
        }
        out
    }
}
