//! Publication records, the coauthorship graph built from them, and
//! per-scholar attribute tables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Read};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: record {id:?} has no authors")]
    NoAuthors { line: usize, id: String },
    #[error("attribute table is missing column {0:?}")]
    MissingColumn(&'static str),
    #[error("duplicate attribute id {0:?}")]
    DuplicateId(String),
    #[error("attribute csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unknown characteristic {0:?} (expected department, affiliation, origin or position)")]
    UnknownCharacteristic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PublicationKind {
    Conference,
    Journal,
    Chapter,
    Book,
    #[serde(other)]
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub id: String,
    pub year: i32,
    pub kind: PublicationKind,
    pub authors: Vec<String>,
}

/// Trims, collapses internal whitespace runs to one space and lowercases.
pub fn normalize_label(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Parses JSON-lines publication records. Blank lines are skipped; author
/// labels are normalized and de-duplicated in first-seen order.
pub fn parse_publications<R: BufRead>(reader: R) -> Result<Vec<PublicationRecord>, IngestError> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut record: PublicationRecord =
            serde_json::from_str(&line).map_err(|e| IngestError::Malformed {
                line: line_no,
                message: e.to_string(),
            })?;
        let mut authors: Vec<String> = Vec::with_capacity(record.authors.len());
        for raw in &record.authors {
            let label = normalize_label(raw);
            if label.is_empty() {
                return Err(IngestError::Malformed {
                    line: line_no,
                    message: "empty author label".into(),
                });
            }
            if !authors.contains(&label) {
                authors.push(label);
            }
        }
        if authors.is_empty() {
            return Err(IngestError::NoAuthors {
                line: line_no,
                id: record.id,
            });
        }
        record.authors = authors;
        records.push(record);
    }
    Ok(records)
}

/// One vertex per distinct author; every coauthoring pair in a record adds
/// one unit of weight to their edge.
pub fn build_coauthorship(publications: &[PublicationRecord]) -> Graph {
    let mut builder = GraphBuilder::new();
    for record in publications {
        let ids: Vec<_> = record.authors.iter().map(|a| builder.vertex(a)).collect();
        for (i, &u) in ids.iter().enumerate() {
            for &v in &ids[i + 1..] {
                if u != v {
                    builder
                        .add_edge(u, v, 1.0)
                        .expect("author vertices were just declared");
                }
            }
        }
    }
    builder.build()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Characteristic {
    Department,
    Affiliation,
    Origin,
    Position,
}

impl Characteristic {
    pub const ALL: [Characteristic; 4] = [
        Characteristic::Department,
        Characteristic::Affiliation,
        Characteristic::Origin,
        Characteristic::Position,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Characteristic::Department => "department",
            Characteristic::Affiliation => "affiliation",
            Characteristic::Origin => "origin",
            Characteristic::Position => "position",
        }
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Characteristic {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Characteristic::ALL
            .into_iter()
            .find(|c| c.name() == s.trim().to_lowercase())
            .ok_or_else(|| IngestError::UnknownCharacteristic(s.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attributes {
    pub department: Option<String>,
    pub affiliation: Option<String>,
    pub origin: Option<String>,
    pub position: Option<String>,
}

impl Attributes {
    pub fn get(&self, c: Characteristic) -> Option<&str> {
        match c {
            Characteristic::Department => self.department.as_deref(),
            Characteristic::Affiliation => self.affiliation.as_deref(),
            Characteristic::Origin => self.origin.as_deref(),
            Characteristic::Position => self.position.as_deref(),
        }
    }

    pub fn set(&mut self, c: Characteristic, value: Option<String>) {
        let slot = match c {
            Characteristic::Department => &mut self.department,
            Characteristic::Affiliation => &mut self.affiliation,
            Characteristic::Origin => &mut self.origin,
            Characteristic::Position => &mut self.position,
        };
        *slot = value;
    }
}

/// Per-scholar attributes keyed by vertex label, in file order.
///
/// Lookups try the exact label first and then the normalized form, so an
/// attribute file keyed by display names still joins against graphs built
/// from normalized publication authors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttributeTable {
    rows: Vec<(String, Attributes)>,
    exact: HashMap<String, usize>,
    normalized: HashMap<String, usize>,
}

impl AttributeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: &str, attributes: Attributes) -> Result<(), IngestError> {
        if self.exact.contains_key(id) {
            return Err(IngestError::DuplicateId(id.to_string()));
        }
        let idx = self.rows.len();
        self.exact.insert(id.to_string(), idx);
        self.normalized.entry(normalize_label(id)).or_insert(idx);
        self.rows.push((id.to_string(), attributes));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Attributes)> {
        self.rows.iter().map(|(id, a)| (id.as_str(), a))
    }

    pub fn get(&self, label: &str) -> Option<&Attributes> {
        self.exact
            .get(label)
            .or_else(|| self.normalized.get(&normalize_label(label)))
            .map(|&i| &self.rows[i].1)
    }

    pub fn value(&self, label: &str, c: Characteristic) -> Option<&str> {
        self.get(label).and_then(|a| a.get(c))
    }
}

const ATTRIBUTE_COLUMNS: [&str; 5] = ["id", "department", "affiliation", "origin", "position"];

/// Loads `id,department,affiliation,origin,position` CSV. Blank cells are
/// null; other values are kept verbatim after trimming.
pub fn load_attributes<R: Read>(reader: R) -> Result<AttributeTable, IngestError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv.headers()?.clone();
    let mut positions = [0usize; 5];
    for (slot, name) in positions.iter_mut().zip(ATTRIBUTE_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or(IngestError::MissingColumn(name))?;
    }
    let mut table = AttributeTable::new();
    for record in csv.records() {
        let record = record?;
        let cell = |i: usize| -> Option<String> {
            record
                .get(positions[i])
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
        };
        let id = cell(0).unwrap_or_default();
        let mut attrs = Attributes::default();
        for (i, c) in Characteristic::ALL.into_iter().enumerate() {
            attrs.set(c, cell(i + 1));
        }
        table.insert(&id, attrs)?;
    }
    Ok(table)
}

/// Value counts for one characteristic, nulls excluded, sorted by count
/// descending then value ascending.
pub fn attribute_frequencies(table: &AttributeTable, c: Characteristic) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, attrs) in table.iter() {
        if let Some(v) = attrs.get(c) {
            *counts.entry(v).or_insert(0) += 1;
        }
    }
    let mut out: Vec<(String, usize)> = counts
        .into_iter()
        .map(|(v, n)| (v.to_string(), n))
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}
