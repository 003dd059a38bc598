//! Coauthorship network analysis.
//!
//! Builds weighted coauthorship graphs from publication records, detects
//! structural communities (leading eigenvector, walktrap, edge betweenness,
//! spinglass), summarizes the network, and tests whether detected
//! communities are independent of per-scholar attributes using Pearson's
//! chi-squared statistic with Monte Carlo p-values.

pub mod community;
pub mod export;
pub mod graph;
pub mod independence;
pub mod ingest;
pub mod layout;
pub mod netstats;
pub mod render;

pub use community::{Algorithm, Dendrogram, Partition};
pub use graph::{ComponentDecomposition, Graph};
pub use ingest::{AttributeTable, Characteristic, PublicationRecord};
