use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netcomm_core::community::{LeadingEigenvectorOptions, SpinglassOptions, DEFAULT_WALK_LENGTH};
use netcomm_core::independence::DEFAULT_REPLICATES;
use netcomm_core::layout::{DEFAULT_AREA, DEFAULT_ITERATIONS};
use netcomm_core::netstats::DegreeExponentMethod;
use netcomm_core::Algorithm;

#[derive(Debug, Parser)]
#[command(name = "netcomm", version, about = "Coauthorship networks: statistics, communities and attribute independence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph JSON from publications (JSON lines) or an edge list (TSV).
    Build(BuildArgs),
    /// Whole-network statistics.
    Stats(StatsArgs),
    /// Detect structural communities and write a membership CSV.
    Detect(DetectArgs),
    /// Chi-squared independence of memberships and attributes.
    Chisq(ChisqArgs),
    /// Force-directed layout rendered as SVG.
    Layout(LayoutArgs),
    /// Community size histogram as CSV and SVG.
    Sizes(SizesArgs),
    /// Export a graph as GraphML, DOT or JSON.
    Export(ExportArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Publications, one JSON record per line.
    #[arg(long, conflicts_with = "edges", required_unless_present = "edges")]
    pub pubs: Option<PathBuf>,
    /// Edge list: `src<TAB>dst[<TAB>weight]`.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub graph: PathBuf,
    #[arg(long, default_value = "loglog-ls", value_parser = parse_gamma_method)]
    pub gamma_method: DegreeExponentMethod,
    /// Smallest maximal clique counted.
    #[arg(long, default_value_t = 3)]
    pub min_clique_size: usize,
    /// Report path; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    pub graph: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Algorithm,
    /// Required for spinglass.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run on the largest connected component only.
    #[arg(long)]
    pub largest_component: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Merge hierarchy as JSON (walktrap and eb).
    #[arg(long)]
    pub dendrogram: Option<PathBuf>,
    /// Leading eigenvector tolerance.
    #[arg(long, default_value_t = LeadingEigenvectorOptions::default().tol)]
    pub tol: f64,
    /// Power-iteration cap for large groups (leading eigenvector).
    #[arg(long, default_value_t = LeadingEigenvectorOptions::default().max_iter)]
    pub max_iter: usize,
    /// Random-walk length (walktrap).
    #[arg(long, default_value_t = DEFAULT_WALK_LENGTH)]
    pub walk_length: usize,
    /// Number of spin states (spinglass).
    #[arg(long, default_value_t = SpinglassOptions::default().q_max)]
    pub spins: usize,
    /// Resolution parameter (spinglass).
    #[arg(long, default_value_t = SpinglassOptions::default().gamma)]
    pub gamma: f64,
    #[arg(long, default_value_t = SpinglassOptions::default().t_start)]
    pub start_temp: f64,
    #[arg(long, default_value_t = SpinglassOptions::default().t_stop)]
    pub stop_temp: f64,
    #[arg(long, default_value_t = SpinglassOptions::default().cooling)]
    pub cool_fact: f64,
    #[arg(long, default_value_t = SpinglassOptions::default().sweeps_per_temperature)]
    pub sweeps: usize,
}

#[derive(Debug, Args)]
pub struct ChisqArgs {
    pub graph: PathBuf,
    /// `NAME=PATH` or `PATH` (the name defaults to the file stem). Repeatable.
    #[arg(long, required = true)]
    pub membership: Vec<String>,
    #[arg(long)]
    pub attrs: PathBuf,
    /// department, affiliation, origin, position or all. Repeatable or comma-separated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub characteristic: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long)]
    pub seed: u64,
    /// Report JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the text grid here.
    #[arg(long)]
    pub text: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColorBy {
    None,
    Membership,
    Department,
    Affiliation,
    Origin,
    Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SizeBy {
    Uniform,
    Centrality,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    pub iterations: usize,
    #[arg(long, default_value_t = DEFAULT_AREA)]
    pub area: f64,
    #[arg(long, value_enum, default_value_t = ColorBy::None)]
    pub color_by: ColorBy,
    #[arg(long, value_enum, default_value_t = SizeBy::Uniform)]
    pub size_by: SizeBy,
    #[arg(long)]
    pub membership: Option<PathBuf>,
    #[arg(long)]
    pub attrs: Option<PathBuf>,
    /// Draw only this community (an id from the membership file).
    #[arg(long)]
    pub community: Option<String>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the coordinates as JSON.
    #[arg(long)]
    pub coords: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SizesArgs {
    pub membership: PathBuf,
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub svg: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub graph: PathBuf,
    /// graphml, dot or json.
    #[arg(long)]
    pub format: String,
    #[arg(long)]
    pub membership: Option<PathBuf>,
    #[arg(long)]
    pub attrs: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Compare the regenerated outputs with the existing files.
    #[arg(long)]
    pub verify: bool,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: netcomm_core::community::CommunityError| e.to_string())
}

fn parse_gamma_method(s: &str) -> Result<DegreeExponentMethod, String> {
    s.parse().map_err(|e: netcomm_core::netstats::StatsError| e.to_string())
}
