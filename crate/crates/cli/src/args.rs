use std::path::PathBuf;

use backbone_core::graph::DEFAULT_ZIPF_EXPONENT;
use backbone_core::sim::ReplacementPolicy;
use backbone_core::BackboneMode;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "backbone",
    version,
    about = "Bipartite graph restructuring and buffer locality simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic semantic graph.
    Gen(GenArgs),
    /// Decouple, recouple and recursively split one graph or a directory of graphs.
    Restructure(RestructureArgs),
    /// Simulate baseline and restructured aggregation against a finite buffer.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Uniform,
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Konig,
    PaperLiteral,
}

impl From<ModeArg> for BackboneMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Konig => BackboneMode::Konig,
            ModeArg::PaperLiteral => BackboneMode::PaperLiteral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Lru,
    Fifo,
}

impl From<PolicyArg> for ReplacementPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Lru => ReplacementPolicy::Lru,
            PolicyArg::Fifo => ReplacementPolicy::Fifo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    pub kind: GenKind,
    #[arg(long)]
    pub num_src: usize,
    #[arg(long)]
    pub num_dst: usize,
    #[arg(long)]
    pub num_edges: usize,
    /// Zipf exponent for power-law destination degrees.
    #[arg(long, default_value_t = DEFAULT_ZIPF_EXPONENT)]
    pub exponent: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Feature elements per vertex (4 bytes each).
    #[arg(long)]
    pub feature_dim: Option<usize>,
    /// File stem of the written `.edges` / `.meta` pair.
    #[arg(long, default_value = "graph")]
    pub name: String,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// An `.edges` file (with `.meta` sidecar) or a directory of them.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long, value_enum, default_value = "konig")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 2)]
    pub max_depth: usize,
    /// Split a child while its stationary side exceeds theta × capacity.
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Buffer capacity in vector slots; defaults to the on-chip buffer size
    /// divided by the graph's vector size.
    #[arg(long)]
    pub capacity: Option<usize>,
    /// Accepted for run-config symmetry; every stage is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RestructureArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, value_enum, default_value = "lru")]
    pub policy: PolicyArg,
    /// Keep each subgraph's stationary side resident.
    #[arg(long)]
    pub pin_backbone: bool,
    /// Start every subgraph with an empty buffer.
    #[arg(long)]
    pub isolate_subgraphs: bool,
    /// Bytes per buffer slot; defaults to the larger feature vector of the graph.
    #[arg(long)]
    pub vector_bytes: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}
