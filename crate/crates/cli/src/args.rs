use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use homcount_core::{FamilySpec, DEFAULT_EPSILON};

#[derive(Debug, Parser)]
#[command(name = "homcount", version, about = "Explainable node embeddings from weighted rooted homomorphism counts")]
pub struct Cli {
    /// Worker threads; `1` makes every run bit-reproducible.
    #[arg(long, global = true, env = "HOMCOUNT_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a pattern family: names, roots and edge lists.
    Patterns(PatternsArgs),
    /// Embed the nodes of one graph.
    Embed(EmbedCmd),
    /// Brute-force rooted counts for one pattern (ground truth).
    Oracle(OracleArgs),
    /// Generate a synthetic stochastic-block-model dataset.
    GenSbm(GenSbmArgs),
    /// Cross-validate a random forest on embeddings.
    Evaluate(EvaluateArgs),
    /// Dataset -> embeddings -> evaluation report in one run.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Trees,
    BinaryTrees,
    Cycles,
    Paths,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SbmKindArg {
    Cluster,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Bin,
}

fn parse_family(s: &str) -> Result<FamilySpec, String> {
    s.parse().map_err(|e: homcount_core::Error| e.to_string())
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn probability(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if (0.0..=1.0).contains(&x) => Ok(x),
        _ => Err(format!("expected a probability in [0, 1], got `{s}`")),
    }
}

fn node_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected LO:HI, got `{s}`");
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[derive(Debug, Args)]
pub struct PatternsArgs {
    #[arg(long, conflicts_with = "family", requires = "max_order")]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub max_order: Option<usize>,
    /// Family spec such as `trees:6` or `custom:FILE`.
    #[arg(long, value_parser = parse_family, required_unless_present = "kind")]
    pub family: Option<FamilySpec>,
    /// Write the listing here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GraphInput {
    /// Edge list: one `u v` pair per line, `#` comments.
    #[arg(long)]
    pub graph: PathBuf,
    /// Node features, one CSV row per node.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Node count, when trailing nodes are isolated and no features are given.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Replacement for zero feature values.
    #[arg(long, default_value_t = DEFAULT_EPSILON, value_parser = positive)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EmbedArgs {
    /// Pattern family (`trees:K`, `binary_trees:K`, `cycles:K`, `paths:K`, `custom:FILE`); repeatable.
    #[arg(long = "family", value_parser = parse_family, required = true)]
    pub families: Vec<FamilySpec>,
    /// One block of columns per feature channel.
    #[arg(long, conflicts_with_all = ["structural", "channel"])]
    pub tensor: bool,
    /// Ignore features and count plain homomorphisms.
    #[arg(long, conflicts_with = "channel")]
    pub structural: bool,
    /// Feature channel used as weights when neither --tensor nor --structural is set.
    #[arg(long)]
    pub channel: Option<usize>,
    /// Signed log1p scaling of every column.
    #[arg(long, conflicts_with = "density")]
    pub log: bool,
    /// Divide counts by the number of root-fixing vertex maps.
    #[arg(long)]
    pub density: bool,
    /// Append the raw feature columns.
    #[arg(long)]
    pub append_features: bool,
    /// Per-family time budget in seconds; unfinished columns are dropped.
    #[arg(long, value_parser = positive)]
    pub timeout: Option<f64>,
    /// Allow brute-force counting of large general patterns.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct EmbedCmd {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub embed: EmbedArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Prepend a `node_id` column (CSV only).
    #[arg(long)]
    pub node_id: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Canonical pattern name (`C4`, `P3`, `tree5:01211`, ...) or a name from --custom.
    #[arg(long)]
    pub pattern: String,
    /// Custom family file to look the pattern up in.
    #[arg(long)]
    pub custom: Option<PathBuf>,
    /// Only this root node; all nodes otherwise.
    #[arg(long)]
    pub node: Option<usize>,
    #[arg(long, conflicts_with = "channel")]
    pub structural: bool,
    #[arg(long)]
    pub channel: Option<usize>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct GenSbmArgs {
    #[arg(long, value_enum)]
    pub kind: SbmKindArg,
    #[arg(long)]
    pub graphs: Option<usize>,
    /// Node count range `LO:HI`.
    #[arg(long, value_parser = node_range)]
    pub nodes: Option<(usize, usize)>,
    #[arg(long)]
    pub communities: Option<usize>,
    #[arg(long, value_parser = probability)]
    pub p: Option<f64>,
    #[arg(long, value_parser = probability)]
    pub q: Option<f64>,
    #[arg(long, value_parser = probability)]
    pub pattern_p: Option<f64>,
    #[arg(long, value_parser = probability)]
    pub pattern_q: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ForestArgs {
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Embedding files (CSV or binary); rows are stacked in the given order.
    #[arg(long, num_args = 1.., required = true)]
    pub embeddings: Vec<PathBuf>,
    /// One stacked label file, or one per embedding file.
    #[arg(long, num_args = 1.., required = true)]
    pub labels: Vec<PathBuf>,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["dataset", "sbm"]))]
pub struct PipelineArgs {
    /// Dataset directory (meta.json, graph_<i>.edges, ...).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Generate the desk-scale synthetic dataset of this kind instead.
    #[arg(long, value_enum)]
    pub sbm: Option<SbmKindArg>,
    /// Override the generated graph count.
    #[arg(long, requires = "sbm")]
    pub graphs: Option<usize>,
    /// Seed of the generated dataset (the generator default otherwise).
    #[arg(long, requires = "sbm")]
    pub data_seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_EPSILON, value_parser = positive)]
    pub epsilon: f64,
    #[command(flatten)]
    pub embed: EmbedArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub node_id: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}
