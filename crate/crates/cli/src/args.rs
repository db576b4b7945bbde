use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clique_gibbs::estimator::{SamplerKind, DEFAULT_REPETITIONS, DEFAULT_SAMPLE_BUDGET, DEFAULT_SAMPLE_CONSTANT};
use clique_gibbs::model::{ModelConfig, NumberText};
use clique_gibbs::{GibbsModel, Graph};

use crate::error::Failure;

pub const SEED_ENV: &str = "CLIQUE_GIBBS_SEED";

#[derive(Debug, Parser)]
#[command(name = "clique-gibbs", version, about = "Distributed Gibbs sampling and counting on a simulated CongestedClique")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw independent samples and dump them with their Hamiltonians.
    Sample(SampleArgs),
    /// Estimate the partition function (number of colorings, hardcore Z, ...).
    Count(CountArgs),
    /// Run the invariant suites and report pass/fail per check.
    Verify(VerifyArgs),
    /// Sweep sizes and write communication costs as CSV.
    Bench(BenchArgs),
    /// Print the summary of a result saved by `count --json`.
    Show {
        path: PathBuf,
    },
}

#[derive(Debug, Args)]
#[group(id = "graph_source", required = true, multiple = false)]
pub struct GraphArgs {
    /// Inline generator: path:N, cycle:N, kN, star:L, empty:N, reg:N:D:SEED, gnp:N:P:SEED.
    #[arg(long, group = "graph_source")]
    pub graph: Option<String>,
    /// Edge-list file: header `n m`, then `m` lines `u v`.
    #[arg(long, group = "graph_source")]
    pub graph_file: Option<PathBuf>,
}

impl GraphArgs {
    pub fn load(&self) -> Result<Graph, Failure> {
        match (&self.graph, &self.graph_file) {
            (Some(spec), _) => Graph::from_spec(spec).map_err(|e| Failure::usage(e.into())),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::io(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
                Graph::parse_edge_list(&text).map_err(|e| Failure::io(anyhow::anyhow!("{}: {e}", path.display())))
            }
            (None, None) => unreachable!("clap requires a graph source"),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Potts,
    Hardcore,
    Pointer,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, required_unless_present = "config")]
    pub model: Option<Family>,
    /// Number of colors (Potts).
    #[arg(long)]
    pub q: Option<u32>,
    /// Fugacity: decimal, fraction `a/b`, or e^{-beta}.
    #[arg(long, conflicts_with = "beta")]
    pub lambda: Option<String>,
    /// Inverse temperature; `inf` for hard constraints.
    #[arg(long)]
    pub beta: Option<String>,
    /// TOML model config (`model`, `q`, `lambda` or `beta`, `epsilon`).
    #[arg(long, conflicts_with = "model")]
    pub config: Option<PathBuf>,
}

impl ModelArgs {
    pub fn config(&self) -> Result<ModelConfig, Failure> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::io(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
            return ModelConfig::from_toml(&text).map_err(|e| Failure::io(anyhow::anyhow!("{}: {e}", path.display())));
        }
        let model = match self.model.expect("clap requires --model without --config") {
            Family::Potts => "potts",
            Family::Hardcore => "hardcore",
            Family::Pointer => "pointer",
        };
        Ok(ModelConfig {
            model: model.to_string(),
            q: self.q,
            lambda: self.lambda.clone().map(NumberText::Text),
            beta: self.beta.clone().map(NumberText::Text),
            epsilon: None,
        })
    }

    pub fn build(&self, graph: Graph) -> Result<(GibbsModel, ModelConfig), Failure> {
        let config = self.config()?;
        let spec = config.spec().map_err(|e| Failure::usage(e.into()))?;
        let model = spec.build(Arc::new(graph)).map_err(|e| Failure::usage(e.into()))?;
        Ok((model, config))
    }
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Activation probability (default: the one minimizing the contraction bound).
    #[arg(long)]
    pub p: Option<f64>,
    /// Transitions per chain (default: the mixing-time bound).
    #[arg(long)]
    pub t_mix: Option<u64>,
    /// Run outside the fast-mixing regime.
    #[arg(long)]
    pub force: bool,
    /// Master seed.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SamplerArg {
    Reference,
    Cube,
    Fast,
}

impl From<SamplerArg> for SamplerKind {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Reference => SamplerKind::Reference,
            SamplerArg::Cube => SamplerKind::Cube,
            SamplerArg::Fast => SamplerKind::Fast,
        }
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Number of independent samples.
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    /// TV budget per sample (default 1 / (8 chains)).
    #[arg(long)]
    pub delta: Option<f64>,
    /// reference, cube or fast (default: fast for hardcore, cube otherwise).
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerArg>,
    /// Sample dump (CSV); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-machine ledger CSV.
    #[arg(long)]
    pub ledger: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Relative error (falls back to `epsilon` in the config file, then 0.1).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Median-of-r repetitions.
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    pub r: usize,
    /// Samples per schedule term are c_m * len / (eps/2)^2.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_CONSTANT)]
    pub cm: f64,
    /// Refuse runs needing more samples than this.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_BUDGET)]
    pub budget: u64,
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerArg>,
    /// Write the full result record as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Oracle,
    Tv,
    Coupling,
    Ledger,
    Triangle,
    Schedule,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Largest graph size for the oracle suite; machine count for the ledger suite.
    #[arg(long)]
    pub n: Option<usize>,
    /// Restrict the coupling suite to one family.
    #[arg(long, value_enum)]
    pub model: Option<Family>,
    /// Colors for the Potts coupling grid (default: 2D + 1 and 3D).
    #[arg(long)]
    pub q: Option<u32>,
    /// Largest degree in the coupling grid.
    #[arg(long, default_value_t = 4)]
    pub delta_max: usize,
    /// Seeds per configuration in the oracle suite.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// Samples per distribution in the TV suite.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// TV tolerance.
    #[arg(long, default_value_t = 0.05)]
    pub tv: f64,
    /// Coupled trials per grid point.
    #[arg(long, default_value_t = 20_000)]
    pub trials: u64,
    /// Random graphs in the triangle suite (besides all 4-vertex graphs).
    #[arg(long, default_value_t = 200)]
    pub random_graphs: u64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMode {
    /// One cube-simulated batch transition with k = n chains.
    Batch,
    /// Hardcore fast path, k = n chains for a full mixing run.
    Fast,
    /// Exact triangle detection over every graph on n vertices.
    Triangle,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated sizes; empty for a header-only CSV.
    #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "8,27,64")]
    pub n: Vec<String>,
    #[arg(long, value_enum, default_value = "batch")]
    pub mode: BenchMode,
    /// Degree of the random regular graphs.
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Hardcore fugacity (default 0.5 / (degree - 1)).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    /// CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
}
