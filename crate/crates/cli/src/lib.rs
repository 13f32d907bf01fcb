//! Command-line front end: `check`, `repro`, `search` and `sweep`.
//!
//! Exit codes: 0 when nothing is violated and every reproduction matches,
//! 2 when a relation is violated or a reproduction check fails, 1 on bad
//! input.

pub mod commands;
pub mod output;
pub mod scenario_file;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mucorr_core::coefficients::OptimizerBudget;
use mucorr_core::ga::StateMode;
use mucorr_core::infomeasures::RenyiOrder;
use mucorr_core::relations::RelationId;

pub use scenario_file::ScenarioFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mucorr",
    version,
    about = "Check and search mutual-information uncertainty relations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate relations on a scenario file.
    Check(CheckArgs),
    /// Re-run pinned scenarios against their expected values.
    Repro(ReproArgs),
    /// Genetic search for a violation of one relation.
    Search(SearchArgs),
    /// Grid of searches over relations, dimensions and parameters.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    /// Generations per restart of the coefficient optimizer.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Restarts of the coefficient optimizer.
    #[arg(long)]
    pub restarts: Option<usize>,
}

impl BudgetArgs {
    pub fn apply(&self, mut b: OptimizerBudget) -> OptimizerBudget {
        if let Some(g) = self.budget {
            b.generations = g;
        }
        if let Some(r) = self.restarts {
            b.restarts = r;
        }
        b
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Relations to evaluate; defaults to those listed in the file, then to
    /// every relation the scenario supports.
    #[arg(long, value_delimiter = ',')]
    pub relation: Vec<RelationId>,
    /// Rényi order, a positive number or `inf`.
    #[arg(long)]
    pub alpha: Option<RenyiOrder>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Seed of the coefficient optimizer.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("which").required(true).args(["id", "all"]))]
pub struct ReproArgs {
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long)]
    pub all: bool,
    /// Write the scenario as a scenario file.
    #[arg(long, requires = "id")]
    pub export: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GaArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub generations: usize,
    #[arg(long, default_value_t = 25)]
    pub population: usize,
    #[arg(long, default_value_t = 3)]
    pub elite: usize,
    /// State family searched over: pure, mixed or max-entangled.
    #[arg(long, default_value = "pure")]
    pub mode: StateMode,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub relation: RelationId,
    /// Dimensions, as `3`, `2,3,4` or `2..4`.
    #[arg(long)]
    pub dim: String,
    /// Fixed Rényi order; without it the order is part of the genome.
    #[arg(long)]
    pub alpha: Option<RenyiOrder>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[command(flatten)]
    pub ga: GaArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepMethod {
    /// One genetic search per cell.
    Ga,
    /// Independent random scenarios per cell.
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub relation: Vec<RelationId>,
    /// Dimensions, as `3`, `2,3,4` or `2..8`.
    #[arg(long)]
    pub dim: String,
    /// Rényi orders, comma separated; `inf` allowed.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Exponents for the relation that takes one, comma separated.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, value_enum, default_value_t = SweepMethod::Ga)]
    pub method: SweepMethod,
    /// Scenarios per cell for the random method.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[command(flatten)]
    pub ga: GaArgs,
}

/// Parses `3`, `2,3,4` or an inclusive range `2..8`.
pub fn parse_dims(text: &str) -> anyhow::Result<Vec<usize>> {
    let text = text.trim();
    let dims: Vec<usize> = if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|e| anyhow::anyhow!("--dim: `{lo}`: {e}"))?;
        let hi: usize = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|e| anyhow::anyhow!("--dim: `{hi}`: {e}"))?;
        (lo..=hi).collect()
    } else {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse().map_err(|e| anyhow::anyhow!("--dim: `{s}`: {e}")))
            .collect::<anyhow::Result<_>>()?
    };
    if dims.is_empty() {
        anyhow::bail!("--dim: empty range `{text}`");
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        anyhow::bail!("--dim: dimensions start at 2, got {d}");
    }
    Ok(dims)
}

/// Parses a comma-separated list, rejecting an empty one.
pub fn parse_list<T: std::str::FromStr>(flag: &str, text: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let items = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow::anyhow!("{flag}: `{s}`: {e}")))
        .collect::<anyhow::Result<Vec<T>>>()?;
    if items.is_empty() {
        anyhow::bail!("{flag}: empty range");
    }
    Ok(items)
}

fn configure_threads() {
    if let Some(n) = std::env::var("MUCORR_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::Check(a) => commands::check(a),
        Command::Repro(a) => commands::repro(a),
        Command::Search(a) => commands::search(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    }
}
