use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::copula::Family;

#[derive(Debug, Parser)]
#[command(name = "tailrisk", version, about = "Bayesian joint tail-risk estimation with Archimedean copulas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one or both families to paired measurements and report tail risks.
    Fit(FitArgs),
    /// Run a coverage study on simulated data.
    Simulate(SimArgs),
    /// Emit plot-ready posterior densities of the tail risks.
    PlotData(PlotArgs),
    /// Compute and store the Fisher-information table behind the prior.
    Fisher(FisherArgs),
}

/// `clayton`, `gumbel` or `both`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyChoice {
    One(Family),
    Both,
}

impl FamilyChoice {
    pub fn families(self) -> Vec<Family> {
        match self {
            FamilyChoice::One(f) => vec![f],
            FamilyChoice::Both => Family::ALL.to_vec(),
        }
    }
}

impl FromStr for FamilyChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("both") {
            return Ok(FamilyChoice::Both);
        }
        s.parse::<Family>()
            .map(FamilyChoice::One)
            .map_err(|_| format!("unknown family {s:?} (expected clayton, gumbel or both)"))
    }
}

/// Options shared by every command that builds a prior.
#[derive(Debug, Clone, Default, Args)]
pub struct PriorArgs {
    /// Lower truncation bound for theta.
    #[arg(long)]
    pub theta_min: Option<f64>,
    /// Upper truncation bound for theta.
    #[arg(long)]
    pub theta_max: Option<f64>,
    /// Monte-Carlo draws per Fisher-table node.
    #[arg(long)]
    pub fisher_draws: Option<usize>,
    /// Number of Fisher-table nodes.
    #[arg(long)]
    pub fisher_nodes: Option<usize>,
    /// Directory of cached Fisher tables (fisher_<family>.txt).
    #[arg(long)]
    pub fisher_cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FitArgs {
    /// key = value config file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output path (JSON report; a directory for plot-data).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// clayton, gumbel or both.
    #[arg(long)]
    pub family: Option<FamilyChoice>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Credible level.
    #[arg(long)]
    pub level: Option<f64>,
    /// Posterior theta-grid size.
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Seed of the Fisher-information Monte Carlo.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Column names x,y[,id].
    #[arg(long)]
    pub columns: Option<String>,
    /// Fail on malformed numeric text instead of dropping the row.
    #[arg(long)]
    pub strict_parse: bool,
    /// Skip the delta-method intervals.
    #[arg(long)]
    pub no_delta: bool,
    #[command(flatten)]
    pub prior: PriorArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Also write the raw and pseudo-observation scatter data.
    #[arg(long)]
    pub scatter: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// clayton or gumbel.
    #[arg(long)]
    pub family: Option<Family>,
    /// True dependence parameter.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Sample size per replicate.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Base seed of the simulated datasets.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seed of the Fisher-information Monte Carlo.
    #[arg(long)]
    pub prior_seed: Option<u64>,
    /// Re-rank simulated pairs into pseudo-observations before fitting.
    #[arg(long)]
    pub rerank: bool,
    /// JSON report path; per-replicate CSV goes next to it unless --csv is set.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Per-replicate CSV path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub prior: PriorArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FisherArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// clayton, gumbel or both.
    #[arg(long)]
    pub family: Option<FamilyChoice>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Table file (single family only).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub prior: PriorArgs,
}
