use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use steinops::bcp_indicators::Theorem;

#[derive(Parser, Debug)]
#[command(
    name = "steinops",
    version,
    about = "Exact discrete laws, Stein operator checks and approximation bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate a probability mass function
    Pmf(PmfArgs),
    /// Check that operators annihilate their laws on the indicator basis
    CheckOperator(CheckArgs),
    /// Evaluate one itemized bound against the exact distance
    Bound(BoundArgs),
    /// Evaluate a bound over a grid of models
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CommonArgs {
    /// JSON file with option defaults; command-line flags take precedence
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Output format (default depends on the command)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of standard output
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Truncation tolerance for infinite-support laws
    /// [default: $STEINOPS_TOL, else 1e-12]
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Exit with status 2 when a check or bound is violated
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Poisson,
    Binomial,
    PseudoBinomial,
    Nb,
    Bcp,
    Compound,
    PoissonBinomial,
    Runs,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PmfArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,

    /// Poisson mean (poisson, bcp)
    #[arg(long, visible_alias = "lambda")]
    #[serde(alias = "lambda")]
    pub alpha: Option<f64>,

    /// Number of trials (binomial, runs)
    #[arg(long)]
    pub n: Option<u64>,

    /// Success probability (binomial, pseudo-binomial, bcp)
    #[arg(long)]
    pub p: Option<f64>,

    /// Non-integer exponent (pseudo-binomial)
    #[arg(long)]
    pub m_tilde: Option<f64>,

    /// Shape (nb)
    #[arg(long)]
    pub r: Option<f64>,

    /// Success probability p̄ (nb)
    #[arg(long)]
    pub p_bar: Option<f64>,

    /// Binomial size (bcp)
    #[arg(long)]
    pub m: Option<u64>,

    /// Trial success probability (runs)
    #[arg(long)]
    pub pstar: Option<f64>,

    /// Counting law as `a=..,b=..` with `(k+1)μ_{k+1}/μ_k = a + b k` (compound)
    #[arg(long)]
    pub panjer: Option<String>,

    /// Severity masses as CSV `index,mass` or a JSON array (compound)
    #[arg(long)]
    pub severity: Option<PathBuf>,

    /// Success probabilities as a JSON array or CSV column (poisson-binomial)
    #[arg(long)]
    pub probs: Option<PathBuf>,

    /// Also compute a compound law by convolution powers and report the distance
    #[arg(long)]
    pub cross_check: bool,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckArgs {
    /// Catalog grid as JSON (default: the built-in grid)
    #[arg(long)]
    pub grid: Option<PathBuf>,

    /// Largest acceptable defect
    #[arg(long)]
    pub threshold: Option<f64>,

    /// Single operator instead of the grid, e.g. `poisson:lambda=1`
    #[arg(long, requires = "law")]
    pub operator: Option<String>,

    /// Law paired with `--operator`, e.g. `poisson:alpha=2`
    #[arg(long, requires = "operator")]
    pub law: Option<String>,
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    s.parse()
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundArgs {
    /// thm41, cor42, thm44, cor45 or cor48
    #[arg(long, value_parser = parse_theorem)]
    pub theorem: Option<Theorem>,

    /// Independent success probabilities (JSON array or CSV column)
    #[arg(long)]
    pub probs: Option<PathBuf>,

    /// Indicator model as JSON with `kind` independent, joint or runs
    #[arg(long, conflicts_with = "probs")]
    pub model: Option<PathBuf>,

    /// Number of trials of a runs model
    #[arg(long)]
    pub n: Option<usize>,

    /// Trial success probability of a runs model
    #[arg(long)]
    pub pstar: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepFamily {
    /// First half at the first level, second half at the second
    TwoLevel,
    /// All probabilities at the first level
    Equal,
    /// Evenly spaced from the first level up to the second
    Linear,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_theorem)]
    pub theorem: Option<Theorem>,

    /// Shape of the independent probability vectors [default: two-level]
    #[arg(long, value_enum)]
    pub family: Option<SweepFamily>,

    /// Model sizes, comma separated (trials for cor48, indicators otherwise)
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,

    /// Probability levels for the family [default: 1/6,1/12]
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,

    /// Trial success probabilities for cor48, comma separated
    #[arg(long, value_delimiter = ',')]
    pub pstars: Option<Vec<f64>>,
}
