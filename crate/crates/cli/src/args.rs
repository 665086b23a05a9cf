use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use trieshape::exact::Precision;
use trieshape::mc::MatrixSource;

#[derive(Debug, Parser)]
#[command(
    name = "trieshape",
    version,
    about = "Exact, asymptotic and simulated moments of random trie shapes",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Exact moment table for n = 0..=nmax
    Exact(ExactArgs),
    /// Entropy, variance slope and fluctuation coefficients
    Asym(AsymArgs),
    /// Monte-Carlo summary of (S, K, N)
    Simulate(SimulateArgs),
    /// Whiten simulated (S, K) by a covariance matrix
    Whiten(WhitenArgs),
    /// Joint histogram of standardized (S, K)
    Hist(HistArgs),
    /// Exact vs asymptotic (vs simulated) on a grid of n
    Compare(CompareArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Output format (default depends on the command)
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Write here instead of stdout
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    /// Flat key=value file of defaults; flags on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExactArgs {
    /// Probability of a 1 bit
    #[arg(long)]
    pub p: f64,

    #[arg(long, default_value_t = 1024)]
    pub nmax: usize,

    /// standard or extended
    #[arg(long, default_value = "standard")]
    pub precision: Precision,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct AsymArgs {
    #[arg(long)]
    pub p: f64,

    /// log p / log q = r/l
    #[arg(long, conflicts_with = "irrational")]
    pub ratio: Option<String>,

    /// Treat log p / log q as irrational
    #[arg(long)]
    pub irrational: bool,

    #[arg(long, default_value_t = 5)]
    pub kmax: usize,

    #[arg(long, default_value_t = 2000)]
    pub lmax: usize,

    #[arg(long, default_value_t = 40)]
    pub jmax: usize,

    /// Relative term size at which a series stops
    #[arg(long, default_value_t = 1e-18)]
    pub tol: f64,

    /// Sample F(n) over one period of log2 n instead of listing coefficients
    #[arg(long = "emit-F")]
    #[serde(rename = "emit-F")]
    pub emit_f: bool,

    #[arg(long, default_value_t = 512)]
    pub points: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct RunArgs {
    #[arg(long)]
    pub p: f64,

    /// Number of keys per trie
    #[arg(long)]
    pub n: u64,

    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (0 = one per core); results do not depend on it
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,

    /// Also write every trial as trial,S,K,N to this file
    #[arg(long)]
    #[serde(skip)]
    pub raw_out: Option<PathBuf>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct WhitenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,

    /// exact, sample or asymptotic (default: exact when n <= 30000)
    #[arg(long)]
    pub source: Option<MatrixSource>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct HistArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,

    /// Bins per axis
    #[arg(long, default_value_t = 40)]
    pub bins: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub p: f64,

    /// Smallest n of the grid; the grid doubles up to nmax
    #[arg(long, default_value_t = 256)]
    pub nmin: usize,

    #[arg(long, default_value_t = 4096)]
    pub nmax: usize,

    #[arg(long, default_value = "extended")]
    pub precision: Precision,

    /// Monte-Carlo trials per grid point (0 = skip simulation)
    #[arg(long, default_value_t = 0)]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// Constant added to Var K in the shifted correlation column
    #[arg(long, default_value_t = 1.046)]
    pub kpl_shift: f64,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Exact(a) => &a.output,
            Command::Asym(a) => &a.output,
            Command::Simulate(a) => &a.output,
            Command::Whiten(a) => &a.output,
            Command::Hist(a) => &a.output,
            Command::Compare(a) => &a.output,
        }
    }

    /// The effective configuration as JSON, defaults included.
    pub fn config_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("arguments serialize")
    }

    /// The effective configuration as `key=value` pairs on one line.
    pub fn config_line(&self) -> String {
        match self.config_json() {
            serde_json::Value::Object(map) => map
                .iter()
                .map(|(k, v)| match v {
                    serde_json::Value::String(s) => format!("{k}={s}"),
                    serde_json::Value::Null => format!("{k}=none"),
                    other => format!("{k}={other}"),
                })
                .collect::<Vec<_>>()
                .join(" "),
            other => other.to_string(),
        }
    }
}

/// Turns a flat `key=value` file into flags. Blank lines and lines
/// starting with `#` are skipped; `key=true` becomes a bare switch and
/// `key=false` is dropped.
pub fn config_flags(text: &str) -> Result<Vec<String>, String> {
    let mut flags = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => {
                flags.push(format!("--{key}"));
                flags.push(value.to_string());
            }
        }
    }
    Ok(flags)
}

/// Position of the `--config` value in `argv`, if any.
pub fn find_config(argv: &[String]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

/// Splices flags from the config file in front of the user's own flags so
/// the latter override them.
pub fn merge_config(argv: Vec<String>, file_flags: Vec<String>) -> Vec<String> {
    if argv.len() < 2 || file_flags.is_empty() {
        return argv;
    }
    let mut merged = argv[..2].to_vec();
    merged.extend(file_flags);
    merged.extend_from_slice(&argv[2..]);
    merged
}
