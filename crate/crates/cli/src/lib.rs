//! Argument parsing for the `dfs-shape` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use dfs_shape::harness::{EmitSet, ExperimentConfig, PolicyKind};
use dfs_shape::numeric::DEFAULT_CURVE_POINTS;

pub const SEED_ENV: &str = "DFS_SHAPE_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    MinIndex,
    Uniform,
}

/// Simulate depth-first search on G(N, c/N) and compare its contour with the
/// limiting profile.
#[derive(Debug, Parser)]
#[command(name = "dfs-shape", version, arg_required_else_help = true, allow_negative_numbers = true)]
struct Args {
    /// Number of vertices.
    #[arg(long)]
    n: Option<usize>,
    /// Mean degree; edges appear with probability min(c/n, 1).
    #[arg(long)]
    c: f64,
    /// Run seed; repeat for several runs.
    #[arg(long = "seed")]
    seeds: Vec<u64>,
    /// File with one seed per line; `#` starts a comment.
    #[arg(long)]
    seeds_file: Option<PathBuf>,
    /// Number of consecutive seeds starting at the base seed.
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_enum, default_value = "min-index")]
    policy: PolicyArg,
    /// Pinning level spacing, also the increment bin width.
    #[arg(long, default_value_t = ExperimentConfig::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Margin above criticality for renewal analyses.
    #[arg(long, default_value_t = ExperimentConfig::DEFAULT_ETA)]
    eta: f64,
    /// Acceptance threshold as a fraction of n [default: rho_c / 2].
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = ExperimentConfig::DEFAULT_MAX_RESAMPLES)]
    max_resamples: usize,
    /// Comma-separated subset of trace,curve,renewals,pins,increments,comparison,svg.
    #[arg(long, default_value = "curve,renewals,pins,increments,comparison")]
    emit: String,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Only write curve.csv; no simulation.
    #[arg(long)]
    curve_only: bool,
    /// Samples in curve.csv.
    #[arg(long, default_value_t = DEFAULT_CURVE_POINTS)]
    curve_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub config: ExperimentConfig,
    pub curve_only: bool,
}

/// A rejected command line. `informational` is set for `--help` and
/// `--version`, which exit successfully.
#[derive(Debug)]
pub struct UsageError {
    pub message: String,
    pub informational: bool,
}

impl UsageError {
    fn new(message: impl Into<String>) -> Self {
        UsageError { message: message.into(), informational: false }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

fn read_seeds_file(path: &PathBuf) -> Result<Vec<u64>, UsageError> {
    let text = fs::read_to_string(path)
        .map_err(|e| UsageError::new(format!("cannot read seeds file {}: {e}", path.display())))?;
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty())
        .map(|line| line.parse().map_err(|_| UsageError::new(format!("bad seed {line:?} in {}", path.display()))))
        .collect()
}

/// Parses `argv` (program name first). `env_seed` is the value of
/// `DFS_SHAPE_SEED`, used as the base seed when none is given.
pub fn parse_cli<I, T>(argv: I, env_seed: Option<&str>) -> Result<Invocation, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| UsageError {
        informational: matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion),
        message: e.render().to_string(),
    })?;

    let emit = EmitSet::parse(&args.emit).map_err(|e| UsageError::new(e.to_string()))?;
    let mut config = ExperimentConfig::new(args.n.unwrap_or(1), args.c, Vec::new(), args.out_dir);
    config.policy = match args.policy {
        PolicyArg::MinIndex => PolicyKind::MinIndex,
        PolicyArg::Uniform => PolicyKind::Uniform,
    };
    config.epsilon = args.epsilon;
    config.eta = args.eta;
    config.gamma = args.gamma;
    config.max_resamples = args.max_resamples;
    config.curve_points = args.curve_points;
    config.emit = emit;

    if config.emit.needs_renewals() && !args.curve_only && !(args.c > 1.0 + args.eta) {
        return Err(UsageError::new(format!(
            "renewal analyses need c > 1 + eta, got c = {}, eta = {}; drop renewals, pins and increments from --emit",
            args.c, args.eta
        )));
    }
    if args.curve_only {
        if !(args.c > 1.0) {
            return Err(UsageError::new(format!("--curve-only needs c > 1, got {}", args.c)));
        }
        if args.curve_points < 2 {
            return Err(UsageError::new("--curve-points must be at least 2"));
        }
        return Ok(Invocation { config, curve_only: true });
    }
    config.n = args.n.ok_or_else(|| UsageError::new("--n is required unless --curve-only is given"))?;

    let mut seeds = args.seeds;
    if let Some(path) = &args.seeds_file {
        seeds.extend(read_seeds_file(path)?);
    }
    if let Some(runs) = args.runs {
        if seeds.len() > 1 {
            return Err(UsageError::new("--runs expands a single base seed; got several seeds"));
        }
        let base = match seeds.first() {
            Some(&s) => s,
            None => env_base(env_seed)?,
        };
        seeds = (0..runs as u64).map(|i| base.wrapping_add(i)).collect();
    } else if seeds.is_empty() {
        seeds.push(env_base(env_seed)?);
    }
    config.seeds = seeds;
    config.validate().map_err(|e| UsageError::new(e.to_string()))?;
    Ok(Invocation { config, curve_only: false })
}

fn env_base(env_seed: Option<&str>) -> Result<u64, UsageError> {
    match env_seed {
        None => Ok(0),
        Some(s) => s.trim().parse().map_err(|_| UsageError::new(format!("{SEED_ENV}={s:?} is not a u64 seed"))),
    }
}
