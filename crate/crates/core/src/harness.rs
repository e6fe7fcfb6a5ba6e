//! Seeded batches: conditioning by graph resampling, analyses, artifacts.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    compute_alpha, detect_renewals, increment_stats, pinning_heights, sleeping_census_at_pins, sup_distance,
    PinCensus, PinningSet, ProfileComparison, RenewalSchedule, SleepingIndex,
};
use crate::dfs::{find_giant_run, DfsTrace, Policy};
use crate::error::{Error, Result};
use crate::graph::{sample_graph, GraphSpec, SparseGraph};
use crate::numeric::{solve_survival, LimitCurve, DEFAULT_CURVE_POINTS, DEFAULT_TOL};
use crate::report;
use crate::svg::emit_svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Artifact {
    Trace,
    Curve,
    Renewals,
    Pins,
    Increments,
    Comparison,
    Svg,
}

impl Artifact {
    pub const ALL: [Artifact; 7] = [
        Artifact::Trace,
        Artifact::Curve,
        Artifact::Renewals,
        Artifact::Pins,
        Artifact::Increments,
        Artifact::Comparison,
        Artifact::Svg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Artifact::Trace => "trace",
            Artifact::Curve => "curve",
            Artifact::Renewals => "renewals",
            Artifact::Pins => "pins",
            Artifact::Increments => "increments",
            Artifact::Comparison => "comparison",
            Artifact::Svg => "svg",
        }
    }

    /// Needs renewal times, hence `c > 1 + eta`.
    pub fn needs_renewals(self) -> bool {
        matches!(self, Artifact::Renewals | Artifact::Pins | Artifact::Increments)
    }
}

impl std::str::FromStr for Artifact {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Artifact::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown artifact {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EmitSet(BTreeSet<Artifact>);

impl EmitSet {
    pub fn none() -> Self {
        EmitSet(BTreeSet::new())
    }

    pub fn all() -> Self {
        Artifact::ALL.into_iter().collect()
    }

    /// Everything except the per-step trace and the SVG.
    pub fn standard() -> Self {
        [Artifact::Curve, Artifact::Renewals, Artifact::Pins, Artifact::Increments, Artifact::Comparison]
            .into_iter()
            .collect()
    }

    pub fn contains(&self, a: Artifact) -> bool {
        self.0.contains(&a)
    }

    pub fn insert(&mut self, a: Artifact) {
        self.0.insert(a);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Artifact> + '_ {
        self.0.iter().copied()
    }

    pub fn needs_renewals(&self) -> bool {
        self.iter().any(Artifact::needs_renewals)
    }

    /// Comma-separated names, e.g. `trace,svg`.
    pub fn parse(list: &str) -> Result<Self> {
        list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect()
    }
}

impl FromIterator<Artifact> for EmitSet {
    fn from_iter<I: IntoIterator<Item = Artifact>>(iter: I) -> Self {
        EmitSet(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub c: f64,
    pub seeds: Vec<u64>,
    pub policy: PolicyKind,
    pub epsilon: f64,
    pub eta: f64,
    /// Acceptance threshold as a fraction of `n`; `None` means `rho_c / 2`.
    pub gamma: Option<f64>,
    pub max_resamples: usize,
    pub curve_points: usize,
    pub emit: EmitSet,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    #[default]
    MinIndex,
    Uniform,
}

impl ExperimentConfig {
    pub const DEFAULT_EPSILON: f64 = 0.02;
    pub const DEFAULT_ETA: f64 = 0.05;
    pub const DEFAULT_MAX_RESAMPLES: usize = 100;

    pub fn new(n: usize, c: f64, seeds: Vec<u64>, out_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            n,
            c,
            seeds,
            policy: PolicyKind::MinIndex,
            epsilon: Self::DEFAULT_EPSILON,
            eta: Self::DEFAULT_ETA,
            gamma: None,
            max_resamples: Self::DEFAULT_MAX_RESAMPLES,
            curve_points: DEFAULT_CURVE_POINTS,
            emit: EmitSet::standard(),
            out_dir: out_dir.into(),
        }
    }

    /// Threshold fraction after defaulting.
    pub fn resolved_gamma(&self) -> Result<f64> {
        let gamma = match self.gamma {
            Some(g) => g,
            None => {
                let rho = solve_survival(self.c, DEFAULT_TOL)?.rho;
                if rho == 0.0 {
                    return Err(Error::invalid(format!("c = {} has no giant component; pass gamma explicitly", self.c)));
                }
                rho / 2.0
            }
        };
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::invalid(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        Ok(gamma)
    }

    pub fn validate(&self) -> Result<()> {
        GraphSpec::new(self.n, self.c, 0)?;
        if !(self.c > 0.0) {
            return Err(Error::invalid(format!("c must be positive, got {}", self.c)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::invalid(format!("eta must be positive, got {}", self.eta)));
        }
        if self.max_resamples == 0 {
            return Err(Error::invalid("max_resamples must be at least 1"));
        }
        if self.curve_points < 2 {
            return Err(Error::invalid("curve needs at least 2 points"));
        }
        if self.emit.needs_renewals() && !(self.c > 1.0 + self.eta) {
            return Err(Error::invalid(format!(
                "renewal analyses need c > 1 + eta, got c = {}, eta = {}",
                self.c, self.eta
            )));
        }
        self.resolved_gamma()?;
        Ok(())
    }

    fn policy_for(&self, graph_seed: u64) -> Policy {
        match self.policy {
            PolicyKind::MinIndex => Policy::MinIndex,
            PolicyKind::Uniform => Policy::Uniform { seed: splitmix64(graph_seed ^ 0xD1B5_4A32_D192_ED03) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: usize,
    pub c: f64,
    pub seed: u64,
    pub resamples_used: usize,
    pub accepted: bool,
    pub component_size: usize,
    pub component_fraction: f64,
    pub max_height_fraction: f64,
    /// Absent when `c <= 1`.
    pub sup_distance: Option<f64>,
    pub degenerate_renewal_fraction: f64,
    /// Every pinning-time census clean; vacuous when no pins exist.
    pub mesoscopic_ok: bool,
    /// Largest degree seen in the sleeping subgraph across censuses.
    pub max_degree: usize,
    pub wall_time_ms: u64,
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Graph seed for the given rejection attempt; attempt 0 is the seed itself.
pub fn derive_seed(seed: u64, attempt: usize) -> u64 {
    if attempt == 0 {
        seed
    } else {
        splitmix64(seed ^ splitmix64(attempt as u64))
    }
}

/// Everything a single conditioned run produces.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub graph_seed: u64,
    pub resamples_used: usize,
    pub accepted: bool,
    pub graph: SparseGraph,
    pub trace: DfsTrace,
    pub alpha: Vec<f64>,
    pub schedule: RenewalSchedule,
    pub curve: Option<LimitCurve>,
    pub comparison: Option<ProfileComparison>,
    pub pins: Option<PinningSet>,
    pub censuses: Vec<PinCensus>,
}

impl SeedRun {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn degenerate_renewal_fraction(&self) -> f64 {
        let top = self.trace.max_height().max(0) as usize;
        if top == 0 {
            return 0.0;
        }
        let regular = self.schedule.regular().len().saturating_sub(1);
        top.saturating_sub(regular) as f64 / top as f64
    }
}

/// Rejection-samples a graph and runs the analyses that do not touch disk.
pub fn simulate_seed(config: &ExperimentConfig, seed: u64) -> Result<SeedRun> {
    let gamma = config.resolved_gamma()?;
    let mut attempt = 0;
    let (graph_seed, graph, run) = loop {
        let graph_seed = derive_seed(seed, attempt);
        let graph = sample_graph(&GraphSpec::new(config.n, config.c, graph_seed)?)?;
        let run = find_giant_run(&graph, gamma, config.policy_for(graph_seed))?;
        attempt += 1;
        if run.accepted || attempt == config.max_resamples {
            break (graph_seed, graph, run);
        }
    };
    let n = graph.n();
    let trace = run.trace;
    let alpha = compute_alpha(&trace, n);
    let schedule = detect_renewals(&trace, n);
    let curve = (config.c > 1.0).then(|| LimitCurve::new(config.c)).transpose()?;
    let comparison = curve.as_ref().map(|curve| sup_distance(&trace, curve, n));
    let (pins, censuses) = if config.c > 1.0 + config.eta {
        let pins = pinning_heights(&trace, &schedule, &alpha, config.epsilon, config.eta, config.c)?;
        let sleeping = SleepingIndex::new(&trace, n);
        let censuses = sleeping_census_at_pins(&graph, &sleeping, &pins);
        (Some(pins), censuses)
    } else {
        (None, Vec::new())
    };
    Ok(SeedRun {
        seed,
        graph_seed,
        resamples_used: attempt - 1,
        accepted: run.accepted,
        graph,
        trace,
        alpha,
        schedule,
        curve,
        comparison,
        pins,
        censuses,
    })
}

fn summarize(config: &ExperimentConfig, run: &SeedRun, wall_time_ms: u64) -> RunSummary {
    let n = run.n();
    RunSummary {
        n,
        c: config.c,
        seed: run.seed,
        resamples_used: run.resamples_used,
        accepted: run.accepted,
        component_size: run.trace.component_size(),
        component_fraction: run.trace.component_size() as f64 / n as f64,
        max_height_fraction: run.trace.max_height().max(0) as f64 / n as f64,
        sup_distance: run.comparison.map(|c| c.sup_distance),
        degenerate_renewal_fraction: run.degenerate_renewal_fraction(),
        mesoscopic_ok: run.censuses.iter().all(PinCensus::ok),
        max_degree: run.censuses.iter().map(|c| c.max_degree).max().unwrap_or(0),
        wall_time_ms,
    }
}

fn seed_dir(out_dir: &Path, seed: u64) -> PathBuf {
    out_dir.join(format!("seed_{seed}"))
}

fn write_seed_artifacts(config: &ExperimentConfig, run: &SeedRun) -> Result<()> {
    let emit = &config.emit;
    let n = run.n();
    let per_seed = [Artifact::Trace, Artifact::Renewals, Artifact::Pins, Artifact::Increments, Artifact::Comparison];
    if per_seed.iter().any(|&a| emit.contains(a)) {
        let dir = seed_dir(&config.out_dir, run.seed);
        fs::create_dir_all(&dir)?;
        if emit.contains(Artifact::Trace) {
            report::write_csv(dir.join("trace.csv"), &report::trace_rows(&run.trace, Some(&run.alpha)))?;
        }
        if emit.contains(Artifact::Renewals) {
            report::write_csv(dir.join("renewals.csv"), &report::renewal_rows(&run.schedule, &run.alpha))?;
        }
        if let (true, Some(pins)) = (emit.contains(Artifact::Pins), &run.pins) {
            report::write_csv(dir.join("pins.csv"), &report::pin_rows(pins))?;
        }
        if emit.contains(Artifact::Increments) {
            let bins = increment_stats(&run.schedule, &run.alpha, config.epsilon, config.c, config.eta)?;
            report::write_csv(dir.join("increments.csv"), &bins)?;
        }
        if let (true, Some(comparison)) = (emit.contains(Artifact::Comparison), &run.comparison) {
            report::write_json(dir.join("comparison.json"), comparison)?;
        }
    }
    if emit.contains(Artifact::Svg) {
        emit_svg(&run.trace, run.curve.as_ref(), n, config.out_dir.join(format!("profile_{}.svg", run.seed)))?;
    }
    Ok(())
}

/// Writes `curve.csv` only.
pub fn write_curve(c: f64, points: usize, out_dir: &Path) -> Result<PathBuf> {
    let curve = LimitCurve::new(c)?;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("curve.csv");
    report::write_csv(&path, &report::curve_rows(&curve.sample(points)))?;
    Ok(path)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    config.validate()?;
    if config.seeds.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(&config.out_dir)?;
    if config.emit.contains(Artifact::Curve) && config.c > 1.0 {
        write_curve(config.c, config.curve_points, &config.out_dir)?;
    }
    let summaries = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let start = Instant::now();
            let run = simulate_seed(config, seed)?;
            write_seed_artifacts(config, &run)?;
            Ok(summarize(config, &run, start.elapsed().as_millis() as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    report::write_json_atomic(config.out_dir.join("summary.json"), &summaries)?;
    Ok(summaries)
}
