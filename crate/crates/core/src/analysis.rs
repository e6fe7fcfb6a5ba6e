//! Quantities read off a contour process: explored fraction, pseudo renewal
//! times, pinning heights, return times and excursion decompositions.

use serde::{Deserialize, Serialize};

use crate::dfs::DfsTrace;
use crate::error::{Error, Result};
use crate::graph::{SparseGraph, UnionFind};
use crate::numeric::{expected_renewal_increment, survival_at_density, HeightTable, LimitCurve};

/// `alpha_n = (X_n + n) / (2N)`, the fraction of vertices that are active or
/// retired after step `n`.
pub fn compute_alpha(trace: &DfsTrace, n_vertices: usize) -> Vec<f64> {
    let n_vertices = n_vertices as f64;
    trace
        .heights()
        .iter()
        .enumerate()
        .map(|(n, &x)| ((x as i64 + n as i64) / 2) as f64 / n_vertices)
        .collect()
}

/// `ceil(sqrt(n))` in integer arithmetic.
pub fn ceil_sqrt(n: usize) -> usize {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Pseudo renewal times of one trace.
///
/// `tau[i]` is the first time after `tau[i - 1]` that the walk sits at height
/// `i` and then stays at or above `i` for more than `ceil(sqrt(N))` steps.
/// When no such time exists the sequence is capped at `2N` from that index on;
/// only the first capped entry is stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenewalSchedule {
    pub sqrt_threshold: usize,
    pub cap: usize,
    pub tau: Vec<usize>,
    pub degenerate_from: Option<usize>,
}

impl RenewalSchedule {
    pub fn is_degenerate(&self, i: usize) -> bool {
        self.degenerate_from.is_some_and(|d| i >= d) || i >= self.tau.len()
    }

    /// `tau_0, ..., tau_m` with every entry below the cap.
    pub fn regular(&self) -> &[usize] {
        &self.tau[..self.degenerate_from.unwrap_or(self.tau.len())]
    }

    /// `tau_{i+1} - tau_i` for consecutive regular indices.
    pub fn increments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.regular().windows(2).enumerate().map(|(i, w)| (i, w[1] - w[0]))
    }
}

const NO_RETURN: u32 = u32::MAX;

/// For every `n`, the first `m > n` with `X_m = X_n - 1`.
fn next_descents(heights: &[i32]) -> Vec<u32> {
    let max = heights.iter().copied().max().unwrap_or(0).max(0) as usize;
    // last_seen[x + 1]: most recent (smallest index > n) time at height x
    let mut last_seen = vec![NO_RETURN; max + 2];
    let mut next = vec![NO_RETURN; heights.len()];
    for n in (0..heights.len()).rev() {
        let x = heights[n];
        if x >= 0 {
            next[n] = last_seen[x as usize];
        }
        last_seen[(x + 1) as usize] = n as u32;
    }
    next
}

/// Linear-time renewal detection: one backward pass for the return times,
/// one forward pass applying the definition.
pub fn detect_renewals(trace: &DfsTrace, n_vertices: usize) -> RenewalSchedule {
    let heights = trace.heights();
    let threshold = ceil_sqrt(n_vertices);
    let cap = 2 * n_vertices;
    let next = next_descents(heights);
    let mut tau = vec![0];
    for n in 1..heights.len() {
        let level = tau.len() as i32;
        if heights[n] == level && next[n] != NO_RETURN && next[n] as usize - n > threshold {
            tau.push(n);
        }
    }
    let degenerate_from = Some(tau.len());
    tau.push(cap);
    RenewalSchedule { sqrt_threshold: threshold, cap, tau, degenerate_from }
}

/// Which vertices sleep at a given time, reconstructed from the trace.
#[derive(Debug, Clone)]
pub struct SleepingIndex {
    discovery: Vec<u32>,
}

impl SleepingIndex {
    pub fn new(trace: &DfsTrace, n_vertices: usize) -> Self {
        SleepingIndex { discovery: trace.discovery_times(n_vertices) }
    }

    /// Whether `v` is in the sleeping set after step `time`.
    pub fn is_sleeping(&self, v: u32, time: usize) -> bool {
        self.discovery[v as usize - 1] as usize > time
    }

    /// Size of the component of `v` in the subgraph induced by the vertices
    /// sleeping after step `time`.
    pub fn sleeping_component_size(&self, g: &SparseGraph, v: u32, time: usize) -> usize {
        if !self.is_sleeping(v, time) {
            return 0;
        }
        let mut seen = std::collections::HashSet::from([v]);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if self.is_sleeping(w, time) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len()
    }
}

/// Pinning heights `h_k = inf{i : alpha_{tau_i} > k eps}` for `k = 1..=K`
/// with `K = floor((1 - (1 + eta)/c) / eps)`, and the return times `zeta_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinningSet {
    pub epsilon: f64,
    pub eta: f64,
    pub k_max: usize,
    /// `h[k - 1]` is `h_k`; truncated at the first undefined level.
    pub h: Vec<usize>,
    pub tau_h: Vec<usize>,
    /// First time at or after `tau_{h_k + 1}` that the walker is back on the
    /// vertex it occupied at `tau_{h_k}`.
    pub zeta: Vec<Option<usize>>,
}

impl PinningSet {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

pub fn pinning_levels(epsilon: f64, eta: f64, c: f64) -> Result<usize> {
    if !(epsilon > 0.0) || !(eta > 0.0) {
        return Err(Error::invalid(format!("epsilon and eta must be positive, got {epsilon}, {eta}")));
    }
    if !(c > 1.0 + eta) {
        return Err(Error::invalid(format!("pinning needs c > 1 + eta, got c = {c}, eta = {eta}")));
    }
    Ok(((1.0 - (1.0 + eta) / c) / epsilon).floor() as usize)
}

pub fn pinning_heights(
    trace: &DfsTrace,
    schedule: &RenewalSchedule,
    alpha: &[f64],
    epsilon: f64,
    eta: f64,
    c: f64,
) -> Result<PinningSet> {
    let k_max = pinning_levels(epsilon, eta, c)?;
    let regular = schedule.regular();
    let mut pins = PinningSet { epsilon, eta, k_max, h: Vec::new(), tau_h: Vec::new(), zeta: Vec::new() };
    let mut i = 0;
    for k in 1..=k_max {
        let level = k as f64 * epsilon;
        while i < regular.len() && alpha[regular[i]] <= level {
            i += 1;
        }
        if i == regular.len() {
            break;
        }
        let tau_h = regular[i];
        let zeta = regular.get(i + 1).and_then(|&next| {
            let anchor = trace.walker(tau_h)?;
            (next..trace.len()).find(|&n| trace.walker(n) == Some(anchor))
        });
        pins.h.push(i);
        pins.tau_h.push(tau_h);
        pins.zeta.push(zeta);
    }
    Ok(pins)
}

/// The walk between two consecutive renewal times: excursions into small
/// sleeping components, then one step into the large one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenewalDecomposition {
    pub index: usize,
    pub excursion_count: usize,
    /// Vertices in each excursion, measured as the size of the sleeping
    /// component entered.
    pub excursion_sizes: Vec<usize>,
    /// Sleeping neighbors of the renewal vertex at the renewal time.
    pub tested_degree: usize,
}

/// Splits `[tau_i, tau_{i+1})` into excursions above level `i` and checks
/// `tau_{i+1} - tau_i = 1 + 2 sum_j W_j` against component sizes measured
/// on the graph.
pub fn decompose_increment(
    trace: &DfsTrace,
    g: &SparseGraph,
    sleeping: &SleepingIndex,
    schedule: &RenewalSchedule,
    i: usize,
) -> Result<RenewalDecomposition> {
    if schedule.is_degenerate(i) || schedule.is_degenerate(i + 1) {
        return Err(Error::DegenerateRenewal(i));
    }
    let (from, to) = (schedule.tau[i], schedule.tau[i + 1]);
    let heights = trace.heights();
    let level = i as i32;
    let fail = |reason: String| Error::Decomposition { index: i, reason };

    let mut excursion_sizes = Vec::new();
    let mut pos = from;
    while pos + 1 < to {
        if heights[pos] != level || heights[pos + 1] != level + 1 {
            return Err(fail(format!("walk leaves level {level} at step {pos}")));
        }
        let entry = pos + 1;
        let end = (entry + 1..to)
            .find(|&m| heights[m] <= level)
            .ok_or_else(|| fail(format!("excursion from step {entry} does not close before {to}")))?;
        if heights[end] != level {
            return Err(fail(format!("walk drops below level {level} at step {end}")));
        }
        let entered = trace
            .walker(entry)
            .ok_or_else(|| fail("trace carries no vertex ids".into()))?;
        let size = sleeping.sleeping_component_size(g, entered, entry - 1);
        if 2 * size != end - pos {
            return Err(fail(format!(
                "excursion of {} steps into a sleeping component of {size} vertices",
                end - pos
            )));
        }
        excursion_sizes.push(size);
        pos = end;
    }
    if heights[to - 1] != level {
        return Err(fail(format!("step into tau_{} does not start at level {level}", i + 1)));
    }
    let total: usize = excursion_sizes.iter().sum();
    if to - from != 1 + 2 * total {
        return Err(fail(format!("increment {} != 1 + 2 * {total}", to - from)));
    }
    let anchor = trace.walker(from).ok_or_else(|| fail("trace carries no vertex ids".into()))?;
    let tested_degree = g.neighbors(anchor).iter().filter(|&&w| sleeping.is_sleeping(w, from)).count();
    Ok(RenewalDecomposition {
        index: i,
        excursion_count: excursion_sizes.len(),
        excursion_sizes,
        tested_degree,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileComparison {
    /// `max_n |X_n / N - h(n / N)|` over the union of both supports.
    pub sup_distance: f64,
    pub max_height_fraction: f64,
    pub argmax_fraction: f64,
    pub component_fraction: f64,
}

/// Uniform distance between the normalized walk and the limit curve.
///
/// Steps run over `0..=max(2|C| - 1, ceil(2 rho_c N))`; the walk counts as 0
/// after it ends and the curve as 0 outside `[0, 2 rho_c]`.
pub fn sup_distance(trace: &DfsTrace, curve: &LimitCurve, n_vertices: usize) -> ProfileComparison {
    let table = HeightTable::new(curve, HeightTable::DEFAULT_NODES_PER_BRANCH);
    sup_distance_with(trace, |t| table.eval(t), curve.span, n_vertices)
}

pub(crate) fn sup_distance_with(
    trace: &DfsTrace,
    height: impl Fn(f64) -> f64,
    span: f64,
    n_vertices: usize,
) -> ProfileComparison {
    let nf = n_vertices as f64;
    let heights = trace.heights();
    let last = (heights.len().saturating_sub(1)).max((span * nf).ceil() as usize);
    let mut sup: f64 = 0.0;
    for n in 0..=last {
        let x = heights.get(n).copied().unwrap_or(0) as f64 / nf;
        sup = sup.max((x - height(n as f64 / nf)).abs());
    }
    let (argmax, max) = heights
        .iter()
        .enumerate()
        .fold((0, 0), |best, (n, &x)| if x > best.1 { (n, x) } else { best });
    ProfileComparison {
        sup_distance: sup,
        max_height_fraction: max as f64 / nf,
        argmax_fraction: argmax as f64 / nf,
        component_fraction: trace.component_size() as f64 / nf,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementBin {
    /// Bin center.
    pub alpha_bin: f64,
    pub mean: f64,
    pub count: usize,
    /// `2 / rho((1 - alpha) c) - 1` at the bin center.
    pub predicted: f64,
}

/// Mean renewal increment per `alpha_{tau_i}` bin. Only bins lying entirely
/// in `(1 - alpha) c > 1 + eta` are reported.
pub fn increment_stats(
    schedule: &RenewalSchedule,
    alpha: &[f64],
    bin_width: f64,
    c: f64,
    eta: f64,
) -> Result<Vec<IncrementBin>> {
    if !(bin_width > 0.0) {
        return Err(Error::invalid(format!("bin width must be positive, got {bin_width}")));
    }
    let mut sums: Vec<(f64, usize)> = Vec::new();
    let regular = schedule.regular();
    for (i, increment) in schedule.increments() {
        let a = alpha[regular[i]];
        let bin = (a / bin_width).floor() as usize;
        let upper = (bin + 1) as f64 * bin_width;
        if (1.0 - upper) * c <= 1.0 + eta {
            continue;
        }
        if sums.len() <= bin {
            sums.resize(bin + 1, (0.0, 0));
        }
        sums[bin].0 += increment as f64;
        sums[bin].1 += 1;
    }
    sums.iter()
        .enumerate()
        .filter(|(_, (_, count))| *count > 0)
        .map(|(bin, &(sum, count))| {
            let center = (bin as f64 + 0.5) * bin_width;
            Ok(IncrementBin {
                alpha_bin: center,
                mean: sum / count as f64,
                count,
                predicted: expected_renewal_increment(c, center)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WayDownRow {
    pub k: usize,
    /// `(zeta_k - tau_{h_k}) / N`.
    pub observed: f64,
    /// `(1 - k eps) rho((1 - k eps) c)`.
    pub predicted: f64,
}

/// Return-time gaps against the giant-component density of the sleeping graph.
pub fn way_down_check(pins: &PinningSet, n_vertices: usize, c: f64) -> Result<Vec<WayDownRow>> {
    let mut rows = Vec::new();
    for (idx, (&tau_h, zeta)) in pins.tau_h.iter().zip(&pins.zeta).enumerate() {
        let Some(zeta) = zeta else { continue };
        let k = idx + 1;
        let remaining = 1.0 - k as f64 * pins.epsilon;
        if remaining < 0.0 {
            continue;
        }
        rows.push(WayDownRow {
            k,
            observed: (zeta - tau_h) as f64 / n_vertices as f64,
            predicted: remaining * survival_at_density(c, k as f64 * pins.epsilon)?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinningGap {
    pub k: usize,
    /// `(h_{k+1} - h_k) / N`.
    pub observed: f64,
    /// `eps rho((1 - k eps) c)`.
    pub predicted: f64,
}

/// Spacing of consecutive pinning heights, for `k` with both `h_k` and
/// `h_{k+1}` defined.
pub fn pinning_gaps(pins: &PinningSet, n_vertices: usize, c: f64) -> Result<Vec<PinningGap>> {
    pins.h
        .windows(2)
        .enumerate()
        .map(|(idx, w)| {
            let k = idx + 1;
            Ok(PinningGap {
                k,
                observed: (w[1] - w[0]) as f64 / n_vertices as f64,
                predicted: pins.epsilon * survival_at_density(c, k as f64 * pins.epsilon)?,
            })
        })
        .collect()
}

/// Census of the sleeping subgraph at one pinning time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinCensus {
    pub k: usize,
    pub time: usize,
    pub largest: usize,
    /// Components with size in `[N^0.1, N^0.9]`.
    pub mesoscopic_components: usize,
    pub max_degree: usize,
    pub no_mesoscopic: bool,
    pub degree_ok: bool,
}

impl PinCensus {
    pub fn ok(&self) -> bool {
        self.no_mesoscopic && self.degree_ok
    }
}

/// Checks the sleeping subgraph at every `tau_{h_k}` for mesoscopic
/// components and for degrees above `ln N`.
/// Censuses the sleeping subgraph at every `tau_{h_k}`.
///
/// Sleeping sets shrink with time, so the pins are visited latest first and
/// vertices are added to one union-find in decreasing order of discovery.
/// Total work is one pass over the graph however many pins there are.
pub fn sleeping_census_at_pins(g: &SparseGraph, sleeping: &SleepingIndex, pins: &PinningSet) -> Vec<PinCensus> {
    let n = g.n();
    let (lo, hi) = ((n as f64).powf(0.1), (n as f64).powf(0.9));
    let meso = |s: usize| usize::from((lo..=hi).contains(&(s as f64)));
    let log_n = (n as f64).ln();

    let mut order: Vec<u32> = g.vertices().collect();
    order.sort_unstable_by_key(|&v| std::cmp::Reverse(sleeping.discovery[v as usize - 1]));

    let mut uf = UnionFind::new(n);
    let mut added = vec![false; n];
    let mut degree = vec![0u32; n];
    let (mut next, mut largest, mut max_degree, mut meso_count) = (0, 0, 0, 0);
    let mut out: Vec<PinCensus> = Vec::with_capacity(pins.len());
    for (idx, &time) in pins.tau_h.iter().enumerate().rev() {
        while next < order.len() && sleeping.is_sleeping(order[next], time) {
            let v = order[next];
            let i = v as usize - 1;
            next += 1;
            added[i] = true;
            largest = largest.max(1);
            meso_count += meso(1);
            for &w in g.neighbors(v) {
                let j = w as usize - 1;
                if !added[j] {
                    continue;
                }
                degree[i] += 1;
                degree[j] += 1;
                max_degree = max_degree.max(degree[i].max(degree[j]) as usize);
                let (si, sj) = (uf.set_size(i), uf.set_size(j));
                if uf.union(i, j) {
                    meso_count = meso_count + meso(si + sj) - meso(si) - meso(sj);
                    largest = largest.max(si + sj);
                }
            }
        }
        out.push(PinCensus {
            k: idx + 1,
            time,
            largest,
            mesoscopic_components: meso_count,
            max_degree,
            no_mesoscopic: meso_count == 0,
            degree_ok: max_degree as f64 <= log_n,
        });
    }
    out.reverse();
    out
}
