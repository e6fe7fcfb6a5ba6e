//! Acceptance suite. Every test prints one `PASS`/`FAIL` line and then
//! asserts the same condition. Run with
//! `cargo test -p dfs-shape --test acceptance -- --nocapture --test-threads 1`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::Instant;

use dfs_shape::analysis::{ceil_sqrt, PinCensus};
use dfs_shape::harness::{simulate_seed, EmitSet, ExperimentConfig, SeedRun};
use dfs_shape::numeric::{HeightTable, DEFAULT_TOL};
use dfs_shape::oracles::{
    components_bfs, dilog_partial_sum, longest_path_exhaustive, renewal_scan_quadratic, survival_bisection,
    OracleBudget,
};
use dfs_shape::{
    decompose_increment, detect_renewals, dilog, increment_stats, integral_parametrization, pinning_gaps,
    run_dfs, sample_graph, solve_survival, survival_at_density, way_down_check, GraphSpec, LimitCurve, Policy,
    SleepingIndex,
};

const MILLION: usize = 1_000_000;

fn report(id: u32, pass: bool, what: &str, detail: String) -> bool {
    println!("{} criterion {id:>2}: {what}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn config(n: usize, c: f64, epsilon: f64) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(n, c, Vec::new(), "unused");
    config.epsilon = epsilon;
    config.emit = EmitSet::none();
    config
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// What the large runs contribute to the suite, without the graph.
struct RunDigest {
    seed: u64,
    accepted: bool,
    seconds: f64,
    component_fraction: f64,
    max_height_fraction: f64,
    sup_distance: f64,
    k_max: usize,
    gaps: Vec<(f64, f64)>,
    bins: Vec<(f64, f64, usize, f64)>,
    censuses: Vec<PinCensus>,
}

fn digest(n: usize, c: f64, epsilon: f64, seed: u64) -> RunDigest {
    let cfg = config(n, c, epsilon);
    let start = Instant::now();
    let run = simulate_seed(&cfg, seed).expect("simulation");
    let seconds = start.elapsed().as_secs_f64();
    let comparison = run.comparison.expect("supercritical run");
    let pins = run.pins.as_ref().expect("pins");
    RunDigest {
        seed,
        accepted: run.accepted,
        seconds,
        component_fraction: comparison.component_fraction,
        max_height_fraction: comparison.max_height_fraction,
        sup_distance: comparison.sup_distance,
        k_max: pins.k_max,
        gaps: pinning_gaps(pins, n, c).unwrap().iter().map(|g| (g.observed, g.predicted)).collect(),
        bins: increment_stats(&run.schedule, &run.alpha, 0.02, c, 0.05)
            .unwrap()
            .iter()
            .map(|b| (b.alpha_bin, b.mean, b.count, b.predicted))
            .collect(),
        censuses: run.censuses.clone(),
    }
}

/// `c = 2`, `N = 10^6`, `epsilon = 0.02`, seeds `0..20`.
fn c2_runs() -> &'static [RunDigest] {
    static RUNS: OnceLock<Vec<RunDigest>> = OnceLock::new();
    RUNS.get_or_init(|| (0..20).map(|seed| digest(MILLION, 2.0, 0.02, seed)).collect())
}

/// `c = 3`, `N = 10^6`, `epsilon = 0.02`, seeds `0..10`.
fn c3_runs() -> &'static [RunDigest] {
    static RUNS: OnceLock<Vec<RunDigest>> = OnceLock::new();
    RUNS.get_or_init(|| (0..10).map(|seed| digest(MILLION, 3.0, 0.02, seed)).collect())
}

#[test]
fn criterion_01_fixed_point() {
    let mut worst_residual: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for c in [1.1, 1.5, 2.0, 3.0, 5.0, 10.0] {
        let start = Instant::now();
        let sol = solve_survival(c, DEFAULT_TOL).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        worst_residual = worst_residual.max((1.0 - sol.rho - (-c * sol.rho).exp()).abs());
        worst_gap = worst_gap.max((sol.rho - survival_bisection(c)).abs());
    }
    let pass = worst_residual <= 1e-12 && worst_gap <= 1e-12 && slowest < 1e-3;
    assert!(report(
        1,
        pass,
        "survival fixed point",
        format!("max residual {worst_residual:.2e}, max |rho - bisection| {worst_gap:.2e}, slowest {:.1} us", slowest * 1e6)
    ));
}

#[test]
fn criterion_02_dilogarithm() {
    let at_one = (dilog(1.0).unwrap() - PI * PI / 6.0).abs();
    let budget = OracleBudget::default();
    let worst = (0..=100)
        .map(|i| {
            let x = i as f64 / 100.0;
            (dilog(x).unwrap() - dilog_partial_sum(x, &budget)).abs()
        })
        .fold(0.0, f64::max);
    let pass = at_one <= 1e-12 && worst <= 1e-10;
    assert!(report(2, pass, "dilogarithm", format!("|Li2(1) - pi^2/6| = {at_one:.2e}, max series gap on [0,1] {worst:.2e}")));
}

#[test]
fn criterion_03_integral_parametrization() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for c in [1.5, 2.0, 5.0] {
        let curve = LimitCurve::new(c).unwrap();
        let u_max = 1.0 - 1.0 / c;
        for i in 0..1000 {
            let u = u_max * i as f64 / 999.0;
            let (x, y) = integral_parametrization(c, u).unwrap();
            let rho = survival_at_density(c, u).unwrap();
            let (t, h) = curve.curve_up(rho).unwrap();
            worst = worst.max((x - t).hypot(y - h));
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-6 && seconds < 5.0;
    assert!(report(3, pass, "closed form vs integrals", format!("max distance {worst:.2e} in {seconds:.2} s")));
}

#[test]
fn criterion_04_curve_algebra() {
    let mut worst: f64 = 0.0;
    for c in [1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 50.0] {
        let curve = LimitCurve::new(c).unwrap();
        let rho_c = curve.rho_c;
        worst = worst.max(curve.f(rho_c).abs()).max(curve.g(rho_c).abs());
        worst = worst.max((curve.g(0.0) - (rho_c - dilog(rho_c).unwrap() / c)).abs());
        worst = worst.max((curve.f(0.0) + curve.g(0.0) - 2.0 * (1.0 - 1.0 / c)).abs());
        for i in 1..200 {
            let rho = rho_c * i as f64 / 200.0;
            let identity = 2.0 * (1.0 + (-rho).ln_1p() / (c * rho));
            worst = worst.max((curve.f(rho) + curve.g(rho) - identity).abs());
        }
    }
    assert!(report(4, worst <= 1e-10, "curve algebra", format!("max violation {worst:.2e}")));
}

#[test]
fn criterion_05_longest_path_improvement() {
    let mut lines = Vec::new();
    let mut pass = true;
    for c in [5.0, 10.0, 20.0, 50.0] {
        let g0 = LimitCurve::new(c).unwrap().peak_height;
        pass &= g0 > 1.0 - 2.21 / c;
        lines.push(format!("c={c}: g(0)={g0:.6} vs {:.6}", 1.0 - 2.21 / c));
    }
    for c in [100.0, 200.0, 500.0, 1000.0] {
        let g0 = LimitCurve::new(c).unwrap().peak_height;
        let floor = 1.0 - PI * PI / (6.0 * c) - 1e-2 / c;
        pass &= g0 >= floor;
        lines.push(format!("c={c}: g(0)={g0:.8} vs {floor:.8}"));
    }
    assert!(report(5, pass, "longest path lower bound", lines.join("; ")));
}

#[test]
fn criterion_06_profile_at_scale() {
    let curve = LimitCurve::new(2.0).unwrap();
    let runs: Vec<_> = c2_runs().iter().filter(|r| r.accepted).take(5).collect();
    let mut pass = runs.len() == 5;
    let mut cells = Vec::new();
    for r in &runs {
        let ok = r.sup_distance <= 0.02
            && (r.max_height_fraction - curve.peak_height).abs() <= 0.01
            && (r.component_fraction - curve.rho_c).abs() <= 0.01
            && r.seconds <= 10.0;
        pass &= ok;
        cells.push(format!(
            "seed {} sup {:.4} height {:.4} size {:.4} {:.1}s",
            r.seed, r.sup_distance, r.max_height_fraction, r.component_fraction, r.seconds
        ));
    }
    let detail = format!("targets height {:.4} size {:.4}; {}", curve.peak_height, curve.rho_c, cells.join("; "));
    assert!(report(6, pass, "profile at N=1e6, c=2", detail));
}

#[test]
fn criterion_07_convergence_trend() {
    let mut medians = Vec::new();
    for n in [10_000usize, 100_000] {
        let mut sups: Vec<f64> = (0..10)
            .map(|seed| simulate_seed(&config(n, 2.0, 0.02), seed).unwrap().comparison.unwrap().sup_distance)
            .collect();
        medians.push(median(&mut sups));
    }
    let mut sups: Vec<f64> = c2_runs()[..10].iter().map(|r| r.sup_distance).collect();
    medians.push(median(&mut sups));
    let pass = medians[0] > medians[1] && medians[1] > medians[2];
    let detail = format!("median sup distance {:.5} (1e4), {:.5} (1e5), {:.5} (1e6)", medians[0], medians[1], medians[2]);
    assert!(report(7, pass, "convergence trend", detail));
}

#[test]
fn criterion_08_increment_means() {
    let runs = c3_runs();
    // Pooled over the ten runs: alpha bin -> (sum of increments, samples, prediction).
    let mut pooled: BTreeMap<i64, (f64, usize, f64)> = BTreeMap::new();
    for r in runs {
        for &(bin, mean, count, predicted) in &r.bins {
            let entry = pooled.entry((bin * 1e6).round() as i64).or_insert((0.0, 0, predicted));
            entry.0 += mean * count as f64;
            entry.1 += count;
        }
    }
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    for &(sum, count, predicted) in pooled.values() {
        if count >= 1000 {
            tested += 1;
            worst = worst.max((sum / count as f64 / predicted - 1.0).abs());
        }
    }
    let single_worst = runs[0]
        .bins
        .iter()
        .filter(|b| b.2 >= 1000)
        .map(|b| (b.1 / b.3 - 1.0).abs())
        .fold(0.0, f64::max);
    let pass = tested > 0 && worst <= 0.05;
    let detail = format!(
        "{tested} bins pooled over {} runs, worst relative error {:.2}% (seed 0 alone: {:.2}%)",
        runs.len(),
        100.0 * worst,
        100.0 * single_worst
    );
    assert!(report(8, pass, "renewal increment means at c=3", detail));
}

#[test]
fn criterion_09_increment_identity() {
    let cases: Vec<(usize, f64, u64)> = (0..10)
        .map(|s| (10_000, 2.0, s))
        .chain((0..5).map(|s| (100_000, 3.0, s)))
        .chain([(MILLION, 2.0, 0)])
        .collect();
    let mut checked = 0usize;
    let mut below_level = 0usize;
    let mut other = Vec::new();
    for &(n, c, seed) in &cases {
        let run: SeedRun = simulate_seed(&config(n, c, 0.02), seed).unwrap();
        let sleeping = SleepingIndex::new(&run.trace, n);
        let regular = run.schedule.regular();
        for i in 0..regular.len().saturating_sub(1) {
            checked += 1;
            if let Err(e) = decompose_increment(&run.trace, &run.graph, &sleeping, &run.schedule, i) {
                let segment = &run.trace.heights()[regular[i]..regular[i + 1]];
                if segment.iter().any(|&x| x < i as i32) {
                    below_level += 1;
                } else {
                    other.push(format!("n={n} seed={seed} i={i}: {e}"));
                }
            }
        }
    }
    let pass = below_level == 0 && other.is_empty() && checked > 0;
    let mut detail = format!(
        "{checked} renewals in {} runs; {below_level} segments drop below their own level before the next renewal, {} other mismatches",
        cases.len(),
        other.len()
    );
    if let Some(first) = other.first() {
        detail.push_str(&format!(" (first: {first})"));
    }
    assert!(report(9, pass, "excursion identity", detail));
}

#[test]
fn criterion_10_pinning_gaps() {
    let eps = 0.02;
    let mut pass = true;
    let mut cells = Vec::new();
    for r in c3_runs() {
        let inside = r.gaps.iter().filter(|(obs, pred)| (obs - pred).abs() <= 3.0 * eps * eps).count();
        let levels = r.k_max.saturating_sub(1);
        let ok = levels > 0 && inside as f64 >= 0.9 * levels as f64;
        pass &= ok;
        cells.push(format!("{inside}/{levels}"));
    }
    assert!(report(10, pass, "pinning gaps at c=3", format!("within band per seed: {}", cells.join(" "))));
}

#[test]
fn criterion_11_way_down() {
    let (n, c, eps) = (MILLION, 2.0, 0.05);
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut ratios = Vec::new();
    for seed in 0..5 {
        let run = simulate_seed(&config(n, c, eps), seed).unwrap();
        let pins = run.pins.as_ref().unwrap();
        let rows = way_down_check(pins, n, c).unwrap();
        pass &= rows.len() == pins.k_max;
        for row in &rows {
            let rel = (row.observed / row.predicted - 1.0).abs();
            worst = worst.max(rel);
            ratios.push(row.observed / row.predicted);
        }
    }
    pass &= worst <= 0.05;
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
    let detail = format!(
        "worst relative error {:.1}% over 5 seeds; observed/predicted averages {mean_ratio:.3}",
        100.0 * worst
    );
    assert!(report(11, pass, "return times on the way down", detail));
}

#[test]
fn criterion_12_sleeping_census() {
    let runs = c2_runs();
    let failed: Vec<&RunDigest> = runs.iter().filter(|r| !r.censuses.iter().all(PinCensus::ok)).collect();
    let worst_meso = runs.iter().flat_map(|r| &r.censuses).map(|c| c.mesoscopic_components).max().unwrap_or(0);
    let worst_degree = runs.iter().flat_map(|r| &r.censuses).map(|c| c.max_degree).max().unwrap_or(0);
    let pass = failed.len() <= 1;
    let detail = format!(
        "{} of {} seeds failed; up to {worst_meso} components in [N^0.1, N^0.9] = [{:.2}, {:.0}], max degree {worst_degree} vs log N {:.2}",
        failed.len(),
        runs.len(),
        (MILLION as f64).powf(0.1),
        (MILLION as f64).powf(0.9),
        (MILLION as f64).ln()
    );
    assert!(report(12, pass, "sleeping subgraph census", detail));
}

#[test]
fn criterion_13_oracle_suite() {
    use rand::{Rng, SeedableRng};
    let budget = OracleBudget::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
    let mut failures = Vec::new();
    for case in 0..500u64 {
        let n = rng.random_range(1..=12usize);
        let c = rng.random_range(0.5..4.0);
        let g = sample_graph(&GraphSpec::new(n, c, case).unwrap()).unwrap();
        let longest = longest_path_exhaustive(&g, &budget).unwrap();
        let bfs = components_bfs(&g);
        for policy in [Policy::MinIndex, Policy::Uniform { seed: case }] {
            let (trace, tree) = run_dfs(&g, 1, policy).unwrap();
            let h = trace.heights();
            let component = bfs.iter().find(|comp| comp.contains(&1)).unwrap();
            let mut covered: Vec<u32> = tree.vertices().collect();
            covered.sort_unstable();
            let dyck = h[0] == 0
                && *h.last().unwrap() == -1
                && h.windows(2).all(|w| (w[1] - w[0]).abs() == 1)
                && h[..h.len() - 1].iter().all(|&x| x >= 0);
            let renewals_agree =
                detect_renewals(&trace, n).tau == renewal_scan_quadratic(&trace, n, &budget).unwrap();
            let checks = [
                ("height <= longest path", trace.max_height() as usize <= longest),
                ("tree covers component", &covered == component),
                ("trace length", h.len() == 2 * component.len()),
                ("renewals", renewals_agree),
                ("dyck", dyck),
            ];
            for (name, ok) in checks {
                if !ok {
                    failures.push(format!("case {case} n={n} {policy:?}: {name}"));
                }
            }
        }
    }
    let detail = format!(
        "500 graphs x 2 policies, {} failures {:?} (sqrt threshold at n=12: {})",
        failures.len(),
        failures.first(),
        ceil_sqrt(12)
    );
    assert!(report(13, failures.is_empty(), "small-graph oracles", detail));
}

#[test]
fn height_table_is_exact_enough_for_the_profile_checks() {
    let curve = LimitCurve::new(2.0).unwrap();
    let table = HeightTable::new(&curve, HeightTable::DEFAULT_NODES_PER_BRANCH);
    let worst = (0..=2000)
        .map(|i| curve.span * i as f64 / 2000.0)
        .map(|t| (table.eval(t) - curve.eval_height(t)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}
