//! Brute-force references. Each one is deliberately naive and shares no code
//! path with the routine it checks; the exhaustive ones refuse inputs beyond
//! their budget instead of approximating.

use std::collections::VecDeque;

use crate::dfs::DfsTrace;
use crate::error::{Error, Result};
use crate::graph::SparseGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_vertices: usize,
    pub max_terms: usize,
    pub max_trace_len: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_vertices: 12, max_terms: 1_000_000, max_trace_len: 10_000 }
    }
}

/// Edge count of the longest simple path, by exhaustive backtracking.
pub fn longest_path_exhaustive(g: &SparseGraph, budget: &OracleBudget) -> Result<usize> {
    if g.n() > budget.max_vertices {
        return Err(Error::Budget(format!(
            "exhaustive longest path limited to {} vertices, got {}",
            budget.max_vertices,
            g.n()
        )));
    }
    fn extend(g: &SparseGraph, v: u32, on_path: &mut [bool], len: usize, best: &mut usize) {
        *best = (*best).max(len);
        for &w in g.neighbors(v) {
            let i = w as usize - 1;
            if !on_path[i] {
                on_path[i] = true;
                extend(g, w, on_path, len + 1, best);
                on_path[i] = false;
            }
        }
    }
    let mut best = 0;
    let mut on_path = vec![false; g.n()];
    for v in g.vertices() {
        on_path[v as usize - 1] = true;
        extend(g, v, &mut on_path, 0, &mut best);
        on_path[v as usize - 1] = false;
    }
    Ok(best)
}

/// Connected components by breadth-first search, each sorted, ordered by
/// smallest member.
pub fn components_bfs(g: &SparseGraph) -> Vec<Vec<u32>> {
    let mut seen = vec![false; g.n()];
    let mut components = Vec::new();
    for root in g.vertices() {
        if seen[root as usize - 1] {
            continue;
        }
        seen[root as usize - 1] = true;
        let mut component = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w as usize - 1] {
                    seen[w as usize - 1] = true;
                    component.push(w);
                    queue.push_back(w);
                }
            }
        }
        component.sort_unstable();
        components.push(component);
    }
    components
}

/// Survival probability by plain bisection of `1 - rho - exp(-c rho)` on
/// `[1e-14, 1 - 1e-14]` down to width `1e-14`.
pub fn survival_bisection(c: f64) -> f64 {
    if c <= 1.0 {
        return 0.0;
    }
    let defect = |rho: f64| 1.0 - rho - (-c * rho).exp();
    let (mut lo, mut hi) = (1e-14, 1.0 - 1e-14);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if defect(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Partial sum of `x^k / k^2` over `k <= max_terms`, accumulated from the
/// smallest term up. At `x = 1` the tail `sum_{k > M} 1/k^2` is added from
/// its Euler–Maclaurin expansion, since no partial sum of practical length
/// reaches `1e-10` there.
pub fn dilog_partial_sum(x: f64, budget: &OracleBudget) -> f64 {
    let m = budget.max_terms;
    let mut sum = 0.0;
    for k in (1..=m).rev() {
        let kf = k as f64;
        sum += x.powi(k as i32) / (kf * kf);
    }
    if x == 1.0 {
        let mf = m as f64;
        sum += 1.0 / mf - 1.0 / (2.0 * mf * mf) + 1.0 / (6.0 * mf * mf * mf);
    }
    sum
}

/// Renewal times by transcribing the definition: for each level, try every
/// later time at that level and walk forward to its first descent.
pub fn renewal_scan_quadratic(trace: &DfsTrace, n_vertices: usize, budget: &OracleBudget) -> Result<Vec<usize>> {
    let x = trace.heights();
    if x.len() > budget.max_trace_len {
        return Err(Error::Budget(format!(
            "quadratic renewal scan limited to {} steps, got {}",
            budget.max_trace_len,
            x.len()
        )));
    }
    let sqrt = (n_vertices as f64).sqrt().ceil() as usize;
    let mut tau = vec![0usize];
    loop {
        let i = (tau.len() - 1) as i32;
        let prev = *tau.last().unwrap();
        let mut found = None;
        for n in prev + 1..x.len() {
            if x[n] != i + 1 {
                continue;
            }
            let mut k = 1;
            while n + k < x.len() && x[n + k] != i {
                k += 1;
            }
            if n + k < x.len() && k > sqrt {
                found = Some(n);
                break;
            }
        }
        match found {
            Some(n) => tau.push(n),
            None => {
                tau.push(2 * n_vertices);
                return Ok(tau);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs::{run_dfs, Policy};

    #[test]
    fn longest_path_examples() {
        let budget = OracleBudget::default();
        let tri = SparseGraph::from_edges(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(longest_path_exhaustive(&tri, &budget).unwrap(), 2);
        let path = SparseGraph::from_edges(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert_eq!(longest_path_exhaustive(&path, &budget).unwrap(), 4);
        let empty = SparseGraph::from_edges(4, &[]).unwrap();
        assert_eq!(longest_path_exhaustive(&empty, &budget).unwrap(), 0);
        let big = SparseGraph::from_edges(13, &[]).unwrap();
        assert!(matches!(longest_path_exhaustive(&big, &budget), Err(Error::Budget(_))));
    }

    #[test]
    fn bfs_examples() {
        let two = SparseGraph::from_edges(4, &[(1, 2), (3, 4)]).unwrap();
        assert_eq!(components_bfs(&two), vec![vec![1, 2], vec![3, 4]]);
        let k4 = SparseGraph::from_edges(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        assert_eq!(components_bfs(&k4).len(), 1);
        let empty = SparseGraph::from_edges(3, &[]).unwrap();
        assert_eq!(components_bfs(&empty), vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn bisection_examples() {
        assert_eq!(survival_bisection(1.0), 0.0);
        assert!((survival_bisection(2.0) - 0.796_812_130_020_020_05).abs() < 1e-13);
        let rho = survival_bisection(10.0);
        assert!((1.0 - rho - (-10.0 * rho).exp()).abs() < 1e-12);
    }

    #[test]
    fn quadratic_scan_examples() {
        let budget = OracleBudget::default();
        let path: Vec<_> = (1..9u32).map(|v| (v, v + 1)).collect();
        let g = SparseGraph::from_edges(9, &path).unwrap();
        let (trace, _) = run_dfs(&g, 1, Policy::MinIndex).unwrap();
        assert_eq!(renewal_scan_quadratic(&trace, 9, &budget).unwrap(), vec![0, 1, 2, 3, 4, 5, 6, 18]);
        let star = SparseGraph::from_edges(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        let (trace, _) = run_dfs(&star, 1, Policy::MinIndex).unwrap();
        assert_eq!(renewal_scan_quadratic(&trace, 4, &budget).unwrap(), vec![0, 8]);
        let tight = OracleBudget { max_trace_len: 4, ..budget };
        assert!(renewal_scan_quadratic(&trace, 4, &tight).is_err());
    }

    #[test]
    fn partial_sum_small_x() {
        let budget = OracleBudget { max_terms: 200, ..OracleBudget::default() };
        assert!((dilog_partial_sum(0.5, &budget) - 0.582_240_526_465_012_5).abs() < 1e-15);
        assert_eq!(dilog_partial_sum(0.0, &budget), 0.0);
    }
}
