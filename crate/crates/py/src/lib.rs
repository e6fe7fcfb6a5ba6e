//! Python module `dfs_shape`.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use dfs_shape::harness::{self, EmitSet, ExperimentConfig, PolicyKind, RunSummary};
use dfs_shape::numeric::DEFAULT_TOL;
use dfs_shape::{analysis, dfs, graph, numeric, DfsTrace, Error, Policy};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn policy_from(name: &str, seed: u64) -> PyResult<Policy> {
    match name {
        "min-index" => Ok(Policy::MinIndex),
        "uniform" => Ok(Policy::Uniform { seed }),
        other => Err(PyValueError::new_err(format!("unknown policy {other:?}"))),
    }
}

fn trace_from(heights: Vec<i32>) -> PyResult<DfsTrace> {
    DfsTrace::from_contour(heights).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (c, tol = DEFAULT_TOL))]
fn solve_survival(c: f64, tol: f64) -> PyResult<f64> {
    numeric::solve_survival(c, tol).map(|s| s.rho).map_err(to_py)
}

#[pyfunction]
fn dilog(x: f64) -> PyResult<f64> {
    numeric::dilog(x).map_err(to_py)
}

#[pyfunction]
fn longest_path_bound(c: f64) -> PyResult<f64> {
    numeric::longest_path_bound(c).map_err(to_py)
}

#[pyfunction]
fn expected_renewal_increment(c: f64, alpha: f64) -> PyResult<f64> {
    numeric::expected_renewal_increment(c, alpha).map_err(to_py)
}

#[pyfunction]
fn integral_parametrization(c: f64, u: f64) -> PyResult<(f64, f64)> {
    numeric::integral_parametrization(c, u).map_err(to_py)
}

#[pyclass(name = "LimitCurve", frozen, module = "dfs_shape")]
struct PyLimitCurve(numeric::LimitCurve);

#[pymethods]
impl PyLimitCurve {
    #[new]
    fn new(c: f64) -> PyResult<Self> {
        numeric::LimitCurve::new(c).map(PyLimitCurve).map_err(to_py)
    }

    #[getter]
    fn c(&self) -> f64 {
        self.0.c
    }

    #[getter]
    fn rho_c(&self) -> f64 {
        self.0.rho_c
    }

    #[getter]
    fn peak_time(&self) -> f64 {
        self.0.peak_time
    }

    #[getter]
    fn peak_height(&self) -> f64 {
        self.0.peak_height
    }

    #[getter]
    fn span(&self) -> f64 {
        self.0.span
    }

    fn f(&self, rho: f64) -> f64 {
        self.0.f(rho)
    }

    fn g(&self, rho: f64) -> f64 {
        self.0.g(rho)
    }

    fn curve_up(&self, rho: f64) -> PyResult<(f64, f64)> {
        self.0.curve_up(rho).map_err(to_py)
    }

    fn curve_down(&self, rho: f64) -> PyResult<(f64, f64)> {
        self.0.curve_down(rho).map_err(to_py)
    }

    fn eval_height(&self, t: f64) -> f64 {
        self.0.eval_height(t)
    }

    #[pyo3(signature = (points = numeric::DEFAULT_CURVE_POINTS))]
    fn sample(&self, points: usize) -> Vec<(f64, f64)> {
        self.0.sample(points)
    }

    fn __repr__(&self) -> String {
        format!("LimitCurve(c={}, rho_c={:.12}, peak_height={:.12})", self.0.c, self.0.rho_c, self.0.peak_height)
    }
}

#[pyclass(name = "Graph", frozen, module = "dfs_shape")]
struct PyGraph(graph::SparseGraph);

#[pymethods]
impl PyGraph {
    /// Graph on vertices `1..=n` from an edge list.
    #[new]
    fn new(n: usize, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        graph::SparseGraph::from_edges(n, &edges).map(PyGraph).map_err(to_py)
    }

    #[staticmethod]
    fn sample(py: Python<'_>, n: usize, c: f64, seed: u64) -> PyResult<Self> {
        let spec = graph::GraphSpec::new(n, c, seed).map_err(to_py)?;
        py.detach(|| graph::sample_graph(&spec)).map(PyGraph).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    fn neighbors(&self, v: u32) -> PyResult<Vec<u32>> {
        if v == 0 || v as usize > self.0.n() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.0.neighbors(v).to_vec())
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.0.edges().collect()
    }

    fn component_sizes(&self) -> Vec<usize> {
        graph::component_census(&self.0, |_| true).sizes
    }
}

/// Runs the exploration from `start`; returns `(heights, walker)` where
/// `walker[n]` is the current vertex after step `n` (None after the last pop).
#[pyfunction]
#[pyo3(signature = (graph, start = 1, policy = "min-index", seed = 0))]
fn run_dfs(
    py: Python<'_>,
    graph: &PyGraph,
    start: u32,
    policy: &str,
    seed: u64,
) -> PyResult<(Vec<i32>, Vec<Option<u32>>)> {
    let policy = policy_from(policy, seed)?;
    let (trace, _) = py.detach(|| dfs::run_dfs(&graph.0, start, policy)).map_err(to_py)?;
    let walker = (0..trace.len()).map(|n| trace.walker(n)).collect();
    Ok((trace.heights().to_vec(), walker))
}

#[pyfunction]
fn detect_renewals(heights: Vec<i32>, n_vertices: usize) -> PyResult<Vec<usize>> {
    Ok(analysis::detect_renewals(&trace_from(heights)?, n_vertices).tau)
}

#[pyfunction]
fn sup_distance<'py>(py: Python<'py>, heights: Vec<i32>, c: f64, n_vertices: usize) -> PyResult<Bound<'py, PyDict>> {
    let trace = trace_from(heights)?;
    let curve = numeric::LimitCurve::new(c).map_err(to_py)?;
    let cmp = py.detach(|| analysis::sup_distance(&trace, &curve, n_vertices));
    let out = PyDict::new(py);
    out.set_item("sup_distance", cmp.sup_distance)?;
    out.set_item("max_height_fraction", cmp.max_height_fraction)?;
    out.set_item("argmax_fraction", cmp.argmax_fraction)?;
    out.set_item("component_fraction", cmp.component_fraction)?;
    Ok(out)
}

fn summary_dict<'py>(py: Python<'py>, s: &RunSummary) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("n", s.n)?;
    out.set_item("c", s.c)?;
    out.set_item("seed", s.seed)?;
    out.set_item("resamples_used", s.resamples_used)?;
    out.set_item("accepted", s.accepted)?;
    out.set_item("component_size", s.component_size)?;
    out.set_item("component_fraction", s.component_fraction)?;
    out.set_item("max_height_fraction", s.max_height_fraction)?;
    out.set_item("sup_distance", s.sup_distance)?;
    out.set_item("degenerate_renewal_fraction", s.degenerate_renewal_fraction)?;
    out.set_item("mesoscopic_ok", s.mesoscopic_ok)?;
    out.set_item("max_degree", s.max_degree)?;
    out.set_item("wall_time_ms", s.wall_time_ms)?;
    Ok(out)
}

/// Runs a batch and writes artifacts under `out_dir`; returns one dict per seed.
#[pyfunction]
#[pyo3(signature = (
    n, c, seeds, out_dir, emit = None, policy = "min-index", epsilon = 0.02, eta = 0.05,
    gamma = None, max_resamples = 100,
))]
#[allow(clippy::too_many_arguments)]
fn run_experiment<'py>(
    py: Python<'py>,
    n: usize,
    c: f64,
    seeds: Vec<u64>,
    out_dir: PathBuf,
    emit: Option<&str>,
    policy: &str,
    epsilon: f64,
    eta: f64,
    gamma: Option<f64>,
    max_resamples: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut config = ExperimentConfig::new(n, c, seeds, out_dir);
    if let Some(list) = emit {
        config.emit = EmitSet::parse(list).map_err(to_py)?;
    }
    config.policy = match policy {
        "min-index" => PolicyKind::MinIndex,
        "uniform" => PolicyKind::Uniform,
        other => return Err(PyValueError::new_err(format!("unknown policy {other:?}"))),
    };
    config.epsilon = epsilon;
    config.eta = eta;
    config.gamma = gamma;
    config.max_resamples = max_resamples;
    let summaries = py.detach(|| harness::run_experiment(&config)).map_err(to_py)?;
    summaries.iter().map(|s| summary_dict(py, s)).collect()
}

#[pymodule]
#[pyo3(name = "dfs_shape")]
fn dfs_shape_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLimitCurve>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(solve_survival, m)?)?;
    m.add_function(wrap_pyfunction!(dilog, m)?)?;
    m.add_function(wrap_pyfunction!(longest_path_bound, m)?)?;
    m.add_function(wrap_pyfunction!(expected_renewal_increment, m)?)?;
    m.add_function(wrap_pyfunction!(integral_parametrization, m)?)?;
    m.add_function(wrap_pyfunction!(run_dfs, m)?)?;
    m.add_function(wrap_pyfunction!(detect_renewals, m)?)?;
    m.add_function(wrap_pyfunction!(sup_distance, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
