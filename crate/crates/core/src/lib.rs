//! Depth-first search on sparse Erdős–Rényi graphs and the deterministic
//! limit of its contour process.
//!
//! The pipeline is: sample `G(N, c/N)` ([`graph`]), explore the component of
//! vertex 1 ([`dfs`]), read renewal structure and profile distances off the
//! walk ([`analysis`]) and compare with closed forms ([`numeric`]). The
//! [`harness`] module runs seeded batches and writes the artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analysis;
pub mod dfs;
pub mod error;
pub mod graph;
pub mod harness;
pub mod numeric;
pub mod oracles;
pub mod report;
pub mod svg;

pub use analysis::{
    compute_alpha, decompose_increment, detect_renewals, increment_stats, pinning_gaps, pinning_heights,
    sleeping_census_at_pins, sup_distance, way_down_check, IncrementBin, PinCensus, PinningGap, PinningSet,
    ProfileComparison, RenewalDecomposition, RenewalSchedule, SleepingIndex, WayDownRow,
};
pub use dfs::{find_giant_run, run_dfs, DfsState, DfsTrace, GiantRun, Policy, SpanningTree, Step, StepKind};
pub use error::{Error, Result};
pub use graph::{
    component_census, degree_census, mesoscopic_check, sample_graph, ComponentCensus, DegreeCensus, GraphSpec,
    SparseGraph,
};
pub use harness::{run_experiment, Artifact, EmitSet, ExperimentConfig, RunSummary};
pub use numeric::{
    dilog, expected_renewal_increment, integral_parametrization, longest_path_bound, solve_survival,
    subcritical_mean_size, survival_at_density, LimitCurve, SurvivalSolution,
};
