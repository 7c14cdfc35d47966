//! Reproducible experiments: distances between point clouds on a swiss roll
//! scored against geodesics, and translation, spread and diffusion suites on
//! a grid graph.

mod grid;
mod json;
mod stats;
mod swissroll;

pub use grid::{run_grid_experiment, GridConfig, GridReport, REFERENCE_BIMODAL_SCORES};
pub use json::{scalar as json_f64, vec as json_f64_vec};
pub use stats::{average_ranks, mean_sd, spearman};
pub use swissroll::{
    arc_length, run_swissroll_benchmark, sample_swiss_roll, swiss_geodesic, BenchmarkReport,
    MethodAccuracy, MethodTiming, RollCoordinate, ScatterPoint, SwissRollConfig, SwissRollDataset,
    HEIGHT, KERNEL_MMD, T_MAX, T_MIN,
};
