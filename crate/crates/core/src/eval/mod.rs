//! Batch evaluation, pooled metrics, and the A* path-optimality oracle.

mod astar;
mod batch;
mod metrics;

pub use astar::{astar_shortest_path, neighbors, octile_distance, octile_length, GridPath, PathError};
pub use batch::{
    load_run_traces, run_batch, run_dir_for, run_episodes, run_single, trace_file_name, BatchError, BatchOutput,
    Execution, LlmSlot, RunConfig, ScenarioSettings, VlmSlot,
};
pub use metrics::{
    compute_metrics, csv_report, path_optimality, MetricsError, MetricsReport, ModelLabels, NotApplicable, CSV_HEADER,
};
