//! Configuration-driven experiments: presets, runs, artifacts and the
//! effective-crossover matrix.

pub mod config;
pub mod emit;
pub mod experiment;
pub mod presets;
pub mod transfer;

pub use config::{load_config, ExperimentConfig, RawConfig, TaskEntry};
pub use emit::{emit_plot_data, AggregateRow, CurveRow, SummaryRow};
pub use experiment::{
    read_manifest, resume, run_experiment, test_saved_genome, ExperimentOutcome, Manifest, RunOptions, RunRecord,
};
pub use presets::preset;
pub use transfer::{compute_transfer_matrix, read_events_csv, write_events_csv, TransferMatrix};
