//! Experiment driver for `copevolve`: presets and configuration, solver
//! cross-evaluation, the hard-instance pipeline, feature reports and the CLI.

pub mod cli;
pub mod config;
pub mod cross_eval;
pub mod error;
pub mod feature_table;
pub mod io;
pub mod pipeline;
pub mod report;

pub use config::{ExperimentConfig, Preset};
pub use cross_eval::{run_cross_eval, CrossEvalCell, CrossEvalTable, InstanceSet};
pub use error::{HarnessError, Result};
pub use pipeline::{
    evolve_hard_instance, median_fen, run_hardness_pipeline, HardInstance, Manifest, ManifestEntry,
};
pub use report::emit_report;
