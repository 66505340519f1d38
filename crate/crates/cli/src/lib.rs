//! Batch experiments over random feedback shift registers, with seeded
//! per-trial streams, CSV/JSON records and JSON summaries.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ConfigError, Defaults, Experiment, ExperimentConfig, Format, Overrides};
pub use experiments::{
    run_edit_verify, run_oracle, run_pd_experiment, run_same_cycle, run_toggle_verify, Check, CheckKind, Outcome,
    Summary,
};

/// Exit status for a bad configuration.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status when a checked property fails.
pub const EXIT_VIOLATION: i32 = 3;
