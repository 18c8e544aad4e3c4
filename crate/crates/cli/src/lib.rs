//! Reproducible experiment driver for `fracqm-core`: flat TOML configs in,
//! CSV or JSON reports with oracle comparisons and provenance out.

pub mod config;
pub mod experiments;
pub mod output;
pub mod report;

pub use config::{
    validate_config, validate_config_with, ConfigError, Experiment, ExperimentConfig, OutputFormat,
    Overrides, Parameters,
};
pub use experiments::run_experiment;
pub use output::write_report;
pub use report::{Comparison, Criterion, RunReport};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "FRACQM_THREADS";

/// Sizes the global rayon pool from [`THREADS_ENV`] when it is set.
pub fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}
