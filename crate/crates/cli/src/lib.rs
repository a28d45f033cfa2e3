//! Config loading and subcommands behind the `qflqg` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::ExperimentConfig;
pub use error::CliError;

/// Sizes rayon's global pool from `QFLQG_THREADS`, if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QFLQG_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Config {
            field: "QFLQG_THREADS".into(),
            msg: format!("expected a positive integer, got {raw:?}"),
        }
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config {
            field: "QFLQG_THREADS".into(),
            msg: e.to_string(),
        })
}
