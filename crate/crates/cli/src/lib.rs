//! Runner for the twistor-space verification suites: configuration,
//! execution and report serialization.

pub mod config;
pub mod report;
pub mod suites;

use rayon::prelude::*;

pub use config::{ConfigError, Format, RunConfig, Suite};
pub use report::{emit_report, Report, Row, Status, SuiteReport};

/// Runs the selected suites (deduplicated, in canonical order) in parallel.
pub fn run(config: &RunConfig) -> Result<Report, ConfigError> {
    config.validate()?;
    let selected: Vec<Suite> = Suite::ALL.into_iter().filter(|s| config.suites.contains(s)).collect();
    let suites = selected.par_iter().map(|&s| suites::run_suite(config, s)).collect();
    Ok(Report::new(config, suites))
}
