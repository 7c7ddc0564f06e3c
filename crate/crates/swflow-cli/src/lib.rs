//! Experiment runner for the `swflow` library: randomized transport trials,
//! wall-crossing sweeps and identity batteries with JSON or CSV reports.

pub mod commands;
pub mod config;
pub mod report;

use std::time::Instant;

pub use config::{Command, ConfigError, Format, Overrides, RunConfig};
pub use report::{ResultRecord, RunReport};

/// Runs the configured command. Results are ordered by trial index.
pub fn run(cfg: &RunConfig) -> RunReport {
    let start = Instant::now();
    let results = commands::run_command(cfg);
    let seconds = cfg.timing.then(|| start.elapsed().as_secs_f64());
    RunReport::new(cfg.clone(), results, seconds)
}

/// The report in the configured format.
pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}
