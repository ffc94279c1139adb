//! Command-line front end: loads artifacts, runs named suites and reports.

use std::time::{Duration, Instant};

use cwf_workbench::{Outcome, Report};

pub mod artifacts;
pub mod config;
pub mod output;
pub mod suites;

pub use config::SuiteConfig;
pub use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Artifact { path: String, source: cwf_workbench::Error },
    #[error("configuration: {0}")]
    Config(String),
}

pub struct SuiteResult {
    pub report: Report,
    pub wall: Duration,
}

impl SuiteResult {
    pub fn inconclusive(&self) -> usize {
        self.report.searches.iter().filter(|s| s.outcome == Outcome::Inconclusive).count()
    }
}

pub struct RunReport {
    pub config: SuiteConfig,
    pub suites: Vec<SuiteResult>,
}

impl RunReport {
    pub fn failed(&self) -> bool {
        self.suites.iter().any(|s| !s.report.pass())
    }

    pub fn inconclusive(&self) -> bool {
        self.suites.iter().any(|s| s.inconclusive() > 0)
    }

    pub fn pass(&self) -> bool {
        !self.failed() && (self.config.allow_inconclusive || !self.inconclusive())
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed() {
            1
        } else if self.inconclusive() && !self.config.allow_inconclusive {
            2
        } else {
            0
        }
    }
}

pub const EXIT_INPUT: i32 = 3;

/// Loads and validates every artifact, then runs the suites in order.
pub fn run_suites(config: &SuiteConfig) -> Result<RunReport, CliError> {
    let names = config.expanded_suites()?;
    let inputs = suites::Inputs::load(config)?;
    let mut out = Vec::with_capacity(names.len());
    for name in &names {
        let start = Instant::now();
        let report = suites::run(name, &inputs);
        out.push(SuiteResult { report, wall: start.elapsed() });
    }
    Ok(RunReport { config: config.clone(), suites: out })
}
