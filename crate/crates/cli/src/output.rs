//! Machine-readable JSON lines and the human summary.

use std::io::{self, Write};

use serde::Serialize;

use cwf_workbench::Outcome;

use crate::config::SuiteConfig;
use crate::RunReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// One JSON object per line on stdout, summary on stderr.
    Lines,
    /// Only the human summary, on stdout.
    Summary,
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum Record<'a> {
    Config(&'a SuiteConfig),
    Check { suite: &'a str, equation: &'a str, instances: u64, failures: usize },
    Failure { suite: &'a str, equation: &'a str, witness: &'a str },
    Search { suite: &'a str, goal: &'a str, outcome: Outcome, spent: u64 },
    Fact { suite: &'a str, key: &'a str, value: &'a str },
    Suite { suite: &'a str, checked: u64, failures: usize, inconclusive: usize, pass: bool },
    Summary { suites: usize, checked: u64, failures: usize, inconclusive: usize, pass: bool },
}

/// The JSON lines for a run. Contains no timings, so equal configs give equal bytes.
pub fn machine_lines(run: &RunReport) -> Vec<String> {
    let mut recs = vec![Record::Config(&run.config)];
    for s in &run.suites {
        let r = &s.report;
        let name = r.suite.as_str();
        for (eq, &n) in &r.equations {
            let failures = r.failures.iter().filter(|f| &f.equation == eq).count();
            recs.push(Record::Check { suite: name, equation: eq, instances: n, failures });
        }
        recs.extend(r.failures.iter().map(|f| Record::Failure { suite: name, equation: &f.equation, witness: &f.witness }));
        recs.extend(r.searches.iter().map(|x| Record::Search { suite: name, goal: &x.goal, outcome: x.outcome, spent: x.spent }));
        recs.extend(r.facts.iter().map(|f| Record::Fact { suite: name, key: &f.key, value: &f.value }));
        recs.push(Record::Suite { suite: name, checked: r.checked, failures: r.failures.len(), inconclusive: s.inconclusive(), pass: r.pass() });
    }
    recs.push(Record::Summary {
        suites: run.suites.len(),
        checked: run.suites.iter().map(|s| s.report.checked).sum(),
        failures: run.suites.iter().map(|s| s.report.failures.len()).sum(),
        inconclusive: run.suites.iter().map(|s| s.inconclusive()).sum(),
        pass: run.pass(),
    });
    recs.iter().map(|r| serde_json::to_string(r).expect("records serialize")).collect()
}

pub fn human_summary(run: &RunReport) -> String {
    let mut out = String::new();
    for s in &run.suites {
        let r = &s.report;
        let verdict = if !r.pass() {
            "FAIL"
        } else if s.inconclusive() > 0 {
            "INCONCLUSIVE"
        } else {
            "pass"
        };
        out.push_str(&format!(
            "{:<12} {:<12} checked {:>8}  failures {:>3}  inconclusive {:>3}  {:>9.1} ms\n",
            r.suite,
            verdict,
            r.checked,
            r.failures.len(),
            s.inconclusive(),
            s.wall.as_secs_f64() * 1e3
        ));
        for f in r.failures.iter().take(5) {
            out.push_str(&format!("    {}: {}\n", f.equation, f.witness));
        }
        if r.failures.len() > 5 {
            out.push_str(&format!("    ... {} more\n", r.failures.len() - 5));
        }
    }
    out.push_str(&format!("overall: {} ({} suites)\n", if run.pass() { "pass" } else { "FAIL" }, run.suites.len()));
    out
}

pub fn emit(run: &RunReport, format: Format, stdout: &mut dyn Write, stderr: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Lines => {
            for l in machine_lines(run) {
                writeln!(stdout, "{l}")?;
            }
            write!(stderr, "{}", human_summary(run))
        }
        Format::Summary => write!(stdout, "{}", human_summary(run)),
    }
}
