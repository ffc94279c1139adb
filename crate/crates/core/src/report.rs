//! Check reports shared by every suite.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Found,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub equation: String,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchRecord {
    pub goal: String,
    pub outcome: Outcome,
    pub spent: u64,
}

/// A named fact produced by a check, such as a carrier size table entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suite: String,
    pub checked: u64,
    /// Instances checked per equation.
    pub equations: BTreeMap<String, u64>,
    pub failures: Vec<Failure>,
    pub searches: Vec<SearchRecord>,
    pub facts: Vec<Fact>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), ..Default::default() }
    }

    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn inconclusive(&self) -> bool {
        self.searches.iter().any(|s| s.outcome == Outcome::Inconclusive)
    }

    /// Records one equation instance; a false `holds` becomes a failure.
    pub fn check(&mut self, equation: &str, holds: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        *self.equations.entry(equation.to_string()).or_default() += 1;
        if !holds {
            self.failures.push(Failure { equation: equation.to_string(), witness: witness() });
        }
    }

    pub fn fail(&mut self, equation: &str, witness: impl Into<String>) {
        self.checked += 1;
        *self.equations.entry(equation.to_string()).or_default() += 1;
        self.failures.push(Failure { equation: equation.to_string(), witness: witness.into() });
    }

    pub fn search(&mut self, goal: impl Into<String>, outcome: Outcome, spent: u64) {
        self.searches.push(SearchRecord { goal: goal.into(), outcome, spent });
    }

    pub fn fact(&mut self, key: impl Into<String>, value: impl ToString) {
        self.facts.push(Fact { key: key.into(), value: value.to_string() });
    }

    /// Appends another report's entries. Entries are put in a canonical order so that
    /// merging is insensitive to the order in which sub-reports arrive.
    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        for (k, v) in other.equations {
            *self.equations.entry(k).or_default() += v;
        }
        self.failures.extend(other.failures);
        self.searches.extend(other.searches);
        self.facts.extend(other.facts);
    }

    pub fn canonicalize(&mut self) {
        self.failures.sort_by(|a, b| (&a.equation, &a.witness).cmp(&(&b.equation, &b.witness)));
        self.searches.sort_by(|a, b| a.goal.cmp(&b.goal));
        self.facts.sort_by(|a, b| a.key.cmp(&b.key));
    }
}

/// Counts enumeration work against a fixed bound.
#[derive(Debug, Clone)]
pub struct Budget {
    pub limit: u64,
    pub spent: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, spent: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn charge(&mut self, n: u64, what: &str) -> Result<()> {
        self.spent = self.spent.saturating_add(n);
        if self.spent > self.limit {
            return Err(Error::BudgetExceeded(format!("{what}: spent {} of {}", self.spent, self.limit)));
        }
        Ok(())
    }

    pub fn remaining(&self) -> u64 {
        self.limit.saturating_sub(self.spent)
    }
}
