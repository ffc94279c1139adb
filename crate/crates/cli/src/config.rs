//! Suite configuration: a TOML file named by `CWF_WORKBENCH_CONFIG`, overridden by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_ENV: &str = "CWF_WORKBENCH_CONFIG";

pub const SUITES: &[&str] = &["laws", "adjunction", "lattice", "cobar", "fibrancy", "modal", "duality", "groebner", "theory"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Suite names in run order; `all` expands to every suite.
    pub suites: Vec<String>,
    /// Category files, or builtin names such as `walking-arrow`.
    pub category: Vec<String>,
    pub internal_category: Option<String>,
    pub theory: Option<PathBuf>,
    pub presentation: Vec<PathBuf>,
    /// Builtin stage names for the duality roster.
    pub stages: Vec<String>,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Lex operations for the modal suite: `identity`, `open:top`, `open:bot`.
    pub t_instance: Vec<String>,
    /// Cobar instances: `discrete<k>` or `arrow<k>`.
    pub instance: Vec<String>,
    pub budget: u64,
    pub seed: u64,
    pub allow_inconclusive: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Vec::new(),
            category: Vec::new(),
            internal_category: None,
            theory: None,
            presentation: Vec::new(),
            stages: Vec::new(),
            d: 1,
            n: 2,
            t_instance: Vec::new(),
            instance: Vec::new(),
            budget: 1 << 24,
            seed: 0,
            allow_inconclusive: false,
        }
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<SuiteConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<SuiteConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        let mut c = SuiteConfig::from_toml(&text)?;
        if let Some(dir) = path.parent() {
            c.rebase(dir);
        }
        Ok(c)
    }

    /// Resolves relative file paths against `dir`. Names that are not files there are
    /// left alone, since categories may also be builtin names.
    fn rebase(&mut self, dir: &Path) {
        let file = |s: &mut String| {
            let p = dir.join(&*s);
            if Path::new(s.as_str()).is_relative() && p.exists() {
                *s = p.display().to_string();
            }
        };
        self.category.iter_mut().for_each(file);
        self.internal_category.iter_mut().for_each(file);
        for p in self.presentation.iter_mut().chain(self.theory.iter_mut()) {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }

    /// The file named by the environment, or defaults.
    pub fn from_env() -> Result<SuiteConfig, CliError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => SuiteConfig::load(Path::new(&p)),
            _ => Ok(SuiteConfig::default()),
        }
    }

    /// Suite names with `all` expanded; unknown names are an input error.
    pub fn expanded_suites(&self) -> Result<Vec<String>, CliError> {
        let mut out: Vec<String> = Vec::new();
        for s in &self.suites {
            let names: Vec<&str> = if s == "all" { SUITES.to_vec() } else { vec![s.as_str()] };
            for n in names {
                if !SUITES.contains(&n) {
                    return Err(CliError::Config(format!("unknown suite `{n}`; expected one of {} or all", SUITES.join(", "))));
                }
                if !out.iter().any(|o| o == n) {
                    out.push(n.to_string());
                }
            }
        }
        Ok(out)
    }
}
