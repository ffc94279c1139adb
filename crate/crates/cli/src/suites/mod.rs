//! The named suites. Each takes validated inputs and returns one report.

use cwf_workbench::alg::{PresentationFile, PresentedAlgebra, TableTheory};
use cwf_workbench::cat::{Cat, InternalCategory};
use cwf_workbench::lex::parse_lex_op;
use cwf_workbench::{Error, Outcome, Report, Result};

use std::sync::Arc;

use crate::artifacts;
use crate::config::SuiteConfig;
use crate::CliError;

mod algebra;
mod fibrancy;
mod kernel;
mod modal;

/// Everything the suites read, loaded and validated up front.
pub struct Inputs {
    pub config: SuiteConfig,
    pub categories: Vec<(String, Cat)>,
    pub internal: Option<(String, InternalCategory)>,
    pub theory: Option<TableTheory>,
    pub presentations: Vec<(String, PresentationFile)>,
    pub stages: Vec<Arc<PresentedAlgebra>>,
}

impl Inputs {
    pub fn load(config: &SuiteConfig) -> std::result::Result<Inputs, CliError> {
        let cats: Vec<String> = if config.category.is_empty() {
            ["terminal", "walking-arrow", "square"].iter().map(|s| s.to_string()).collect()
        } else {
            config.category.clone()
        };
        let categories = cats.iter().map(|c| artifacts::load_category(c)).collect::<std::result::Result<_, _>>()?;
        let internal = config.internal_category.as_deref().map(|ic| artifacts::load_internal_category(ic, config.d)).transpose()?;
        let theory = config.theory.as_deref().map(artifacts::load_theory).transpose()?;
        let presentations = config.presentation.iter().map(|p| artifacts::load_presentation(p)).collect::<std::result::Result<_, _>>()?;
        let names: Vec<String> = if config.stages.is_empty() { vec!["f2".into(), "f2y".into()] } else { config.stages.clone() };
        let stages = artifacts::load_stages(&names)?;
        for t in &config.t_instance {
            parse_lex_op(t, config.d).map_err(|e| CliError::Config(format!("t-instance `{t}`: {e}")))?;
        }
        for i in &config.instance {
            let k = i.strip_prefix("discrete").or_else(|| i.strip_prefix("arrow")).and_then(|k| k.parse::<u32>().ok());
            if !k.is_some_and(|k| (1..=4).contains(&k)) {
                return Err(CliError::Config(format!("instance `{i}`: expected discrete<k> or arrow<k> with 1 <= k <= 4")));
            }
        }
        Ok(Inputs { config: config.clone(), categories, internal, theory, presentations, stages })
    }
}

pub fn run(name: &str, inputs: &Inputs) -> Report {
    let mut rep = match name {
        "laws" => kernel::laws(inputs),
        "adjunction" => kernel::adjunction(inputs),
        "lattice" => kernel::lattice(inputs),
        "cobar" => kernel::cobar(inputs),
        "fibrancy" => fibrancy::fibrancy(inputs),
        "modal" => modal::modal(inputs),
        "duality" => algebra::duality(inputs),
        "groebner" => algebra::groebner(inputs),
        "theory" => algebra::theory(inputs),
        other => {
            let mut r = Report::new(other);
            r.fail("suite", format!("unknown suite {other}"));
            r
        }
    };
    rep.suite = name.to_string();
    rep.canonicalize();
    rep
}

/// Folds a sub-check into the suite report; budget exhaustion becomes an inconclusive search.
fn absorb(rep: &mut Report, what: &str, r: Result<Report>) {
    match r {
        Ok(sub) => rep.merge(sub),
        Err(Error::BudgetExceeded(m)) | Err(Error::SearchInconclusive(m)) => {
            rep.search(what, Outcome::Inconclusive, 0);
            rep.fact(format!("{what}.inconclusive"), m);
        }
        Err(e) => rep.fail("error", format!("{what}: {e}")),
    }
}
