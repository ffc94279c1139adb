//! The modal characterization of the composite D∘T on discrete instances.

use cwf_workbench::cat::{grothendieck, Cat, InternalCategory};
use cwf_workbench::cobar::{Cobar, CobarFunctor};
use cwf_workbench::lex::{check_modal_characterization, composite_dt, lift_lex, parse_lex_op};
use cwf_workbench::psh::adjoint::Adjunction;
use cwf_workbench::psh::{Presheaf, TyFam};
use cwf_workbench::{Report, Result};

use super::{absorb, Inputs};

pub const DEFAULT_OPS: &[&str] = &["identity", "open:top", "open:bot"];

fn per_op(inputs: &Inputs, op_name: &str) -> Result<Report> {
    let cfg = &inputs.config;
    let ic = match &inputs.internal {
        Some((_, ic)) => ic.clone(),
        None => InternalCategory::constant(&Cat::terminal(), cfg.d, "terminal")?,
    };
    let site = grothendieck(&ic)?;
    let op = parse_lex_op(op_name, cfg.d)?;
    let adj = Adjunction::new(site.clone(), cfg.budget)?;
    let df = CobarFunctor::new(Cobar::new(&adj, cfg.n, cfg.budget)?);
    let t = lift_lex(&op, &site, cfg.budget)?;
    let dt = composite_dt(&t, &df)?;
    let mut rep = Report::new(op_name);
    rep.merge(t.report.clone());
    let g = Presheaf::terminal(&site.cat);
    for n in 1..=3 {
        let what = format!("{op_name}/discrete{n}");
        let mut sub = check_modal_characterization(&dt, &g, &TyFam::constant(&site.cat, &g, n), cfg.budget);
        if let Ok(r) = &mut sub {
            for f in &mut r.facts {
                f.key = format!("{what}.{}", f.key);
            }
            for s in &mut r.searches {
                s.goal = format!("{what}: {}", s.goal);
            }
        }
        absorb(&mut rep, &what, sub);
    }
    Ok(rep)
}

pub fn modal(inputs: &Inputs) -> Report {
    let ops: Vec<String> = if inputs.config.t_instance.is_empty() {
        DEFAULT_OPS.iter().map(|s| s.to_string()).collect()
    } else {
        inputs.config.t_instance.clone()
    };
    let mut rep = Report::new("modal");
    for op in &ops {
        absorb(&mut rep, op, per_op(inputs, op));
    }
    rep
}
