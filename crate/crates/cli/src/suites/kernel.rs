//! CwF laws, the U ⊣ R adjunction, interval lattices and weights, and the cobar construction.

use std::sync::Arc;

use cwf_workbench::cat::{grothendieck, Cat, IntervalElement, InternalCategory, Site};
use cwf_workbench::cobar::{face, verify_cobar_properties, weights, CobarConfig, CobarInstance};
use cwf_workbench::cwf::check_cwf_laws;
use cwf_workbench::psh::adjoint::{check_product_formula, Adjunction};
use cwf_workbench::psh::model::PshModel;
use cwf_workbench::psh::{Elem, Presheaf, TyFam};
use cwf_workbench::{Budget, Report, Result};

use super::{absorb, Inputs};

pub fn laws(inputs: &Inputs) -> Report {
    let mut rep = Report::new("laws");
    for (name, cat) in &inputs.categories {
        let r = PshModel::with_default_roster(Arc::new(cat.clone()), name.clone()).and_then(|m| {
            let mut sub = check_cwf_laws(&m, &mut Budget::new(inputs.config.budget))?;
            let types: usize = m.roster().iter().map(|(_, tys)| tys.len()).sum();
            sub.fact(format!("{name}.contexts"), m.roster().len());
            sub.fact(format!("{name}.types"), types);
            sub.fact(format!("{name}.instances"), sub.checked);
            Ok(sub)
        });
        absorb(&mut rep, name, r);
    }
    rep
}

/// The constant internal categories the adjunction and cobar suites default to.
fn default_sites(inputs: &Inputs) -> Result<Vec<(String, InternalCategory)>> {
    if let Some((name, ic)) = &inputs.internal {
        return Ok(vec![(name.clone(), ic.clone())]);
    }
    let mut out = Vec::new();
    for d in 0..=inputs.config.d {
        for (name, cat) in [("terminal", Cat::terminal()), ("walking-arrow", Cat::walking_arrow()), ("discrete2", Cat::discrete(2))] {
            out.push((format!("{name}/d={d}"), InternalCategory::constant(&cat, d, name)?));
        }
    }
    Ok(out)
}

fn adjunction_at(ic: &InternalCategory, limit: u64) -> Result<Report> {
    let a = Adjunction::new(grothendieck(ic)?, limit)?;
    let (big, small) = (a.big().clone(), a.small().clone());
    let mut gs = vec![Presheaf::terminal(&big), Presheaf::constant(&big, 2)];
    gs.extend(big.objects().map(|c| Presheaf::yoneda(&big, c)).filter(|y| y.sizes.iter().all(|&s| s <= 4)));
    let mut g0s = vec![Presheaf::constant(&small, 2)];
    g0s.extend(small.objects().map(|c| Presheaf::yoneda(&small, c)));
    let mut rep = Report::new("adjunction");
    for g in &gs {
        for g0 in &g0s {
            rep.merge(a.check_triangles(g, g0)?);
        }
    }
    if ic.constant {
        for g0 in &g0s {
            rep.merge(check_product_formula(&a, g0)?);
        }
    }
    Ok(rep)
}

pub fn adjunction(inputs: &Inputs) -> Report {
    let mut rep = Report::new("adjunction");
    match default_sites(inputs) {
        Ok(sites) => {
            for (name, ic) in sites {
                let r = adjunction_at(&ic, inputs.config.budget);
                absorb(&mut rep, &name, r);
            }
        }
        Err(e) => rep.fail("error", e.to_string()),
    }
    rep
}

fn lattice_checks(d: usize) -> Result<Report> {
    let mut rep = Report::new("lattice");
    for k in 0..=4 {
        rep.fact(format!("|I([{k}])|"), IntervalElement::enumerate(k)?.len());
    }
    for n in 0..=4usize {
        let count = weights(n, 0, d)?.len();
        rep.fact(format!("|P_{n}([0])|"), count);
        rep.check("weights-stage0", count == (1 << (n + 1)) - 1, || format!("n = {n}: {count} weights"));
    }
    for stage in 0..=d.min(2) {
        for n in 0..=3usize {
            let ws = weights(n, stage, d)?;
            let next = weights(n + 1, stage, d)?;
            for w in &ws {
                for k in 0..=n + 1 {
                    let fk = face(k, w)?;
                    rep.check("face-closed", next.binary_search(&fk).is_ok(), || format!("∂{k} {w} at stage {stage}"));
                    if n == 3 {
                        continue;
                    }
                    for l in k..=n + 1 {
                        let lhs = face(k, &face(l, w)?)?;
                        let rhs = face(l + 1, &fk)?;
                        rep.check("face-identity", lhs == rhs, || format!("∂{k}∂{l} {w} at stage {stage}"));
                    }
                }
            }
        }
    }
    Ok(rep)
}

pub fn lattice(inputs: &Inputs) -> Report {
    let mut rep = Report::new("lattice");
    let r = lattice_checks(inputs.config.d);
    absorb(&mut rep, "lattice", r);
    rep
}

fn cobar_instance(name: &str, inputs: &Inputs) -> Result<CobarInstance> {
    let d = inputs.config.d;
    let parse = |prefix: &str| name.strip_prefix(prefix).and_then(|k| k.parse::<u32>().ok()).filter(|&k| k > 0);
    let (ic, size) = if let Some(k) = parse("discrete") {
        let ic = match &inputs.internal {
            Some((_, ic)) => ic.clone(),
            None => InternalCategory::constant(&Cat::terminal(), d, "terminal")?,
        };
        (ic, k)
    } else if let Some(k) = parse("arrow") {
        (InternalCategory::constant(&Cat::walking_arrow(), d, "walking-arrow")?, k)
    } else {
        return Err(cwf_workbench::Error::Validation(format!("unknown cobar instance `{name}`; expected discrete<k> or arrow<k>")));
    };
    let site: Site = grothendieck(&ic)?;
    let gamma = Presheaf::terminal(&site.cat);
    let a = TyFam::constant(&site.cat, &gamma, size);
    let f = Elem { vals: site.cat.objects().map(|_| (0..size).collect()).collect() };
    Ok(CobarInstance { name: name.to_string(), site, gamma, a: a.clone(), b: a, f })
}

pub fn cobar_instances(inputs: &Inputs) -> Result<Vec<CobarInstance>> {
    let names: Vec<String> = if inputs.config.instance.is_empty() {
        ["discrete1", "discrete2", "discrete3", "arrow1"].iter().map(|s| s.to_string()).collect()
    } else {
        inputs.config.instance.clone()
    };
    names.iter().map(|n| cobar_instance(n, inputs)).collect()
}

pub fn cobar(inputs: &Inputs) -> Report {
    match cobar_instances(inputs) {
        Ok(instances) => verify_cobar_properties(&CobarConfig { n: inputs.config.n, budget: inputs.config.budget, instances }),
        Err(e) => {
            let mut rep = Report::new("cobar");
            rep.fail("error", e.to_string());
            rep
        }
    }
}
