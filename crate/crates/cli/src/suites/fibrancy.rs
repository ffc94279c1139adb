//! Closure of fibrancy structures under the type formers, strengthening, and two planted canaries.

use std::sync::Arc;

use cwf_workbench::cat::{grothendieck, Cat, InternalCategory, Obj, Site};
use cwf_workbench::fib::{
    check_c_action, check_comp_structure, check_fib_structure, check_strengthen_naturality, fib_close, problems,
    strengthen_fibrancy, transport_family, BoundaryBreak, ChoiceFib, DiscreteFib, Family, Fibrancy, Former, Marker, Scope,
    Total,
};
use cwf_workbench::psh::formers::interval;
use cwf_workbench::psh::{Presheaf, Subst, TyFam};
use cwf_workbench::{Budget, Report, Result};

use super::{absorb, Inputs};

fn site(ic: InternalCategory) -> Result<Arc<Site>> {
    Ok(Arc::new(grothendieck(&ic)?))
}

fn constant(s: &Arc<Site>, ctx: &Presheaf, n: u32) -> Result<Family> {
    Family::new(s.clone(), ctx.clone(), TyFam::constant(&s.cat, ctx, n))
}

fn interval_family(s: &Arc<Site>, ctx: &Presheaf) -> Result<Family> {
    Family::new(s.clone(), ctx.clone(), TyFam::weaken(&s.cat, ctx, &interval(s)?))
}

fn closure(d: usize, limit: u64) -> Result<Report> {
    let s = site(InternalCategory::constant(&Cat::terminal(), d, "terminal")?)?;
    let one = Presheaf::terminal(&s.cat);
    let mut rep = Report::new("closure");
    let full = |f: &dyn Fibrancy| check_fib_structure(f, Marker::Full, Scope::All, &mut Budget::new(limit));
    for n in 1..=3 {
        let fa = constant(&s, &one, n)?;
        let a: Arc<dyn Fibrancy> = Arc::new(DiscreteFib::new(fa.clone())?);
        rep.merge(full(a.as_ref())?);
        rep.merge(full(fib_close(Former::Path, a.clone(), None, &mut Budget::new(limit))?.as_ref())?);
        let ga = fa.ty.ext(&s.cat, &one);
        for m in 1..=3 {
            let b: Arc<dyn Fibrancy> = Arc::new(DiscreteFib::new(constant(&s, &ga, m)?)?);
            rep.merge(full(fib_close(Former::Sigma, a.clone(), Some(b.clone()), &mut Budget::new(limit))?.as_ref())?);
            if n * m <= 4 {
                rep.merge(full(fib_close(Former::Pi, a.clone(), Some(b), &mut Budget::new(limit))?.as_ref())?);
            }
        }
        // a non-discrete second component
        let b: Arc<dyn Fibrancy> = Arc::new(ChoiceFib::new(interval_family(&s, &ga)?, |_, _| 0));
        rep.merge(full(fib_close(Former::Sigma, a, Some(b), &mut Budget::new(limit))?.as_ref())?);
    }
    Ok(rep)
}

/// A(a) = 2, A(b) = 3 over the constant-2 context, with the arrow acting by [0, 1, 1].
fn arrow_family(s: &Arc<Site>) -> Result<Family> {
    let g = Presheaf::constant(&s.cat, 2);
    let a_obj = |c: Obj| s.internal.stages[s.stage(c)].object_name(s.point(c)) == "a";
    let sizes: Vec<Vec<u32>> = s.cat.objects().map(|c| vec![if a_obj(c) { 2 } else { 3 }; 2]).collect();
    let restr = s
        .cat
        .morphisms()
        .map(|m| {
            let row: Vec<u32> = if a_obj(s.cat.dst(m)) {
                vec![0, 1]
            } else if a_obj(s.cat.src(m)) {
                vec![0, 1, 1]
            } else {
                vec![0, 1, 2]
            };
            vec![row; 2]
        })
        .collect();
    Family::new(s.clone(), g, TyFam { sizes, restr })
}

fn strengthening(d: usize, limit: u64) -> Result<Report> {
    let mut rep = Report::new("strengthen");
    let budget = || Budget::new(limit);

    let ic = InternalCategory::constant(&Cat::walking_arrow(), d, "walking-arrow")?;
    let s = site(ic.clone())?;
    let full = arrow_family(&s)?;
    let total = Total::new(full.clone())?;
    let alpha: Arc<dyn Fibrancy> = Arc::new(DiscreteFib::new(total.lvl.clone())?);
    let kappa: Arc<dyn Fibrancy> = Arc::new(DiscreteFib::new(transport_family(&ic)?)?);
    let sb = strengthen_fibrancy(kappa, alpha, full, &mut budget())?;
    rep.merge(check_comp_structure(&sb, Marker::Full, Scope::All, &mut budget())?);
    rep.merge(check_c_action(&sb, &mut budget())?);
    for pick in 0..2 {
        let delta = Presheaf::terminal(&s.cat);
        let sigma = Subst { maps: s.cat.objects().map(|_| vec![pick]).collect() };
        rep.merge(check_strengthen_naturality(&sb, delta, sigma, &mut budget())?);
    }

    let ic = InternalCategory::codiscrete_interval(d)?;
    let s = site(ic.clone())?;
    let one = Presheaf::terminal(&s.cat);
    let full = interval_family(&s, &one)?;
    let total = Total::new(full.clone())?;
    let alpha: Arc<dyn Fibrancy> = Arc::new(ChoiceFib::new(total.lvl.clone(), |_, _| 0));
    let kappa: Arc<dyn Fibrancy> = Arc::new(DiscreteFib::new(transport_family(&ic)?)?);
    let sb = strengthen_fibrancy(kappa, alpha, full, &mut budget())?;
    rep.merge(check_comp_structure(&sb, Marker::Full, Scope::All, &mut budget())?);
    rep.merge(check_c_action(&sb, &mut budget())?);
    let delta = Presheaf::terminal(&s.cat);
    rep.merge(check_strengthen_naturality(&sb, delta, Subst::identity(&one), &mut budget())?);
    Ok(rep)
}

/// On the constant walking-arrow site, fills the interval from 0 by the generic path over b
/// and by the constant path elsewhere. Each stage is fine; restriction along the arrow is not.
fn pointwise_choice(s: &Arc<Site>) -> Result<ChoiceFib> {
    let one = Presheaf::terminal(&s.cat);
    let fam = interval_family(s, &one)?;
    let f2 = fam.clone();
    let b = s.internal.stages[0].object_by_name("b").expect("walking arrow has b");
    Ok(ChoiceFib::new(fam, move |p, all| {
        let s = &f2.site;
        let start = p.value(s.endpoint(p.base, p.e).unwrap()).unwrap();
        let degenerate = f2.ty.act(s.proj(p.base).unwrap(), 0, start);
        let pick_generic = s.point(p.base) == b && !p.e && p.phi.is_bottom() && start == 0;
        all.iter().position(|&u| if pick_generic { u != degenerate } else { u == degenerate }).unwrap_or(0)
    }))
}

fn canaries(d: usize, limit: u64) -> Result<Report> {
    let mut rep = Report::new("canaries");
    let s = site(InternalCategory::constant(&Cat::terminal(), d, "terminal")?)?;
    let one = Presheaf::terminal(&s.cat);
    let a = constant(&s, &one, 2)?;
    let good: Arc<dyn Fibrancy> = Arc::new(DiscreteFib::new(a.clone())?);
    let probs = problems(&a, Scope::All, 1, &mut Budget::new(limit))?;
    let bad = BoundaryBreak::new(good, probs[1].clone());
    let got = check_fib_structure(&bad, Marker::Full, Scope::All, &mut Budget::new(limit))?;
    let eqs: Vec<&str> = got.failures.iter().map(|f| f.equation.as_str()).collect();
    rep.check("canary-boundary", eqs == ["fill-boundary"], || format!("witnesses: {eqs:?}"));
    rep.fact("canary-boundary.witnesses", got.failures.len());

    let s = site(InternalCategory::constant(&Cat::walking_arrow(), d, "walking-arrow")?)?;
    let ch = pointwise_choice(&s)?;
    let lvl = check_fib_structure(&ch, Marker::Levelwise, Scope::All, &mut Budget::new(limit))?;
    rep.check("canary-levelwise-clean", lvl.pass(), || format!("{} levelwise failures", lvl.failures.len()));
    let got = check_fib_structure(&ch, Marker::Full, Scope::All, &mut Budget::new(limit))?;
    let eqs: Vec<&str> = got.failures.iter().map(|f| f.equation.as_str()).collect();
    rep.check("canary-compatible", eqs == ["fill-compatible"], || format!("witnesses: {eqs:?}"));
    rep.fact("canary-compatible.witnesses", got.failures.len());
    Ok(rep)
}

pub fn fibrancy(inputs: &Inputs) -> Report {
    let d = inputs.config.d.max(1);
    let limit = inputs.config.budget;
    let mut rep = Report::new("fibrancy");
    rep.fact("d", d);
    absorb(&mut rep, "closure", closure(d, limit));
    absorb(&mut rep, "strengthen", strengthening(d, limit));
    absorb(&mut rep, "canaries", canaries(d, limit));
    rep
}
