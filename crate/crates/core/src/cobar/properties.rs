//! Preservation and strictification checks for `D_N`, run per instance.

use std::sync::Arc;

use super::{product_comparison, Cobar, CobarContext, CobarType};
use crate::cat::Site;
use crate::error::{Error, Result};
use crate::fib::{is_equiv_search, path_type, DiscreteFib, EquivVerdict, Family};
use crate::psh::adjoint::Adjunction;
use crate::psh::formers::{interval, paths};
use crate::psh::{Elem, ExtCode, Presheaf, Subst, TyFam};
use crate::report::{Budget, Outcome, Report};

/// A context with two types and a map between them.
#[derive(Clone, Debug)]
pub struct CobarInstance {
    pub name: String,
    pub site: Site,
    pub gamma: Presheaf,
    pub a: TyFam,
    pub b: TyFam,
    /// `f ∈ El(Γ.A, Bp)`.
    pub f: Elem,
}

#[derive(Clone, Debug)]
pub struct CobarConfig {
    pub n: usize,
    pub budget: u64,
    pub instances: Vec<CobarInstance>,
}

/// `D(X^I) -> (DX)^I`, sending δ to `(g, i) ↦ D(ev)(δ·g, τ_I(i))`.
pub fn path_comparison(cb: &Cobar, x: &Presheaf, dx: &CobarContext, budget: &mut Budget) -> Result<(Subst, Presheaf)> {
    let site = cb.site();
    let cat = &site.cat;
    let iv = interval(site)?;
    let xi = paths(site, x, budget)?;
    let xi_p = &xi.carrier.psh;
    let (dxi, div) = (cb.context(xi_p)?, cb.context(&iv)?);
    let prod = Presheaf::product(cat, xi_p, &iv);
    let dprod = cb.context(&prod)?;
    let ev = Subst {
        maps: cat
            .objects()
            .map(|c| (0..prod.sizes[c]).map(|v| xi.eval(cat, c, v / iv.sizes[c], v % iv.sizes[c])).collect())
            .collect(),
    };
    let dev = cb.subst(&dprod, dx, &ev)?;
    let (cmp, pair_psh) = product_comparison(cb, xi_p, &iv, &dxi, &div, &dprod)?;
    if !cmp.is_bijective(dprod.psh(), &pair_psh) {
        return Err(Error::InvalidStructure("D_N does not preserve X^I × I".into()));
    }
    let inv = cmp.inverse(&pair_psh);
    let tau = cb.unit(&iv, &div)?;
    let target = paths(site, dx.psh(), budget)?;
    let mut maps = Vec::with_capacity(cat.object_count());
    for c in cat.objects() {
        let mut m = Vec::with_capacity(dxi.psh().sizes[c] as usize);
        for delta in 0..dxi.psh().sizes[c] {
            let fam: Vec<u32> = target.domains[c]
                .dom
                .iter()
                .map(|&(g, i)| {
                    let y = cat.src(g);
                    let pair = dxi.psh().act(g, delta) * div.psh().sizes[y] + tau.maps[y][i as usize];
                    dev.maps[y][inv.maps[y][pair as usize] as usize]
                })
                .collect();
            m.push(target.carrier.lookup(c, &fam).ok_or_else(|| Error::NaturalityViolation("path comparison".into()))?);
        }
        maps.push(m);
    }
    Ok((Subst { maps }, target.carrier.psh))
}

/// `D_N f ∈ El(D_N Γ.D_N A, D_N B p)` for `f ∈ El(Γ.A, Bp)`.
pub fn cobar_map(cb: &Cobar, inst: &CobarInstance, gx: &CobarContext, da: &CobarType, db: &CobarType) -> Result<Elem> {
    let cat = &cb.site().cat;
    let pf = inst.a.proj().pair(&inst.b, &inst.f);
    let dpf = cb.subst(&da.total, &db.total, &pf)?;
    let code = ExtCode::new(&da.ty);
    let ext = da.ty.ext(cat, gx.psh());
    Ok(Elem {
        vals: cat
            .objects()
            .map(|c| {
                (0..ext.sizes[c])
                    .map(|cd| {
                        let (rho, j) = code.dec(c, cd);
                        let t = da.fibers.members[c][rho as usize][j as usize];
                        db.fibers.position[c][dpf.maps[c][t as usize] as usize]
                    })
                    .collect()
            })
            .collect(),
    })
}

fn levelwise_discrete(adj: &Adjunction, g: &Presheaf, a: &TyFam) -> bool {
    Family::new(Arc::new(adj.lvl.clone()), adj.u_psh(g), adj.u_ty(a)).and_then(DiscreteFib::new).is_ok()
}

fn record(rep: &mut Report, goal: String, v: &EquivVerdict, spent: u64) -> Outcome {
    rep.search(goal, v.outcome, spent);
    v.outcome
}

#[allow(clippy::too_many_arguments)]
fn search(
    rep: &mut Report,
    goal: String,
    site: &Site,
    g: &Presheaf,
    a: &TyFam,
    b: &TyFam,
    f: &Elem,
    limit: u64,
) -> Outcome {
    let mut budget = Budget::new(limit);
    let v = is_equiv_search(site, g, a, b, f, &mut budget);
    record(rep, goal, &v, budget.spent)
}

/// Runs the preservation, strictification and truncation checks on every instance.
pub fn verify_cobar_properties(config: &CobarConfig) -> Report {
    let mut rep = Report::new(format!("cobar/N={}", config.n));
    for inst in &config.instances {
        match instance(config, inst) {
            Ok(r) => rep.merge(r),
            Err(Error::BudgetExceeded(m)) => {
                rep.search(format!("{}: construction", inst.name), Outcome::Inconclusive, 0);
                rep.fact(format!("{}.budget", inst.name), m);
            }
            Err(e) => rep.fail("construction", format!("{}: {e}", inst.name)),
        }
    }
    rep.canonicalize();
    rep
}

fn instance(config: &CobarConfig, inst: &CobarInstance) -> Result<Report> {
    let name = &inst.name;
    let mut rep = Report::new(name.clone());
    let adj = Adjunction::new(inst.site.clone(), config.budget)?;
    let cb = Cobar::new(&adj, config.n, config.budget)?;
    let site = cb.site();
    let cat = &site.cat;
    let (g, a, b) = (&inst.gamma, &inst.a, &inst.b);
    let gx = cb.context(g)?;
    let da = cb.ty(g, &gx, a)?;
    let db = cb.ty(g, &gx, b)?;

    for dx in [&gx, &da.total, &db.total] {
        for c in cat.objects() {
            for i in 0..dx.psh().sizes[c] {
                let elt = dx.element(c, i);
                rep.check("cobar-compat", cb.check_cobar_compat(&dx.tower, &elt).is_ok(), || {
                    format!("{name}: element {i} at {}", site.object_label(c))
                });
            }
        }
    }
    let tau = cb.unit(g, &gx)?;
    rep.fact(format!("{name}.tau.bijective"), tau.is_bijective(g, gx.psh()));
    for c in cat.objects() {
        rep.fact(format!("{name}.D.size.{}", site.object_label(c)), gx.psh().sizes[c]);
    }

    // (a) products and paths
    let (ga, gb) = (a.ext(cat, g), b.ext(cat, g));
    let gab = Presheaf::product(cat, &ga, &gb);
    let dab = cb.context(&gab)?;
    let (cmp, prod) = product_comparison(&cb, &ga, &gb, &da.total, &db.total, &dab)?;
    rep.check("products", cmp.is_bijective(dab.psh(), &prod), || format!("{name}: D(Γ.A × Γ.B)"));
    let mut budget = Budget::new(config.budget);
    match path_comparison(&cb, &ga, &da.total, &mut budget) {
        Ok((pc, target)) => {
            let dxi = cb.context(&paths(site, &ga, &mut budget)?.carrier.psh)?;
            rep.check("paths", pc.is_bijective(dxi.psh(), &target), || format!("{name}: D(Γ.A^I)"));
        }
        Err(Error::BudgetExceeded(m)) => {
            rep.search(format!("{name}: paths"), Outcome::Inconclusive, budget.spent);
            rep.fact(format!("{name}.paths.budget"), m);
        }
        Err(e) => rep.fail("paths", format!("{name}: {e}")),
    }

    // (b) levelwise equivalences become equivalences
    let (ug, ua, ub) = (adj.u_psh(g), adj.u_ty(a), adj.u_ty(b));
    let lvl_f = search(&mut rep, format!("{name}: U f"), &adj.lvl, &ug, &ua, &ub, &inst.f, config.budget);
    let df = cobar_map(&cb, inst, &gx, &da, &db)?;
    let d_f = search(&mut rep, format!("{name}: D f"), site, gx.psh(), &da.ty, &db.ty, &df, config.budget);
    if lvl_f == Outcome::Found {
        rep.check("strictify-equiv", d_f != Outcome::Refuted, || format!("{name}: U f is an equivalence, D f is not"));
    }

    // (c) τ_A is a levelwise equivalence for levelwise fibrant A
    let mut modal = true;
    for (label, ty, dt) in [("A", a, &da), ("B", b, &db)] {
        if !levelwise_discrete(&adj, g, ty) {
            rep.fact(format!("{name}.{label}.levelwise-structure"), "none");
            modal = false;
            continue;
        }
        let tau_a = cb.unit_ty(g, ty, dt)?;
        let over = dt.ty.subst(cat, &tau);
        let lvl = search(&mut rep, format!("{name}: U τ_{label}"), &adj.lvl, &ug, &adj.u_ty(ty), &adj.u_ty(&over), &tau_a, config.budget);
        rep.check("unit-levelwise-equiv", lvl != Outcome::Refuted, || format!("{name}: U τ_{label} refuted"));
        let global = search(&mut rep, format!("{name}: τ_{label}"), site, g, ty, &over, &tau_a, config.budget);
        modal &= global == Outcome::Found;
    }

    // (d) between modal types the two verdicts agree
    if modal {
        let global = search(&mut rep, format!("{name}: f"), site, g, a, b, &inst.f, config.budget);
        if lvl_f != Outcome::Inconclusive && global != Outcome::Inconclusive {
            rep.check("equiv-coincide", lvl_f == global, || format!("{name}: U f {lvl_f:?}, f {global:?}"));
        }
    }

    // (e) levelwise h-sets give h-sets
    if levelwise_discrete(&adj, g, a) {
        let mut budget = Budget::new(config.budget);
        match path_type(site, gx.psh(), &da.ty, &mut budget) {
            Ok(pt) => {
                for c in cat.objects() {
                    for rho in 0..gx.psh().sizes[c] {
                        let n = da.ty.fiber(c, rho);
                        let mut seen = vec![vec![0u32; n as usize]; n as usize];
                        for s in 0..pt.pi.ty.fiber(c, rho) {
                            seen[pt.eval(c, rho, s, false) as usize][pt.eval(c, rho, s, true) as usize] += 1;
                        }
                        for (u, row) in seen.iter().enumerate() {
                            for (v, &count) in row.iter().enumerate() {
                                rep.check("h-set", count == (u == v) as u32, || {
                                    format!("{name}: {count} paths {u} ~> {v} at {} over {rho}", site.object_label(c))
                                });
                            }
                        }
                    }
                }
            }
            Err(Error::BudgetExceeded(_)) => rep.search(format!("{name}: h-set"), Outcome::Inconclusive, budget.spent),
            Err(e) => return Err(e),
        }
    }
    Ok(rep)
}
