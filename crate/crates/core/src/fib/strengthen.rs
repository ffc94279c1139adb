//! Composition over the total space `Σ_{C0} UΓ` from a levelwise structure on UA and a
//! filling structure on C1.
//!
//! For a path `⟨x, γ⟩` the transport `f := κ(ē, ⊥, ⟨x_ē·p, x⟩, id)` is a path of morphisms
//! `x_ē -> x` starting at the identity; then
//! `ᾱ(e, φ, ⟨x, γ⟩, a) = α_{x_ē}(e, φ, γf, af)` at ē.

use std::collections::HashMap;
use std::sync::Arc;

use super::{
    box_shape, check_fib_structure, extent, problems, Composition, Family, Fibrancy, Marker, Problem, Reindexed, Scope,
};
use crate::cat::{grothendieck, Cat, CubeCategory, CubeMap, InternalCategory, Mor, Obj, Site};
use crate::error::{Error, Result};
use crate::psh::{Presheaf, Subst, TyFam};
use crate::report::{Budget, Report};

fn box_site(d: usize) -> Result<Arc<Site>> {
    Ok(Arc::new(grothendieck(&InternalCategory::constant(&Cat::terminal(), d, "□")?)?))
}

fn index_in(cube: &CubeCategory, m: &CubeMap) -> Result<Mor> {
    cube.lookup(m).ok_or_else(|| Error::BudgetExceeded(format!("cube map {} beyond the dimension bound", m.name())))
}

/// C1 as a type over C0 × C0 on the cube site. The point `(y, x)` at stage k has index
/// `y·|C0(k)| + x` and its fiber lists `Hom(y, x)` in the stage's order.
pub fn transport_family(ic: &InternalCategory) -> Result<Family> {
    let bs = box_site(ic.dim())?;
    let cat = &bs.cat;
    let n = |k: usize| ic.stages[k].object_count() as u32;
    let split = |k: usize, yx: u32| ((yx / n(k)) as Obj, (yx % n(k)) as Obj);
    let mut sizes = Vec::new();
    let mut fibers = Vec::new();
    for c in cat.objects() {
        let k = bs.stage(c);
        sizes.push(n(k) * n(k));
        fibers.push(
            (0..n(k) * n(k))
                .map(|yx| {
                    let (y, x) = split(k, yx);
                    ic.stages[k].homs(y, x).len() as u32
                })
                .collect::<Vec<_>>(),
        );
    }
    let mut ctx_restr = Vec::new();
    let mut ty_restr = Vec::new();
    for m in cat.morphisms() {
        let f = bs.cube().map(bs.cube_part(m));
        let fun = &ic.restrict[index_in(&ic.cube, f)?];
        let (l, k) = (f.src, f.dst);
        let mut cr = Vec::new();
        let mut tr = Vec::new();
        for yx in 0..n(k) * n(k) {
            let (y, x) = split(k, yx);
            let (y1, x1) = (fun.obj[y], fun.obj[x]);
            cr.push(y1 as u32 * n(l) + x1 as u32);
            let target = ic.stages[l].homs(y1, x1);
            tr.push(
                ic.stages[k]
                    .homs(y, x)
                    .iter()
                    .map(|&h| target.iter().position(|&g| g == fun.mor[h]).map(|i| i as u32))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::InvalidStructure("restriction of C1 leaves the hom-set".into()))?,
            );
        }
        ctx_restr.push(cr);
        ty_restr.push(tr);
    }
    Family::new(bs.clone(), Presheaf { sizes, restr: ctx_restr }, TyFam { sizes: fibers, restr: ty_restr })
}

/// A family on ∫C together with its levelwise restriction and its total space over the
/// cube site.
#[derive(Clone, Debug)]
pub struct Total {
    pub full: Family,
    pub lvl: Family,
    /// `Σ_{C0} UΓ` with UA over it.
    pub fam: Family,
    points: Vec<Vec<(Obj, u32)>>,
    index: HashMap<(Obj, u32), u32>,
}

impl Total {
    pub fn new(full: Family) -> Result<Total> {
        let site = full.site.clone();
        let (lvl_site, incl) = site.levelwise()?;
        let lvl = Family::new(
            Arc::new(lvl_site),
            Presheaf { sizes: full.ctx.sizes.clone(), restr: incl.iter().map(|&m| full.ctx.restr[m].clone()).collect() },
            TyFam { sizes: full.ty.sizes.clone(), restr: incl.iter().map(|&m| full.ty.restr[m].clone()).collect() },
        )?;
        let d = site.dim();
        let bs = box_site(d)?;
        let mut points = vec![Vec::new(); d + 1];
        let mut index = HashMap::new();
        for c in site.cat.objects() {
            let k = site.stage(c);
            for g in 0..full.ctx.size(c) {
                index.insert((c, g), points[k].len() as u32);
                points[k].push((c, g));
            }
        }
        let bcat = &bs.cat;
        let mut sizes = Vec::new();
        let mut fibers = Vec::new();
        for b in bcat.objects() {
            let pts = &points[bs.stage(b)];
            sizes.push(pts.len() as u32);
            fibers.push(pts.iter().map(|&(c, g)| full.ty.fiber(c, g)).collect::<Vec<_>>());
        }
        let mut ctx_restr = Vec::new();
        let mut ty_restr = Vec::new();
        for m in bcat.morphisms() {
            let f = index_in(site.cube(), bs.cube().map(bs.cube_part(m)))?;
            let mut cr = Vec::new();
            let mut tr = Vec::new();
            for &(c, g) in &points[bs.stage(bcat.dst(m))] {
                let lift = site.lift(c, f)?;
                cr.push(index[&(site.cat.src(lift), full.ctx.act(lift, g))]);
                tr.push(full.ty.restr[lift][g as usize].clone());
            }
            ctx_restr.push(cr);
            ty_restr.push(tr);
        }
        let fam = Family::new(bs, Presheaf { sizes, restr: ctx_restr }, TyFam { sizes: fibers, restr: ty_restr })?;
        Ok(Total { full, lvl, fam, points, index })
    }

    /// The ∫C object and context point behind a point of the total space at stage k.
    pub fn point(&self, k: usize, t: u32) -> (Obj, u32) {
        self.points[k][t as usize]
    }

    pub fn index(&self, c: Obj, g: u32) -> Option<u32> {
        self.index.get(&(c, g)).copied()
    }

    fn site(&self) -> &Site {
        &self.full.site
    }

    fn ic(&self) -> &InternalCategory {
        &self.full.site.internal
    }

    /// The morphism `(id, h) : (l, y') -> (l, y)` for `h : y' -> y` in C(l), y the point of c.
    fn c_morphism(&self, c: Obj, h: Mor) -> Result<Mor> {
        let site = self.site();
        let id = index_in(site.cube(), &CubeMap::identity(site.stage(c)))?;
        site.morphism(id, site.point(c), h)
            .ok_or_else(|| Error::InvalidStructure(format!("no C-morphism into {}", site.object_label(c))))
    }

    /// The ∫C-restriction of a cube map at c.
    fn lift_cube(&self, c: Obj, g: &CubeMap) -> Result<Mor> {
        let site = self.site();
        site.lift(c, index_in(site.cube(), g)?)
    }
}

/// The transport path for one problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transport {
    /// `x_ē ∈ C0(k)`.
    pub start: Obj,
    /// `f : x_ē·p -> x` in C(k+1).
    pub path: Mor,
    /// Whether `f_ē` is the identity of `x_ē`.
    pub starts_at_id: bool,
    /// Whether f is an identity morphism.
    pub degenerate: bool,
}

pub struct Strengthened {
    pub total: Total,
    alpha: Arc<dyn Fibrancy>,
    kappa: Arc<dyn Fibrancy>,
}

/// ᾱ from κ on C1 and a levelwise α on UA over UΓ. Both inputs are validated first.
pub fn strengthen_fibrancy(
    kappa: Arc<dyn Fibrancy>,
    alpha: Arc<dyn Fibrancy>,
    full: Family,
    budget: &mut Budget,
) -> Result<Strengthened> {
    let total = Total::new(full)?;
    let c1 = transport_family(total.ic())?;
    let kf = kappa.family();
    if kf.ctx != c1.ctx || kf.ty != c1.ty {
        return Err(Error::InvalidStructure("κ is not a structure on C1 over C0 × C0".into()));
    }
    let af = alpha.family();
    if af.ctx != total.lvl.ctx || af.ty != total.lvl.ty || af.site.cat.morphism_count() != total.lvl.cat().morphism_count() {
        return Err(Error::InvalidStructure("α is not a levelwise structure on UA over UΓ".into()));
    }
    for (s, m, what) in [(&kappa, Marker::Full, "κ"), (&alpha, Marker::Levelwise, "α")] {
        let rep = check_fib_structure(s.as_ref(), m, Scope::All, budget)?;
        if let Some(f) = rep.failures.first() {
            return Err(Error::InvalidStructure(format!("{what}: {} {}", f.equation, f.witness)));
        }
    }
    Ok(Strengthened { total, alpha, kappa })
}

impl Strengthened {
    pub fn transport(&self, p: &Problem) -> Result<Transport> {
        let t = &self.total;
        let ic = t.ic();
        let k = t.fam.site.stage(p.base);
        let (c, _) = t.point(k + 1, p.gamma);
        let x = t.site().point(c);
        let fe = index_in(&ic.cube, &CubeMap::endpoint(k, !p.e))?;
        let pk = index_in(&ic.cube, &CubeMap::projection(k))?;
        let xe = ic.restrict[fe].obj[x];
        let xep = ic.restrict[pk].obj[xe];
        let n = ic.stages[k + 1].object_count() as u32;
        let id_e = ic.stages[k].id(xe);
        let start = ic.stages[k].homs(xe, xe).iter().position(|&h| h == id_e).unwrap() as u32;
        let kfam = self.kappa.family();
        let kp = Problem::from_start(kfam, p.base, !p.e, xep as u32 * n + x as u32, start)?;
        let fi = self.kappa.fill(&kp)?;
        let path = ic.stages[k + 1].homs(xep, x)[fi as usize];
        Ok(Transport {
            start: xe,
            path,
            starts_at_id: ic.restrict[fe].mor[path] == id_e,
            degenerate: ic.stages[k + 1].is_id(path),
        })
    }

    /// The partial element `a` moved along `(id, h·g)` for `h : x' -> x` at stage k+1.
    fn move_partial(&self, p: &Problem, c: Obj, h: Mor, target_ext: &[Mor], target_site: &Site) -> Result<Vec<u32>> {
        let t = &self.total;
        let bs = &t.fam.site;
        let ic = t.ic();
        let cy_b = bs.cyl(p.base)?;
        let g0 = t.point(bs.stage(cy_b), p.gamma).1;
        let mut out = Vec::with_capacity(target_ext.len());
        for &m in target_ext {
            let g = target_site.cube().map(target_site.cube_part(m));
            let mb = bs.lift(cy_b, index_in(bs.cube(), g)?)?;
            let a = p.value(mb).ok_or_else(|| Error::InternalLawViolation("total-space extent mismatch".into()))?;
            let lift = t.lift_cube(c, g)?;
            let hg = ic.restrict[index_in(&ic.cube, g)?].mor[h];
            let m = t.c_morphism(t.site().cat.src(lift), hg)?;
            out.push(t.full.ty.act(m, t.full.ctx.act(lift, g0), a));
        }
        Ok(out)
    }
}

impl Composition for Strengthened {
    fn family(&self) -> &Family {
        &self.total.fam
    }

    fn comp(&self, p: &Problem) -> Result<u32> {
        let t = &self.total;
        let site = t.site();
        let bs = &t.fam.site;
        let k = bs.stage(p.base);
        let (c, g) = t.point(k + 1, p.gamma);
        let tr = self.transport(p)?;
        if !tr.starts_at_id {
            return Err(Error::InternalLawViolation("transport does not start at the identity".into()));
        }
        let cs = site.object(k, tr.start).ok_or_else(|| Error::Validation("missing start object".into()))?;
        let lvl = &t.lvl.site;
        let cys = lvl.cyl(cs)?;
        let gf = t.full.ctx.act(t.c_morphism(c, tr.path)?, g);
        let ext = extent(lvl, cys, &box_shape(&p.phi, p.e)?)?;
        let partial = self.move_partial(p, c, tr.path, &ext, lvl)?;
        let q = Problem { base: cs, e: p.e, phi: p.phi.clone(), gamma: gf, extent: ext, partial };
        let u = self.alpha.fill(&q)?;
        let end = lvl.endpoint(cs, !p.e)?;
        let here = t.lvl.ctx.act(end, gf);
        let expect = t.full.ctx.act(t.lift_cube(c, &CubeMap::endpoint(k, !p.e))?, g);
        if here != expect {
            return Err(Error::InternalLawViolation("γf and γ disagree at the end".into()));
        }
        Ok(t.lvl.ty.act(end, gf, u))
    }
}

/// ᾱ commutes with moving a problem along a path of C-morphisms `h : x' -> x`.
pub fn check_c_action(s: &Strengthened, budget: &mut Budget) -> Result<Report> {
    let t = &s.total;
    let site = t.site();
    let ic = t.ic();
    let bs = t.fam.site.clone();
    let mut rep = Report::new(format!("c-action/{}", site.internal.name));
    for p in problems(&t.fam, Scope::All, 1, budget)? {
        budget.charge(1, "C-action comparison")?;
        let k = bs.stage(p.base);
        let (c, g) = t.point(k + 1, p.gamma);
        let x = site.point(c);
        let stage = &ic.stages[k + 1];
        let out = s.comp(&p)?;
        let fe = index_in(&ic.cube, &CubeMap::endpoint(k, !p.e))?;
        let end_lift = t.lift_cube(c, &CubeMap::endpoint(k, !p.e))?;
        let c_end = site.cat.src(end_lift);
        let g_end = t.full.ctx.act(end_lift, g);
        for h in stage.morphisms() {
            if stage.dst(h) != x || stage.is_id(h) {
                continue;
            }
            let m = t.c_morphism(c, h)?;
            let (c1, g1) = (site.cat.src(m), t.full.ctx.act(m, g));
            let partial = s.move_partial(&p, c, h, &p.extent, &bs)?;
            let q = Problem { gamma: t.index(c1, g1).unwrap(), partial, ..p.clone() };
            let lhs = s.comp(&q)?;
            let rhs = t.full.ty.act(t.c_morphism(c_end, ic.restrict[fe].mor[h])?, g_end, out);
            rep.check("c-action-compatible", lhs == rhs, || {
                format!("{} along {}: {lhs} vs {rhs}", p.describe(&t.fam), stage.morphism_name(h))
            });
        }
    }
    Ok(rep)
}

/// Builds ᾱ for `Aσ` over Δ from `α·σ` and compares with ᾱ for A on every problem over
/// `Σ_{C0} UΔ`.
pub fn check_strengthen_naturality(s: &Strengthened, delta: Presheaf, sigma: Subst, budget: &mut Budget) -> Result<Report> {
    let t = &s.total;
    let cat = t.full.cat();
    sigma.validate(cat, &delta, &t.full.ctx)?;
    let ty = t.full.ty.subst(cat, &sigma);
    let full_d = Family::new(t.full.site.clone(), delta.clone(), ty)?;
    let lvl_delta = Presheaf {
        sizes: delta.sizes.clone(),
        restr: Total::new(full_d.clone())?.lvl.ctx.restr,
    };
    let alpha_d: Arc<dyn Fibrancy> = Arc::new(Reindexed::new(s.alpha.clone(), lvl_delta, sigma.clone())?);
    let sd = strengthen_fibrancy(s.kappa.clone(), alpha_d, full_d, budget)?;
    let mut rep = Report::new(format!("strengthen-naturality/{}", t.full.site.internal.name));
    let bs = &sd.total.fam.site;
    for p in problems(&sd.total.fam, Scope::All, 1, budget)? {
        budget.charge(1, "naturality comparison")?;
        let k = bs.stage(p.base);
        let (c, dl) = sd.total.point(k + 1, p.gamma);
        let g = t.index(c, sigma.maps[c][dl as usize]).unwrap();
        let lhs = sd.comp(&p)?;
        let rhs = s.comp(&Problem { gamma: g, ..p.clone() })?;
        rep.check("strengthen-natural", lhs == rhs, || format!("{}: {lhs} vs {rhs}", p.describe(&sd.total.fam)));
    }
    Ok(rep)
}
