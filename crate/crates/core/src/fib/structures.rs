//! Concrete filling structures and the closure of fibrancy under type formers.

use std::collections::HashMap;
use std::sync::Arc;

use super::{check_fib_structure, extent, Family, Fibrancy, Composition, Marker, Problem, Scope};
use crate::cat::{Cofibration, Mor, Obj};
use crate::error::{Error, Result};
use crate::psh::formers::pi_type;
use crate::psh::{ExtCode, Subst, TyFam};
use crate::report::{Budget, Report};

/// Every `u ∈ A(c ⊗ I, γ)` agreeing with the partial element.
pub fn valid_fillers(fam: &Family, p: &Problem) -> Result<Vec<u32>> {
    let cy = fam.site.cyl(p.base)?;
    Ok((0..fam.ty.fiber(cy, p.gamma)).filter(|&u| p.mismatch(fam, u).is_none()).collect())
}

/// Filling for types whose restriction to either end of a cylinder is a bijection: the
/// filler is the unique extension of the start point.
pub struct DiscreteFib {
    fam: Family,
    /// `(base, γ, e)` to the inverse of restriction along the endpoint.
    table: HashMap<(Obj, u32, bool), Vec<u32>>,
}

impl DiscreteFib {
    pub fn new(fam: Family) -> Result<DiscreteFib> {
        let site = fam.site.clone();
        let mut table = HashMap::new();
        for c in fam.cat().objects() {
            if site.stage(c) >= site.dim() {
                continue;
            }
            let cy = site.cyl(c)?;
            for gamma in 0..fam.ctx.size(cy) {
                for e in [false, true] {
                    let end = site.endpoint(c, e)?;
                    let n = fam.ty.fiber(c, fam.ctx.act(end, gamma));
                    let mut inv = vec![u32::MAX; n as usize];
                    for u in 0..fam.ty.fiber(cy, gamma) {
                        let v = fam.ty.act(end, gamma, u) as usize;
                        if inv[v] != u32::MAX {
                            return Err(Error::InvalidStructure(format!(
                                "restriction to the end {} of {} is not injective at γ = {gamma}",
                                e as u8,
                                site.object_label(cy)
                            )));
                        }
                        inv[v] = u;
                    }
                    if inv.contains(&u32::MAX) {
                        return Err(Error::InvalidStructure(format!(
                            "restriction to the end {} of {} is not surjective at γ = {gamma}",
                            e as u8,
                            site.object_label(cy)
                        )));
                    }
                    table.insert((c, gamma, e), inv);
                }
            }
        }
        Ok(DiscreteFib { fam, table })
    }
}

impl Fibrancy for DiscreteFib {
    fn family(&self) -> &Family {
        &self.fam
    }

    fn fill(&self, p: &Problem) -> Result<u32> {
        let end = self.fam.site.endpoint(p.base, p.e)?;
        let start = p.value(end).ok_or_else(|| Error::InvalidStructure("partial element misses its start".into()))?;
        Ok(self.table[&(p.base, p.gamma, p.e)][start as usize])
    }

    fn is_discrete(&self) -> bool {
        true
    }
}

/// Position of `(u, v)` in the fiber of `Σ_A B` at `(x, ρ)`.
fn sigma_enc(b: &TyFam, code: &ExtCode, x: Obj, rho: u32, u: u32, v: u32) -> u32 {
    (0..u).map(|w| b.sizes[x][code.enc(x, rho, w) as usize]).sum::<u32>() + v
}

fn sigma_dec(a: &TyFam, b: &TyFam, code: &ExtCode, x: Obj, rho: u32, mut s: u32) -> (u32, u32) {
    for u in 0..a.fiber(x, rho) {
        let n = b.sizes[x][code.enc(x, rho, u) as usize];
        if s < n {
            return (u, s);
        }
        s -= n;
    }
    unreachable!("pair code outside the Σ fiber")
}

/// Fill the first component, then the second over the filled path.
pub struct SigmaFib {
    fam: Family,
    a: Arc<dyn Fibrancy>,
    b: Arc<dyn Fibrancy>,
    code: ExtCode,
}

impl Fibrancy for SigmaFib {
    fn family(&self) -> &Family {
        &self.fam
    }

    fn fill(&self, p: &Problem) -> Result<u32> {
        let cat = self.fam.cat();
        let (at, bt) = (&self.a.family().ty, &self.b.family().ty);
        let ctx = &self.fam.ctx;
        let mut us = Vec::with_capacity(p.partial.len());
        let mut vs = Vec::with_capacity(p.partial.len());
        for (&m, &s) in p.extent.iter().zip(&p.partial) {
            let (u, v) = sigma_dec(at, bt, &self.code, cat.src(m), ctx.act(m, p.gamma), s);
            us.push(u);
            vs.push(v);
        }
        let pa = Problem { partial: us, ..p.clone() };
        let u = self.a.fill(&pa)?;
        let cy = self.fam.site.cyl(p.base)?;
        let pb = Problem { gamma: self.code.enc(cy, p.gamma, u), partial: vs, ..p.clone() };
        let v = self.b.fill(&pb)?;
        Ok(sigma_enc(bt, &self.code, cy, p.gamma, u, v))
    }

    fn depth(&self) -> usize {
        self.a.depth().max(self.b.depth())
    }

    fn is_discrete(&self) -> bool {
        self.a.is_discrete() && self.b.is_discrete()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Former {
    Sigma,
    Pi,
    Path,
}

fn require_valid(s: &dyn Fibrancy, what: &str, budget: &mut Budget) -> Result<()> {
    let rep = check_fib_structure(s, Marker::Full, Scope::All, budget)?;
    if let Some(f) = rep.failures.first() {
        return Err(Error::InvalidStructure(format!("{what}: {} {}", f.equation, f.witness)));
    }
    Ok(())
}

/// A filling structure on `Σ_A B`, `Π_A B` or `Path A` from structures on A and B.
///
/// Π and Path fillers in general need the family one stage above the problem's cylinder,
/// which the top stage of a truncated site does not have. They are produced only when the
/// formed type is discrete, where the filler is forced by the start point; otherwise the
/// request is rejected as exceeding the dimension budget.
pub fn fib_close(
    former: Former,
    a: Arc<dyn Fibrancy>,
    b: Option<Arc<dyn Fibrancy>>,
    budget: &mut Budget,
) -> Result<Arc<dyn Fibrancy>> {
    require_valid(a.as_ref(), "structure on A", budget)?;
    let fa = a.family().clone();
    let cat = fa.site.cat.clone();
    let need_b = || b.clone().ok_or_else(|| Error::ArityMismatch("former needs a structure on B".into()));
    match former {
        Former::Sigma | Former::Pi => {
            let b = need_b()?;
            let fb = b.family();
            if fb.ctx != fa.ty.ext(&cat, &fa.ctx) {
                return Err(Error::InvalidStructure("B does not live over Γ.A".into()));
            }
            require_valid(b.as_ref(), "structure on B", budget)?;
            if former == Former::Sigma {
                let ty = fa.ty.sigma(&cat, &fa.ctx, &fb.ty);
                let fam = Family::new(fa.site.clone(), fa.ctx.clone(), ty)?;
                return Ok(Arc::new(SigmaFib { fam, code: ExtCode::new(&fa.ty), a, b }));
            }
            if !(a.is_discrete() && b.is_discrete()) {
                return Err(Error::BudgetExceeded("Π filling over non-discrete families needs stages above d".into()));
            }
            let pi = pi_type(&cat, &fa.ctx, &fa.ty, &fb.ty, budget)?;
            discrete_or_budget(Family::new(fa.site.clone(), fa.ctx.clone(), pi.ty)?, "Π")
        }
        Former::Path => {
            if !a.is_discrete() {
                return Err(Error::BudgetExceeded("path filling over non-discrete families needs stages above d".into()));
            }
            let pt = super::path_type(&fa.site, &fa.ctx, &fa.ty, budget)?;
            discrete_or_budget(Family::new(fa.site.clone(), fa.ctx.clone(), pt.pi.ty)?, "path")
        }
    }
}

fn discrete_or_budget(fam: Family, what: &str) -> Result<Arc<dyn Fibrancy>> {
    match DiscreteFib::new(fam) {
        Ok(s) => Ok(Arc::new(s)),
        Err(Error::InvalidStructure(msg)) => {
            Err(Error::BudgetExceeded(format!("{what} type is not discrete below the truncation ({msg})")))
        }
        Err(e) => Err(e),
    }
}

/// Filling from composition: `fill(e, φ, γ, a) = comp(e, φp ∨ (i=e), γ∘conn, a∘conn)`,
/// where `conn(i, j)` is `i ∧ j` for e = 0 and `i ∨ j` for e = 1.
pub struct FromConnections<C> {
    comp: C,
}

pub fn fill_from_connections<C: Composition>(comp: C) -> FromConnections<C> {
    FromConnections { comp }
}

impl<C: Composition> Fibrancy for FromConnections<C> {
    fn family(&self) -> &Family {
        self.comp.family()
    }

    fn fill(&self, p: &Problem) -> Result<u32> {
        let fam = self.comp.family();
        let site = &fam.site;
        let cy = site.cyl(p.base)?;
        let conn = site.connection(p.base, p.e)?;
        if fam.cat().compose(conn, site.endpoint(cy, !p.e)?) != fam.cat().id(cy) {
            return Err(Error::InternalLawViolation("connection does not end at the identity".into()));
        }
        let q = p.pull(fam, cy, super::box_shape(&p.phi, p.e)?, p.e, conn)?;
        self.comp.comp(&q)
    }

    fn depth(&self) -> usize {
        self.comp.depth() + 1
    }
}

/// A structure that picks among the valid fillers by an arbitrary rule.
pub struct ChoiceFib {
    fam: Family,
    choose: Box<dyn Fn(&Problem, &[u32]) -> usize + Send + Sync>,
}

impl ChoiceFib {
    pub fn new(fam: Family, choose: impl Fn(&Problem, &[u32]) -> usize + Send + Sync + 'static) -> ChoiceFib {
        ChoiceFib { fam, choose: Box::new(choose) }
    }
}

impl Fibrancy for ChoiceFib {
    fn family(&self) -> &Family {
        &self.fam
    }

    fn fill(&self, p: &Problem) -> Result<u32> {
        let all = valid_fillers(&self.fam, p)?;
        if all.is_empty() {
            return Err(Error::InvalidStructure(format!("no filler {}", p.describe(&self.fam))));
        }
        let i = (self.choose)(p, &all);
        all.get(i).copied().ok_or_else(|| Error::IndexOutOfRange(format!("choice {i} of {} fillers", all.len())))
    }
}

/// A structure on `Aσ` over Δ read off a structure on A over Γ.
pub struct Reindexed {
    fam: Family,
    inner: Arc<dyn Fibrancy>,
    sigma: Subst,
}

impl Reindexed {
    pub fn new(inner: Arc<dyn Fibrancy>, delta: crate::psh::Presheaf, sigma: Subst) -> Result<Reindexed> {
        let g = inner.family();
        sigma.validate(g.cat(), &delta, &g.ctx)?;
        let ty = g.ty.subst(g.cat(), &sigma);
        let fam = Family::new(g.site.clone(), delta, ty)?;
        Ok(Reindexed { fam, inner, sigma })
    }
}

impl Fibrancy for Reindexed {
    fn family(&self) -> &Family {
        &self.fam
    }

    fn fill(&self, p: &Problem) -> Result<u32> {
        let cy = self.fam.site.cyl(p.base)?;
        self.inner.fill(&Problem { gamma: self.sigma.maps[cy][p.gamma as usize], ..p.clone() })
    }

    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn is_discrete(&self) -> bool {
        self.inner.is_discrete()
    }
}

/// A structure that only accepts problems over degenerate paths.
pub struct Homogeneous<F> {
    inner: F,
}

impl<F: Fibrancy> Homogeneous<F> {
    pub fn new(inner: F) -> Homogeneous<F> {
        Homogeneous { inner }
    }
}

impl<F: Fibrancy> Fibrancy for Homogeneous<F> {
    fn family(&self) -> &Family {
        self.inner.family()
    }

    fn fill(&self, p: &Problem) -> Result<u32> {
        if !p.is_homogeneous(self.inner.family())? {
            return Err(Error::InvalidStructure(format!("inhomogeneous problem {}", p.describe(self.inner.family()))));
        }
        self.inner.fill(p)
    }

    fn depth(&self) -> usize {
        self.inner.depth()
    }
}

/// Completing a partial element on φ at c, with no cylinder.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrivProblem {
    pub base: Obj,
    pub phi: Cofibration,
    pub gamma: u32,
    pub extent: Vec<Mor>,
    pub partial: Vec<u32>,
}

pub trait TrivFibrancy {
    fn family(&self) -> &Family;
    fn complete(&self, p: &TrivProblem) -> Result<u32>;
}

/// The trivial fibration structure of a family with singleton fibers.
pub struct Contractible {
    fam: Family,
}

impl Contractible {
    pub fn new(fam: Family) -> Result<Contractible> {
        if fam.ty.sizes.iter().flatten().any(|&s| s != 1) {
            return Err(Error::InvalidStructure("a fiber is not a singleton".into()));
        }
        Ok(Contractible { fam })
    }
}

impl TrivFibrancy for Contractible {
    fn family(&self) -> &Family {
        &self.fam
    }

    fn complete(&self, _: &TrivProblem) -> Result<u32> {
        Ok(0)
    }
}

/// Filling by completing the open box as a partial element on the cylinder.
pub struct FromTrivial<T>(pub T);

impl<T: TrivFibrancy> Fibrancy for FromTrivial<T> {
    fn family(&self) -> &Family {
        self.0.family()
    }

    fn fill(&self, p: &Problem) -> Result<u32> {
        let q = TrivProblem {
            base: self.0.family().site.cyl(p.base)?,
            phi: super::box_shape(&p.phi, p.e)?,
            gamma: p.gamma,
            extent: p.extent.clone(),
            partial: p.partial.clone(),
        };
        self.0.complete(&q)
    }
}

/// Boundary and restriction checks for trivial fibration structures, over every object
/// of stage at most 2.
pub fn check_triv_structure(s: &dyn TrivFibrancy, budget: &mut Budget) -> Result<Report> {
    let fam = s.family();
    let site = &fam.site;
    let cat = fam.cat();
    let mut rep = Report::new(format!("trivial-fibrancy/{}", site.internal.name));
    let mut count = 0u64;
    for c in cat.objects() {
        let k = site.stage(c);
        if k > 2 {
            continue;
        }
        for phi in Cofibration::enumerate(k)? {
            let ext = extent(site, c, &phi)?;
            for gamma in 0..fam.ctx.size(c) {
                for partial in super::partial_elements(fam, gamma, &ext, budget)? {
                    count += 1;
                    budget.charge(1, "completion problem")?;
                    let p = TrivProblem { base: c, phi: phi.clone(), gamma, extent: ext.clone(), partial };
                    let u = s.complete(&p)?;
                    let bad = p.extent.iter().zip(&p.partial).find(|&(&m, &a)| fam.ty.act(m, gamma, u) != a);
                    rep.check("complete-boundary", bad.is_none(), || {
                        format!("at {} φ={} γ={gamma} along {}", site.object_label(c), p.phi, cat.morphism_name(*bad.unwrap().0))
                    });
                }
            }
        }
    }
    rep.fact("problems", count);
    Ok(rep)
}

/// Delegates everywhere except one problem, where it answers a different element.
pub struct BoundaryBreak {
    inner: Arc<dyn Fibrancy>,
    at: Problem,
}

impl BoundaryBreak {
    pub fn new(inner: Arc<dyn Fibrancy>, at: Problem) -> BoundaryBreak {
        BoundaryBreak { inner, at }
    }
}

impl Fibrancy for BoundaryBreak {
    fn family(&self) -> &Family {
        self.inner.family()
    }

    fn fill(&self, p: &Problem) -> Result<u32> {
        let u = self.inner.fill(p)?;
        if *p != self.at {
            return Ok(u);
        }
        let fam = self.inner.family();
        let n = fam.ty.fiber(fam.site.cyl(p.base)?, p.gamma);
        Ok((u + 1) % n)
    }

    fn depth(&self) -> usize {
        self.inner.depth()
    }
}
