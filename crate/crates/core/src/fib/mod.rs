//! Open-box filling over a site with cube-direction structure.
//!
//! A filling problem at `c` (stage k < d) consists of a direction e, a cofibration φ of
//! arity k, a point γ of Γ over the cylinder `c ⊗ I`, and a partial element defined on the
//! extent of `ψ = φ·p ∨ (i = e)`: one value `a_m ∈ A(Y, γm)` for every `m : Y -> c ⊗ I` on
//! which ψ becomes true, natural in m. A filler is `u ∈ A(c ⊗ I, γ)` with `u m = a_m`.

mod equiv;
mod strengthen;
mod structures;

use std::collections::HashSet;
use std::sync::Arc;

pub use equiv::{is_equiv_search, path_type, EquivData, EquivVerdict, PathType};
pub use strengthen::{
    check_c_action, check_strengthen_naturality, strengthen_fibrancy, transport_family, Strengthened, Total, Transport,
};
pub use structures::{
    check_triv_structure, fib_close, BoundaryBreak, fill_from_connections, valid_fillers, ChoiceFib, Contractible, DiscreteFib,
    Former, FromConnections, FromTrivial, Homogeneous, Reindexed, SigmaFib, TrivFibrancy, TrivProblem,
};

use crate::cat::{Cat, Cofibration, Mor, Obj, Site};
use crate::error::{Error, Result};
use crate::psh::search::NatProblem;
use crate::psh::{Presheaf, TyFam};
use crate::report::{Budget, Report};

/// A type over a context, both presheaves on a site.
#[derive(Clone, Debug)]
pub struct Family {
    pub site: Arc<Site>,
    pub ctx: Presheaf,
    pub ty: TyFam,
}

impl Family {
    pub fn new(site: Arc<Site>, ctx: Presheaf, ty: TyFam) -> Result<Family> {
        ctx.validate(&site.cat)?;
        ty.validate(&site.cat, &ctx)?;
        Ok(Family { site, ctx, ty })
    }

    pub fn cat(&self) -> &Cat {
        &self.site.cat
    }
}

/// Which restrictions a structure is expected to commute with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Marker {
    Full,
    /// Cube restrictions only: morphisms whose C-component is an identity.
    Levelwise,
}

/// Which problems a structure is expected to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    All,
    /// Only problems whose γ is degenerate in the filling direction.
    Homogeneous,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Problem {
    pub base: Obj,
    pub e: bool,
    pub phi: Cofibration,
    pub gamma: u32,
    /// Morphisms into `base ⊗ I` on which ψ holds, sorted.
    pub extent: Vec<Mor>,
    pub partial: Vec<u32>,
}

/// `φ·p ∨ (i = e)` over the cylinder of a stage-k object.
pub fn box_shape(phi: &Cofibration, e: bool) -> Result<Cofibration> {
    let k = phi.arity();
    phi.weaken().join(&Cofibration::eq(k + 1, k, e)?)
}

/// Morphisms into `target` along which the cofibration becomes true, sorted.
pub fn extent(site: &Site, target: Obj, psi: &Cofibration) -> Result<Vec<Mor>> {
    let mut out = Vec::new();
    for &m in site.cat.incoming(target) {
        let cm = site.cube().map(site.cube_part(m));
        if psi.restrict(&cm.comps, cm.src)?.is_top() {
            out.push(m);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// All natural partial elements of A over γ on the given extent, sorted.
pub fn partial_elements(fam: &Family, gamma: u32, ext: &[Mor], budget: &mut Budget) -> Result<Vec<Vec<u32>>> {
    let cat = fam.cat();
    let sizes = ext.iter().map(|&m| fam.ty.fiber(cat.src(m), fam.ctx.act(m, gamma))).collect();
    let mut prob = NatProblem::new(sizes);
    for (i, &m) in ext.iter().enumerate() {
        let gm = fam.ctx.act(m, gamma);
        for &h in cat.incoming(cat.src(m)) {
            if cat.is_id(h) {
                continue;
            }
            let j = ext
                .binary_search(&cat.compose(m, h))
                .map_err(|_| Error::InternalLawViolation("extent is not closed under precomposition".into()))?;
            let tab = prob.add_table(fam.ty.restr[h][gm as usize].clone());
            prob.link(i, j, tab);
        }
    }
    let mut all = prob.all(budget)?;
    all.sort();
    Ok(all)
}

impl Problem {
    pub fn new(fam: &Family, base: Obj, e: bool, phi: Cofibration, gamma: u32, partial: Vec<u32>) -> Result<Problem> {
        let site = &fam.site;
        if phi.arity() != site.stage(base) {
            return Err(Error::ArityMismatch(format!("cofibration of arity {} at stage {}", phi.arity(), site.stage(base))));
        }
        let cy = site.cyl(base)?;
        if gamma >= fam.ctx.size(cy) {
            return Err(Error::IndexOutOfRange(format!("context point {gamma} over the cylinder")));
        }
        let ext = extent(site, cy, &box_shape(&phi, e)?)?;
        if ext.len() != partial.len() {
            return Err(Error::InvalidStructure("partial element does not match its extent".into()));
        }
        Ok(Problem { base, e, phi, gamma, extent: ext, partial })
    }

    /// The problem whose partial element is the restriction of `v ∈ A(c, γ·end_e)` (φ = ⊥).
    pub fn from_start(fam: &Family, base: Obj, e: bool, gamma: u32, v: u32) -> Result<Problem> {
        let site = &fam.site;
        let cat = fam.cat();
        let end = site.endpoint(base, e)?;
        let ge = fam.ctx.act(end, gamma);
        if v >= fam.ty.fiber(base, ge) {
            return Err(Error::IndexOutOfRange(format!("start value {v}")));
        }
        let phi = Cofibration::bottom(site.stage(base));
        let ext = extent(site, site.cyl(base)?, &box_shape(&phi, e)?)?;
        let mut partial = Vec::with_capacity(ext.len());
        for &m in &ext {
            let h = cat
                .incoming(base)
                .iter()
                .copied()
                .find(|&h| cat.compose(end, h) == m)
                .ok_or_else(|| Error::InternalLawViolation("extent morphism does not factor through the endpoint".into()))?;
            partial.push(fam.ty.act(h, ge, v));
        }
        Ok(Problem { base, e, phi, gamma, extent: ext, partial })
    }

    pub fn value(&self, m: Mor) -> Option<u32> {
        self.extent.binary_search(&m).ok().map(|i| self.partial[i])
    }

    /// The problem at `base'` obtained along `mm : base' ⊗ I -> base ⊗ I`.
    pub fn pull(&self, fam: &Family, base: Obj, phi: Cofibration, e: bool, mm: Mor) -> Result<Problem> {
        let site = &fam.site;
        let cat = fam.cat();
        let cy = site.cyl(base)?;
        if cat.src(mm) != cy {
            return Err(Error::ArityMismatch("pulled problem over the wrong cylinder".into()));
        }
        let ext = extent(site, cy, &box_shape(&phi, e)?)?;
        let mut partial = Vec::with_capacity(ext.len());
        for &m in &ext {
            let v = self.value(cat.compose(mm, m)).ok_or_else(|| {
                Error::InternalLawViolation(format!("pulled extent leaves the original at {}", cat.morphism_name(m)))
            })?;
            partial.push(v);
        }
        Ok(Problem { base, e, phi, gamma: fam.ctx.act(mm, self.gamma), extent: ext, partial })
    }

    /// Restriction along `σ : c' -> c`.
    pub fn restrict(&self, fam: &Family, sigma: Mor) -> Result<Problem> {
        let site = &fam.site;
        let c1 = fam.cat().src(sigma);
        let cm = site.cube().map(site.cube_part(sigma));
        let phi = self.phi.restrict(&cm.comps, cm.src)?;
        self.pull(fam, c1, phi, self.e, site.cyl_mor(sigma)?)
    }

    pub fn is_homogeneous(&self, fam: &Family) -> Result<bool> {
        let site = &fam.site;
        let start = fam.ctx.act(site.endpoint(self.base, self.e)?, self.gamma);
        Ok(fam.ctx.act(site.proj(self.base)?, start) == self.gamma)
    }

    /// First extent morphism where u disagrees with the partial element.
    pub fn mismatch(&self, fam: &Family, u: u32) -> Option<Mor> {
        self.extent.iter().zip(&self.partial).find(|&(&m, &a)| fam.ty.act(m, self.gamma, u) != a).map(|(&m, _)| m)
    }

    pub fn describe(&self, fam: &Family) -> String {
        format!(
            "at {} e={} φ={} γ={} a={:?}",
            fam.site.object_label(self.base),
            self.e as u8,
            self.phi,
            self.gamma,
            self.partial
        )
    }
}

/// Every filling problem of the family, in a fixed order.
/// Problems at stage k are included when `k + depth <= d`.
pub fn problems(fam: &Family, scope: Scope, depth: usize, budget: &mut Budget) -> Result<Vec<Problem>> {
    let site = &fam.site;
    let mut out = Vec::new();
    for c in fam.cat().objects() {
        let k = site.stage(c);
        if k + depth > site.dim() {
            continue;
        }
        let cy = site.cyl(c)?;
        for e in [false, true] {
            for phi in Cofibration::enumerate(k)? {
                let ext = extent(site, cy, &box_shape(&phi, e)?)?;
                for gamma in 0..fam.ctx.size(cy) {
                    let skeleton =
                        Problem { base: c, e, phi: phi.clone(), gamma, extent: ext.clone(), partial: Vec::new() };
                    if scope == Scope::Homogeneous && !skeleton.is_homogeneous(fam)? {
                        continue;
                    }
                    for partial in partial_elements(fam, gamma, &ext, budget)? {
                        out.push(Problem { partial, ..skeleton.clone() });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A filling structure: for every problem, a filler.
pub trait Fibrancy {
    fn family(&self) -> &Family;
    fn fill(&self, p: &Problem) -> Result<u32>;

    /// Stages above the problem's base the structure needs.
    fn depth(&self) -> usize {
        1
    }

    /// Whether fillers are forced by the start point alone.
    fn is_discrete(&self) -> bool {
        false
    }
}

/// A composition structure: for every problem, an element of `A(c, γ·end_{1-e})`.
pub trait Composition {
    fn family(&self) -> &Family;
    fn comp(&self, p: &Problem) -> Result<u32>;

    fn depth(&self) -> usize {
        1
    }
}

/// The composition underlying a filling structure: the filler at the far end.
pub struct CompOf<'a>(pub &'a dyn Fibrancy);

impl Composition for CompOf<'_> {
    fn family(&self) -> &Family {
        self.0.family()
    }

    fn comp(&self, p: &Problem) -> Result<u32> {
        let fam = self.0.family();
        let u = self.0.fill(p)?;
        Ok(fam.ty.act(fam.site.endpoint(p.base, !p.e)?, p.gamma, u))
    }

    fn depth(&self) -> usize {
        self.0.depth()
    }
}

fn compat_morphisms(site: &Site, c: Obj, marker: Marker, depth: usize) -> Vec<Mor> {
    site.cat
        .incoming(c)
        .iter()
        .copied()
        .filter(|&s| {
            !site.cat.is_id(s)
                && site.stage(site.cat.src(s)) + depth <= site.dim()
                && (marker == Marker::Full || site.is_levelwise(s))
        })
        .collect()
}

/// Checks the boundary condition on every problem and compatibility with restriction
/// along the morphisms the marker selects. A compatibility comparison touching a problem
/// that already failed its boundary is not reported again.
pub fn check_fib_structure(s: &dyn Fibrancy, marker: Marker, scope: Scope, budget: &mut Budget) -> Result<Report> {
    let fam = s.family();
    let site = &fam.site;
    let mut rep = Report::new(format!("fibrancy/{}", site.internal.name));
    let probs = problems(fam, scope, s.depth(), budget)?;
    let mut broken = HashSet::new();
    let mut fills = Vec::with_capacity(probs.len());
    for p in &probs {
        budget.charge(1, "filling problem")?;
        let u = s.fill(p)?;
        let bad = p.mismatch(fam, u);
        rep.check("fill-boundary", bad.is_none(), || {
            format!("{} disagrees along {}", p.describe(fam), site.cat.morphism_name(bad.unwrap()))
        });
        if bad.is_some() {
            broken.insert(p.clone());
        }
        fills.push(u);
    }
    for (p, &u) in probs.iter().zip(&fills) {
        if broken.contains(p) {
            continue;
        }
        for sigma in compat_morphisms(site, p.base, marker, s.depth()) {
            let q = p.restrict(fam, sigma)?;
            if scope == Scope::Homogeneous && !q.is_homogeneous(fam)? {
                continue;
            }
            if broken.contains(&q) {
                continue;
            }
            let lhs = s.fill(&q)?;
            let rhs = fam.ty.act(site.cyl_mor(sigma)?, p.gamma, u);
            rep.check("fill-compatible", lhs == rhs, || {
                format!("{} along {}: {lhs} vs {rhs}", p.describe(fam), site.cat.morphism_name(sigma))
            });
        }
    }
    rep.fact("problems", probs.len());
    Ok(rep)
}

/// Same as [`check_fib_structure`] for composition structures, whose boundary is φ at the
/// far end.
pub fn check_comp_structure(s: &dyn Composition, marker: Marker, scope: Scope, budget: &mut Budget) -> Result<Report> {
    let fam = s.family();
    let site = &fam.site;
    let cat = fam.cat();
    let mut rep = Report::new(format!("composition/{}", site.internal.name));
    let probs = problems(fam, scope, s.depth(), budget)?;
    let mut broken = HashSet::new();
    let mut outs = Vec::with_capacity(probs.len());
    for p in &probs {
        budget.charge(1, "composition problem")?;
        let v = s.comp(p)?;
        let end = site.endpoint(p.base, !p.e)?;
        let g_end = fam.ctx.act(end, p.gamma);
        let mut bad = None;
        for m in extent(site, p.base, &p.phi)? {
            if p.value(cat.compose(end, m)) != Some(fam.ty.act(m, g_end, v)) {
                bad = Some(m);
                break;
            }
        }
        rep.check("comp-boundary", bad.is_none(), || {
            format!("{} disagrees along {}", p.describe(fam), cat.morphism_name(bad.unwrap()))
        });
        if bad.is_some() {
            broken.insert(p.clone());
        }
        outs.push(v);
    }
    for (p, &v) in probs.iter().zip(&outs) {
        if broken.contains(p) {
            continue;
        }
        let g_end = fam.ctx.act(site.endpoint(p.base, !p.e)?, p.gamma);
        for sigma in compat_morphisms(site, p.base, marker, s.depth()) {
            let q = p.restrict(fam, sigma)?;
            if broken.contains(&q) || (scope == Scope::Homogeneous && !q.is_homogeneous(fam)?) {
                continue;
            }
            let lhs = s.comp(&q)?;
            let rhs = fam.ty.act(sigma, g_end, v);
            rep.check("comp-compatible", lhs == rhs, || {
                format!("{} along {}: {lhs} vs {rhs}", p.describe(fam), cat.morphism_name(sigma))
            });
        }
    }
    rep.fact("problems", probs.len());
    Ok(rep)
}
