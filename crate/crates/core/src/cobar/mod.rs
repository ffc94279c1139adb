//! The truncated cobar construction `D_N`, a limit over the weights `P_n` of the powers of
//! `E = RU`.
//!
//! An element of `(D_N Γ)(c)` is a tuple `(γ_0, …, γ_N)` of natural maps
//! `γ_n : y(c) × P_n -> E^{n+1}Γ` with `γ_{n+1} ∘ ∂_k = E^k η ∘ γ_n`. Each `γ_n` is stored as a
//! family over the domain `{(g : c' -> c, w ∈ P_n(c'))}`, and an element is the concatenation
//! of its components.

mod properties;
mod weights;

#[cfg(test)]
mod tests;

pub use properties::{verify_cobar_properties, CobarConfig, CobarInstance};
pub use weights::{face, face_map, weights, Weight, WeightPresheaf};

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::cat::{Cat, Obj, Site};
use crate::cwf::Pointing;
use crate::error::{Error, Result};
use crate::psh::adjoint::Adjunction;
use crate::psh::model::{PshFunctor, PshModel};
use crate::psh::formers::{exp_domain, exp_problem, restrict_family, ExpDomain};
use crate::psh::{fibers, Carrier, Elem, Fibers, Presheaf, Subst, TyFam};
use crate::report::Budget;

/// `Γ, EΓ, …, E^{N+1}Γ` with the maps between them.
#[derive(Clone, Debug)]
pub struct Tower {
    pub levels: Vec<Presheaf>,
    /// `eta[n][k] = E^k η_{E^{n+1-k}Γ} : E^{n+1}Γ -> E^{n+2}Γ`.
    pub eta: Vec<Vec<Subst>>,
    /// `unit[n] = η^{n+1} : Γ -> E^{n+1}Γ`.
    pub unit: Vec<Subst>,
}

/// `D_N Γ` together with the tower it was built from.
#[derive(Clone, Debug)]
pub struct CobarContext {
    pub carrier: Carrier,
    pub tower: Tower,
    /// `offsets[c][n]`: where `γ_n` starts in a family at c; the last entry is the length.
    offsets: Vec<Vec<usize>>,
}

impl CobarContext {
    pub fn psh(&self) -> &Presheaf {
        &self.carrier.psh
    }

    pub fn element(&self, c: Obj, i: u32) -> CobarElement {
        let fam = &self.carrier.elems[c][i as usize];
        let off = &self.offsets[c];
        CobarElement { obj: c, comps: off.windows(2).map(|w| fam[w[0]..w[1]].to_vec()).collect() }
    }
}

/// `D_N A` over `D_N Γ`, as the fibers of `D_N(p) : D_N(Γ.A) -> D_N Γ`.
#[derive(Clone, Debug)]
pub struct CobarType {
    pub ty: TyFam,
    pub fibers: Fibers,
    pub total: CobarContext,
}

/// One element of `D_N Γ` at an object, split into components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CobarElement {
    pub obj: Obj,
    pub comps: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatFailure {
    pub n: usize,
    pub k: usize,
    pub weight: String,
}

pub struct Cobar<'a> {
    pub adj: &'a Adjunction,
    pub n: usize,
    pub p: Vec<WeightPresheaf>,
    /// `faces[n][k] : P_n -> P_{n+1}`.
    pub faces: Vec<Vec<Subst>>,
    domains: Vec<Vec<ExpDomain>>,
    pub limit: u64,
}

impl<'a> Cobar<'a> {
    pub fn new(adj: &'a Adjunction, n: usize, limit: u64) -> Result<Cobar<'a>> {
        let site = &adj.site;
        let p = (0..=n).map(|m| WeightPresheaf::new(site, m)).collect::<Result<Vec<_>>>()?;
        let faces = (0..n)
            .map(|m| (0..=m + 1).map(|k| face_map(site, &p[m], &p[m + 1], k)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let cat = &site.cat;
        let domains = p.iter().map(|pm| cat.objects().map(|c| exp_domain(cat, &pm.psh, c)).collect()).collect();
        Ok(Cobar { adj, n, p, faces, domains, limit })
    }

    pub fn site(&self) -> &Site {
        &self.adj.site
    }

    fn cat(&self) -> &Cat {
        &self.adj.site.cat
    }

    /// `E(σ)` for `σ : dom -> cod`.
    fn e_map(&self, dom: &Presheaf, cod: &Presheaf, s: &Subst) -> Result<Subst> {
        self.adj.r_subst(&self.adj.u_psh(dom), &self.adj.u_psh(cod), s)
    }

    fn e_obj(&self, g: &Presheaf) -> Result<Presheaf> {
        Ok(self.adj.r_psh(&self.adj.u_psh(g))?.psh.clone())
    }

    pub fn tower(&self, g: &Presheaf) -> Result<Tower> {
        let mut levels = vec![g.clone()];
        for j in 0..=self.n {
            let next = self.e_obj(&levels[j])?;
            levels.push(next);
        }
        let base = (0..=self.n + 1).map(|m| self.adj.unit(&levels[m])).collect::<Result<Vec<_>>>()?;
        let mut eta = Vec::with_capacity(self.n);
        for n in 0..self.n {
            let mut row = Vec::with_capacity(n + 2);
            for k in 0..=n + 1 {
                let m = n + 1 - k;
                let mut s = base[m].clone();
                for i in 0..k {
                    s = self.e_map(&levels[m + i], &levels[m + i + 1], &s)?;
                }
                row.push(s);
            }
            eta.push(row);
        }
        let mut unit = vec![base[0].clone()];
        for n in 0..self.n {
            let next = base[n + 1].compose(&unit[n]);
            unit.push(next);
        }
        Ok(Tower { levels, eta, unit })
    }

    /// `E^{n+1}σ` for every n ≤ N.
    fn tower_map(&self, dom: &Tower, cod: &Tower, s: &Subst) -> Result<Vec<Subst>> {
        let mut out = Vec::with_capacity(self.n + 1);
        let mut cur = s.clone();
        for j in 0..=self.n {
            cur = self.e_map(&dom.levels[j], &cod.levels[j], &cur)?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// `D_N Γ`.
    pub fn context(&self, g: &Presheaf) -> Result<CobarContext> {
        let tower = self.tower(g)?;
        let cat = self.cat();
        let mut budget = Budget::new(self.limit);
        let mut elems = Vec::with_capacity(cat.object_count());
        let mut offsets = Vec::with_capacity(cat.object_count());
        for c in cat.objects() {
            let mut off = vec![0];
            for n in 0..=self.n {
                off.push(off[n] + self.domains[n][c].dom.len());
            }
            let mut out = Vec::new();
            self.extend(&tower, c, 0, &mut Vec::new(), &mut out, &mut budget)?;
            out.sort();
            elems.push(out);
            offsets.push(off);
        }
        let carrier = Carrier::build(cat, elems, |k, fam| self.restrict(&offsets, k, fam))?;
        Ok(CobarContext { carrier, tower, offsets })
    }

    fn restrict(&self, offsets: &[Vec<usize>], k: usize, fam: &[u32]) -> Vec<u32> {
        let cat = self.cat();
        let off = &offsets[cat.dst(k)];
        let mut out = Vec::new();
        for n in 0..=self.n {
            out.extend(restrict_family(cat, &self.domains[n], k, &fam[off[n]..off[n + 1]]));
        }
        out
    }

    /// Extends a compatible prefix `(γ_0, …, γ_{n-1})` by every admissible `γ_n`.
    fn extend(
        &self,
        tower: &Tower,
        c: Obj,
        n: usize,
        prefix: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        budget: &mut Budget,
    ) -> Result<()> {
        if n > self.n {
            out.push(prefix.clone());
            return Ok(());
        }
        let cat = self.cat();
        let dom = &self.domains[n][c];
        let mut prob = exp_problem(cat, &self.p[n].psh, &tower.levels[n + 1], dom);
        if n > 0 {
            let prev = &self.domains[n - 1][c];
            let start = prefix.len() - prev.dom.len();
            for (i, &(g, w)) in prev.dom.iter().enumerate() {
                let y = cat.src(g);
                let v = prefix[start + i];
                for (k, fm) in self.faces[n - 1].iter().enumerate() {
                    let target = dom.index[&(g, fm.maps[y][w as usize])];
                    prob.pin(target, tower.eta[n - 1][k].maps[y][v as usize]);
                }
            }
        }
        for sol in prob.all(budget)? {
            let len = prefix.len();
            prefix.extend_from_slice(&sol);
            self.extend(tower, c, n + 1, prefix, out, budget)?;
            prefix.truncate(len);
        }
        Ok(())
    }

    /// Every violated compatibility equation of an element, in order of `(n, k, domain)`.
    pub fn compat_failures(&self, tower: &Tower, elt: &CobarElement) -> Vec<CompatFailure> {
        let cat = self.cat();
        let site = self.site();
        let c = elt.obj;
        let mut out = Vec::new();
        for n in 0..self.n.min(elt.comps.len().saturating_sub(1)) {
            let (dom, next) = (&self.domains[n][c], &self.domains[n + 1][c]);
            for (k, fm) in self.faces[n].iter().enumerate() {
                for (i, &(g, w)) in dom.dom.iter().enumerate() {
                    let y = cat.src(g);
                    let lhs = elt.comps[n + 1][next.index[&(g, fm.maps[y][w as usize])]];
                    let rhs = tower.eta[n][k].maps[y][elt.comps[n][i] as usize];
                    if lhs != rhs {
                        let weight = self.p[n].weight(site.stage(y), w);
                        out.push(CompatFailure { n, k, weight: format!("{weight} along {}", cat.morphism_name(g)) });
                    }
                }
            }
        }
        out
    }

    /// Decides every compatibility equation; the first violated one is the witness.
    pub fn check_cobar_compat(&self, tower: &Tower, elt: &CobarElement) -> std::result::Result<(), CompatFailure> {
        match self.compat_failures(tower, elt).into_iter().next() {
            None => Ok(()),
            Some(f) => Err(f),
        }
    }

    /// `τ_Γ : Γ -> D_N Γ`, `(τγ)_n(g, w) = η^{n+1}(γ·g)`.
    pub fn unit(&self, g: &Presheaf, cx: &CobarContext) -> Result<Subst> {
        let cat = self.cat();
        let mut maps = Vec::with_capacity(cat.object_count());
        for c in cat.objects() {
            let mut m = Vec::with_capacity(g.sizes[c] as usize);
            for rho in 0..g.sizes[c] {
                let mut fam = Vec::with_capacity(*cx.offsets[c].last().unwrap());
                for n in 0..=self.n {
                    for &(h, _) in &self.domains[n][c].dom {
                        fam.push(cx.tower.unit[n].maps[cat.src(h)][g.act(h, rho) as usize]);
                    }
                }
                m.push(cx.carrier.lookup(c, &fam).ok_or_else(|| Error::NaturalityViolation("τ leaves D_N".into()))?);
            }
            maps.push(m);
        }
        Ok(Subst { maps })
    }

    /// `D_N σ : D_N Δ -> D_N Γ`, postcomposing each component with `E^{n+1}σ`.
    pub fn subst(&self, dom: &CobarContext, cod: &CobarContext, s: &Subst) -> Result<Subst> {
        let cat = self.cat();
        let powers = self.tower_map(&dom.tower, &cod.tower, s)?;
        let mut maps = Vec::with_capacity(cat.object_count());
        for c in cat.objects() {
            let off = &dom.offsets[c];
            let mut m = Vec::with_capacity(dom.carrier.elems[c].len());
            for fam in &dom.carrier.elems[c] {
                let mut img = Vec::with_capacity(fam.len());
                for n in 0..=self.n {
                    for (i, &(h, _)) in self.domains[n][c].dom.iter().enumerate() {
                        img.push(powers[n].maps[cat.src(h)][fam[off[n] + i] as usize]);
                    }
                }
                m.push(cod.carrier.lookup(c, &img).ok_or_else(|| Error::NaturalityViolation("D_N σ leaves D_N".into()))?);
            }
            maps.push(m);
        }
        Ok(Subst { maps })
    }

    /// `D_N A` over `D_N Γ`.
    pub fn ty(&self, g: &Presheaf, gx: &CobarContext, a: &TyFam) -> Result<CobarType> {
        let cat = self.cat();
        let ga = a.ext(cat, g);
        let total = self.context(&ga)?;
        let dp = self.subst(&total, gx, &a.proj())?;
        let fibers = fibers(cat, total.psh(), gx.psh(), &dp);
        Ok(CobarType { ty: fibers.ty.clone(), fibers, total })
    }

    /// `D_N t ∈ El(D_N Γ, D_N A)` for `t ∈ El(Γ, A)`.
    pub fn elem(&self, gx: &CobarContext, a: &CobarType, aty: &TyFam, t: &Elem) -> Result<Elem> {
        let section = Subst::identity(&gx.tower.levels[0]).pair(aty, t);
        let ds = self.subst(gx, &a.total, &section)?;
        Ok(a.fibers.section(&ds))
    }

    /// `τ_A ∈ El(Γ.A, (D_N A)τ_Γ p)`: τ of `Γ.A` read in the fibers over `τ_Γ`.
    pub fn unit_ty(&self, g: &Presheaf, aty: &TyFam, a: &CobarType) -> Result<Elem> {
        let cat = self.cat();
        let tau = self.unit(&aty.ext(cat, g), &a.total)?;
        Ok(Elem {
            vals: cat.objects().map(|c| tau.maps[c].iter().map(|&t| a.fibers.position[c][t as usize]).collect()).collect(),
        })
    }
}

/// The product comparison `⟨D π_1, D π_2⟩ : D_N(X × Y) -> D_N X × D_N Y`.
pub fn product_comparison(
    cb: &Cobar,
    x: &Presheaf,
    y: &Presheaf,
    dx: &CobarContext,
    dy: &CobarContext,
    dxy: &CobarContext,
) -> Result<(Subst, Presheaf)> {
    let cat = cb.cat();
    let (p1, p2) = projections(cat, x, y);
    let (a, b) = (cb.subst(dxy, dx, &p1)?, cb.subst(dxy, dy, &p2)?);
    let prod = Presheaf::product(cat, dx.psh(), dy.psh());
    let maps = cat
        .objects()
        .map(|c| a.maps[c].iter().zip(&b.maps[c]).map(|(&i, &j)| i * dy.psh().sizes[c] + j).collect())
        .collect();
    Ok((Subst { maps }, prod))
}

/// Projections out of [`Presheaf::product`].
pub fn projections(cat: &Cat, x: &Presheaf, y: &Presheaf) -> (Subst, Subst) {
    let p1 = cat.objects().map(|c| (0..x.sizes[c] * y.sizes[c]).map(|v| v / y.sizes[c]).collect()).collect();
    let p2 = cat.objects().map(|c| (0..x.sizes[c] * y.sizes[c]).map(|v| v % y.sizes[c]).collect()).collect();
    (Subst { maps: p1 }, Subst { maps: p2 })
}

/// `D_N` as a functor on presheaves, with built carriers cached by presheaf.
pub struct CobarFunctor<'a> {
    pub cobar: Cobar<'a>,
    cache: RefCell<HashMap<Presheaf, Arc<CobarContext>>>,
}

impl<'a> CobarFunctor<'a> {
    pub fn new(cobar: Cobar<'a>) -> Self {
        CobarFunctor { cobar, cache: RefCell::new(HashMap::new()) }
    }

    pub fn context(&self, g: &Presheaf) -> Result<Arc<CobarContext>> {
        if let Some(c) = self.cache.borrow().get(g) {
            return Ok(c.clone());
        }
        let c = Arc::new(self.cobar.context(g)?);
        self.cache.borrow_mut().insert(g.clone(), c.clone());
        Ok(c)
    }
}

impl PshFunctor for CobarFunctor<'_> {
    fn source_cat(&self) -> &Cat {
        self.cobar.cat()
    }
    fn target_cat(&self) -> &Cat {
        self.cobar.cat()
    }
    fn obj(&self, g: &Presheaf) -> Result<Presheaf> {
        Ok(self.context(g)?.psh().clone())
    }
    fn map(&self, dom: &Presheaf, cod: &Presheaf, s: &Subst) -> Result<Subst> {
        self.cobar.subst(&*self.context(dom)?, &*self.context(cod)?, s)
    }
}

/// The unit τ as a pointing of `D_N`.
pub struct TauPointing<'a, 'b>(pub &'b CobarFunctor<'a>);

impl Pointing<PshModel> for TauPointing<'_, '_> {
    fn component(&self, g: &Presheaf) -> Result<Subst> {
        self.0.cobar.unit(g, &*self.0.context(g)?)
    }
}
