//! Equivalence data: a quasi-inverse with two homotopies, found by exhaustive search.

use super::Family;
use crate::cat::Site;
use crate::error::{Error, Result};
use crate::psh::formers::{interval, interval_const, pi_type, PiType};
use crate::psh::search::NatProblem;
use crate::psh::{Elem, ExtCode, Layout, Presheaf, TyFam};
use crate::report::{Budget, Outcome};

/// `Π_{i:I} A` over Γ: paths in A with free endpoints.
#[derive(Clone, Debug)]
pub struct PathType {
    pub pi: PiType,
    /// Domain positions of `(id, 0)` and `(id, 1)` per `(x, ρ)`.
    ends: Vec<Vec<[usize; 2]>>,
}

pub fn path_type(site: &Site, gamma: &Presheaf, a: &TyFam, budget: &mut Budget) -> Result<PathType> {
    let cat = &site.cat;
    let iv = TyFam::weaken(cat, gamma, &interval(site)?);
    let over = a.subst(cat, &iv.proj());
    let pi = pi_type(cat, gamma, &iv, &over, budget)?;
    let mut ends = Vec::with_capacity(cat.object_count());
    for x in cat.objects() {
        let k = site.stage(x);
        let (z, o) = (interval_const(k, false)?, interval_const(k, true)?);
        ends.push(pi.fibers[x].iter().map(|f| [f.dom_index[&(cat.id(x), z)], f.dom_index[&(cat.id(x), o)]]).collect());
    }
    Ok(PathType { pi, ends })
}

impl PathType {
    pub fn eval(&self, x: usize, rho: u32, s: u32, e: bool) -> u32 {
        self.pi.fibers[x][rho as usize].members[s as usize][self.ends[x][rho as usize][e as usize]]
    }

    /// The constant path at u.
    pub fn refl(&self, a: &TyFam, x: usize, rho: u32, u: u32) -> Option<u32> {
        let fib = &self.pi.fibers[x][rho as usize];
        let fam: Vec<u32> = fib.domain.iter().map(|&(g, _)| a.act(g, rho, u)).collect();
        fib.position(&fam)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivData {
    /// `f ∈ El(Γ.A, Bp)`.
    pub forward: Elem,
    /// `g ∈ El(Γ.B, Ap)`.
    pub backward: Elem,
    /// Paths from `g f u` to u, over Γ.A.
    pub left: Elem,
    /// Paths from `f g v` to v, over Γ.B.
    pub right: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivVerdict {
    pub outcome: Outcome,
    pub data: Option<EquivData>,
    /// Quasi-inverse candidates examined.
    pub candidates: u64,
}

/// A natural choice of paths over `Γ.X` with prescribed endpoints, if one exists.
fn homotopy(
    fam: &Family,
    x_ty: &TyFam,
    pt: &PathType,
    ends: impl Fn(usize, u32, u32) -> (u32, u32),
    budget: &mut Budget,
) -> Result<Option<Elem>> {
    let cat = fam.cat();
    let ctx = &fam.ctx;
    let code = ExtCode::new(x_ty);
    let ext = x_ty.ext(cat, ctx);
    let lay = Layout::new(cat.objects().map(|x| ext.sizes[x] as usize));
    let mut allowed: Vec<Vec<u32>> = Vec::with_capacity(lay.len());
    for x in cat.objects() {
        for cd in 0..ext.sizes[x] {
            let (rho, u) = code.dec(x, cd);
            let (s, t) = ends(x, rho, u);
            let n = pt.pi.ty.fiber(x, rho);
            allowed.push((0..n).filter(|&h| pt.eval(x, rho, h, false) == s && pt.eval(x, rho, h, true) == t).collect());
        }
    }
    let mut prob = NatProblem::new(allowed.iter().map(|v| v.len() as u32).collect());
    for x in cat.objects() {
        for cd in 0..ext.sizes[x] {
            let (rho, _) = code.dec(x, cd);
            let i = lay.at(x, cd as usize);
            for &h in cat.incoming(x) {
                if cat.is_id(h) {
                    continue;
                }
                let y = cat.src(h);
                let j = lay.at(y, ext.act(h, cd) as usize);
                let target = &allowed[j];
                let tab = allowed[i]
                    .iter()
                    .map(|&m| {
                        let r = pt.pi.ty.act(h, rho, m);
                        target.iter().position(|&w| w == r).unwrap_or(target.len()) as u32
                    })
                    .collect();
                let tab = prob.add_table(tab);
                prob.link(i, j, tab);
            }
        }
    }
    Ok(prob.first(budget)?.map(|sol| Elem {
        vals: cat
            .objects()
            .map(|x| lay.slice(&sol, x).iter().enumerate().map(|(k, &v)| allowed[lay.at(x, k)][v as usize]).collect())
            .collect(),
    }))
}

/// Searches for a quasi-inverse of `f : A -> B` over Γ with homotopies both ways. An
/// exhausted search space gives a refutation; running out of budget gives Inconclusive.
pub fn is_equiv_search(site: &Site, gamma: &Presheaf, a: &TyFam, b: &TyFam, f: &Elem, budget: &mut Budget) -> EquivVerdict {
    match search(site, gamma, a, b, f, budget) {
        Ok(v) => v,
        Err(_) => EquivVerdict { outcome: Outcome::Inconclusive, data: None, candidates: 0 },
    }
}

fn search(site: &Site, gamma: &Presheaf, a: &TyFam, b: &TyFam, f: &Elem, budget: &mut Budget) -> Result<EquivVerdict> {
    let cat = &site.cat;
    let site_arc = std::sync::Arc::new(site.clone());
    let fam = Family { site: site_arc, ctx: gamma.clone(), ty: a.clone() };
    let (ca, cb) = (ExtCode::new(a), ExtCode::new(b));
    let gb = b.ext(cat, gamma);
    f.validate(cat, &a.ext(cat, gamma), &b.subst(cat, &a.proj()))?;
    let pa = path_type(site, gamma, a, budget)?;
    let pb = path_type(site, gamma, b, budget)?;
    let lay = Layout::new(cat.objects().map(|x| gb.sizes[x] as usize));
    let mut prob = NatProblem::new(
        cat.objects()
            .flat_map(|x| (0..gb.sizes[x]).map(move |cd| (x, cd)))
            .map(|(x, cd)| a.fiber(x, cb.dec(x, cd).0))
            .collect(),
    );
    for x in cat.objects() {
        for cd in 0..gb.sizes[x] {
            let (rho, _) = cb.dec(x, cd);
            for &h in cat.incoming(x) {
                if !cat.is_id(h) {
                    let tab = prob.add_table(a.restr[h][rho as usize].clone());
                    prob.link(lay.at(x, cd as usize), lay.at(cat.src(h), gb.act(h, cd) as usize), tab);
                }
            }
        }
    }
    let fam_b = Family { ty: b.clone(), ..fam.clone() };
    let attempt = |g: Elem, budget: &mut Budget| -> Result<Option<EquivData>> {
        let gf = |x: usize, rho: u32, u: u32| g.vals[x][cb.enc(x, rho, f.vals[x][ca.enc(x, rho, u) as usize]) as usize];
        let fg = |x: usize, rho: u32, v: u32| f.vals[x][ca.enc(x, rho, g.vals[x][cb.enc(x, rho, v) as usize]) as usize];
        let Some(left) = homotopy(&fam, a, &pa, |x, rho, u| (gf(x, rho, u), u), budget)? else {
            return Ok(None);
        };
        let Some(right) = homotopy(&fam_b, b, &pb, |x, rho, v| (fg(x, rho, v), v), budget)? else {
            return Ok(None);
        };
        Ok(Some(EquivData { forward: f.clone(), backward: g, left, right }))
    };
    // A fiberwise bijection is usually inverted by its pointwise inverse; try that before enumerating.
    if let Some(g) = pointwise_inverse(cat, gamma, a, b, f).filter(|g| g.validate(cat, &gb, &a.subst(cat, &b.proj())).is_ok()) {
        if let Some(data) = attempt(g, budget)? {
            return Ok(EquivVerdict { outcome: Outcome::Found, data: Some(data), candidates: 1 });
        }
    }
    let mut candidates = 0u64;
    for sol in prob.all(budget)? {
        candidates += 1;
        let g = Elem { vals: cat.objects().map(|x| lay.slice(&sol, x).to_vec()).collect() };
        if let Some(data) = attempt(g, budget)? {
            return Ok(EquivVerdict { outcome: Outcome::Found, data: Some(data), candidates });
        }
    }
    Ok(EquivVerdict { outcome: Outcome::Refuted, data: None, candidates })
}

fn pointwise_inverse(cat: &crate::cat::Cat, gamma: &Presheaf, a: &TyFam, b: &TyFam, f: &Elem) -> Option<Elem> {
    let (ca, cb) = (ExtCode::new(a), ExtCode::new(b));
    let gb = b.ext(cat, gamma);
    let mut vals = Vec::with_capacity(cat.object_count());
    for x in cat.objects() {
        let mut inv = vec![u32::MAX; gb.sizes[x] as usize];
        for rho in 0..gamma.sizes[x] {
            if a.fiber(x, rho) != b.fiber(x, rho) {
                return None;
            }
            for u in 0..a.fiber(x, rho) {
                let v = f.vals[x][ca.enc(x, rho, u) as usize];
                let slot = &mut inv[cb.enc(x, rho, v) as usize];
                if *slot != u32::MAX {
                    return None;
                }
                *slot = u;
            }
        }
        vals.push(inv);
    }
    Some(Elem { vals })
}

impl EquivData {
    /// Re-checks naturality of every component and the endpoints of both homotopies.
    pub fn validate(&self, site: &Site, gamma: &Presheaf, a: &TyFam, b: &TyFam, budget: &mut Budget) -> Result<()> {
        let cat = &site.cat;
        let (ca, cb) = (ExtCode::new(a), ExtCode::new(b));
        let (ga, gb) = (a.ext(cat, gamma), b.ext(cat, gamma));
        self.forward.validate(cat, &ga, &b.subst(cat, &a.proj()))?;
        self.backward.validate(cat, &gb, &a.subst(cat, &b.proj()))?;
        let pa = path_type(site, gamma, a, budget)?;
        let pb = path_type(site, gamma, b, budget)?;
        self.left.validate(cat, &ga, &pa.pi.ty.subst(cat, &a.proj()))?;
        self.right.validate(cat, &gb, &pb.pi.ty.subst(cat, &b.proj()))?;
        for x in cat.objects() {
            for cd in 0..ga.sizes[x] {
                let (rho, u) = ca.dec(x, cd);
                let fu = self.forward.vals[x][cd as usize];
                let gfu = self.backward.vals[x][cb.enc(x, rho, fu) as usize];
                let h = self.left.vals[x][cd as usize];
                if pa.eval(x, rho, h, false) != gfu || pa.eval(x, rho, h, true) != u {
                    return Err(Error::Validation(format!("left homotopy has the wrong ends at {}", cat.object_name(x))));
                }
            }
            for cd in 0..gb.sizes[x] {
                let (rho, v) = cb.dec(x, cd);
                let gv = self.backward.vals[x][cd as usize];
                let fgv = self.forward.vals[x][ca.enc(x, rho, gv) as usize];
                let h = self.right.vals[x][cd as usize];
                if pb.eval(x, rho, h, false) != fgv || pb.eval(x, rho, h, true) != v {
                    return Err(Error::Validation(format!("right homotopy has the wrong ends at {}", cat.object_name(x))));
                }
            }
        }
        Ok(())
    }
}
