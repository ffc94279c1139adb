//! Homotopy representations, evaluation at the representing element, dependent products
//! along locally representable types, and projectivity.

#[cfg(test)]
mod tests;

use crate::cat::{Mor, Obj, Site};
use crate::error::{Error, Result};
use crate::fib::{is_equiv_search, EquivData};
use crate::psh::formers::{pi_type, PiFiber};
use crate::psh::{elems, first_elem, Elem, ExtCode, Presheaf, Subst, TyFam};
use crate::report::{Budget, Outcome, Report};

fn definite<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::BudgetExceeded(m) => Error::SearchInconclusive(m),
        e => e,
    })
}

/// Searches for equivalence data on `U(map) : U dom -> U cod` over ∫C0, reading the map
/// as a map of types over the terminal context.
pub fn levelwise_equiv(site: &Site, dom: &Presheaf, cod: &Presheaf, map: &Subst, budget: &mut Budget) -> Result<EquivData> {
    if site.dim() == 0 && !map.is_bijective(dom, cod) {
        return Err(Error::InvalidStructure("not a stage-wise bijection".into()));
    }
    let (lvl, incl) = site.levelwise()?;
    let u = |g: &Presheaf| Presheaf { sizes: g.sizes.clone(), restr: incl.iter().map(|&m| g.restr[m].clone()).collect() };
    let one = Presheaf::terminal(&lvl.cat);
    let a = TyFam::weaken(&lvl.cat, &one, &u(dom));
    let b = TyFam::weaken(&lvl.cat, &one, &u(cod));
    let f = Elem { vals: map.maps.clone() };
    let v = is_equiv_search(&lvl, &one, &a, &b, &f, budget);
    match v.outcome {
        Outcome::Found => Ok(v.data.expect("found verdicts carry data")),
        Outcome::Refuted => Err(Error::InvalidStructure("not a levelwise equivalence".into())),
        Outcome::Inconclusive => Err(Error::SearchInconclusive("levelwise equivalence search".into())),
    }
}

/// `δ : yx -> Δ` with `h ↦ δ·h`.
pub fn representing_map(site: &Site, delta_psh: &Presheaf, x: Obj, delta: u32) -> Subst {
    let cat = &site.cat;
    Subst { maps: cat.objects().map(|c| cat.homs(c, x).iter().map(|&h| delta_psh.act(h, delta)).collect()).collect() }
}

/// Index of the identity in `yx(x)`.
pub fn identity_index(site: &Site, x: Obj) -> u32 {
    let cat = &site.cat;
    cat.homs(x, x).iter().position(|&h| h == cat.id(x)).unwrap() as u32
}

/// A levelwise equivalence `δ : yx -> Δ`.
#[derive(Clone, Debug)]
pub struct HomotopyRepresentation {
    pub x: Obj,
    pub delta: u32,
    pub map: Subst,
    pub certificate: EquivData,
}

impl HomotopyRepresentation {
    pub fn new(site: &Site, delta_psh: &Presheaf, x: Obj, delta: u32, budget: &mut Budget) -> Result<Self> {
        if delta >= delta_psh.sizes[x] {
            return Err(Error::IndexOutOfRange(format!("δ = {delta} at {}", site.object_label(x))));
        }
        let map = representing_map(site, delta_psh, x, delta);
        let certificate = levelwise_equiv(site, &Presheaf::yoneda(&site.cat, x), delta_psh, &map, budget)?;
        Ok(HomotopyRepresentation { x, delta, map, certificate })
    }

    /// `id : yx -> yx`.
    pub fn identity(site: &Site, x: Obj, budget: &mut Budget) -> Result<Self> {
        HomotopyRepresentation::new(site, &Presheaf::yoneda(&site.cat, x), x, identity_index(site, x), budget)
    }

    /// Re-checks the certificate against U of the representing map.
    pub fn validate(&self, site: &Site, delta_psh: &Presheaf, budget: &mut Budget) -> Result<()> {
        if self.map != representing_map(site, delta_psh, self.x, self.delta) {
            return Err(Error::Validation("representing map does not match δ".into()));
        }
        let (lvl, incl) = site.levelwise()?;
        let u = |g: &Presheaf| Presheaf { sizes: g.sizes.clone(), restr: incl.iter().map(|&m| g.restr[m].clone()).collect() };
        let one = Presheaf::terminal(&lvl.cat);
        let a = TyFam::weaken(&lvl.cat, &one, &u(&Presheaf::yoneda(&site.cat, self.x)));
        let b = TyFam::weaken(&lvl.cat, &one, &u(delta_psh));
        self.certificate.validate(&lvl, &one, &a, &b, budget)
    }
}

/// A map of finite sets `0..values.len() -> 0..target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalMap {
    pub values: Vec<u32>,
    pub target: u32,
}

impl EvalMap {
    pub fn is_bijective(&self) -> bool {
        self.inverse().is_some()
    }

    pub fn inverse(&self) -> Option<Vec<usize>> {
        if self.values.len() != self.target as usize {
            return None;
        }
        let mut inv = vec![usize::MAX; self.target as usize];
        for (i, &v) in self.values.iter().enumerate() {
            if inv[v as usize] != usize::MAX {
                return None;
            }
            inv[v as usize] = i;
        }
        Some(inv)
    }
}

#[derive(Clone, Debug)]
pub struct YonedaEval {
    pub sections: Vec<Elem>,
    pub map: EvalMap,
}

/// `El(Δ, P) -> P(x, δ)`, `u ↦ u(x, δ)`, with the sections enumerated.
pub fn yoneda_eval(site: &Site, rep: &HomotopyRepresentation, delta_psh: &Presheaf, p: &TyFam, budget: &mut Budget) -> Result<YonedaEval> {
    let sections = definite(elems(&site.cat, delta_psh, p, budget))?;
    let values = sections.iter().map(|u| u.vals[rep.x][rep.delta as usize]).collect();
    Ok(YonedaEval { sections, map: EvalMap { values, target: p.fiber(rep.x, rep.delta) } })
}

/// The section `h ↦ P(h)(a)` of P over yx, for `a ∈ P(x, id)`.
pub fn yoneda_section(site: &Site, x: Obj, p: &TyFam, a: u32) -> Elem {
    let cat = &site.cat;
    let id = identity_index(site, x);
    let yx = Presheaf::yoneda(cat, x);
    Elem {
        vals: cat
            .objects()
            .map(|c| {
                cat.homs(c, x)
                    .iter()
                    .map(|&h| {
                        debug_assert_eq!(yx.act(h, id), cat.homs(c, x).iter().position(|&k| k == h).unwrap() as u32);
                        p.act(h, id, a)
                    })
                    .collect()
            })
            .collect(),
    }
}

/// The data at one `(x, γ)`: `p_γ : x.γ -> x` and `q_γ ∈ A(x.γ, γ p_γ)`.
#[derive(Clone, Debug)]
pub struct LocalPoint {
    pub obj: Obj,
    pub p: Mor,
    pub q: u32,
    pub certificate: EquivData,
}

impl LocalPoint {
    pub fn data(&self) -> (Obj, Mor, u32) {
        (self.obj, self.p, self.q)
    }

    /// Certifies `⟨p, q⟩ : y(x.γ) -> yx.Aγ` at one `(x, γ)`.
    pub fn certify(site: &Site, g: &Presheaf, a: &TyFam, c: Obj, gamma: u32, (obj, p, q): (Obj, Mor, u32), budget: &mut Budget) -> Result<LocalPoint> {
        if gamma >= g.sizes[c] {
            return Err(Error::IndexOutOfRange(format!("γ = {gamma} at {}", site.object_label(c))));
        }
        check_point(site, g, a, c, gamma, (obj, p, q))?;
        let (dom, cod, map) = comprehension_map(site, g, a, c, gamma, p, q);
        let certificate = levelwise_equiv(site, &dom, &cod, &map, budget)?;
        Ok(LocalPoint { obj, p, q, certificate })
    }
}

/// `⟨p, q⟩ : y(x.γ) -> yx.Aγ`, with its domain and codomain.
pub fn comprehension_map(site: &Site, g: &Presheaf, a: &TyFam, c: Obj, gamma: u32, p: Mor, q: u32) -> (Presheaf, Presheaf, Subst) {
    let cat = &site.cat;
    let xg = cat.src(p);
    let yc = Presheaf::yoneda(cat, c);
    let hat = representing_map(site, g, c, gamma);
    let ag = a.subst(cat, &hat);
    let code = ExtCode::new(&ag);
    let cod = ag.ext(cat, &yc);
    let gp = g.act(p, gamma);
    let maps = cat
        .objects()
        .map(|e| {
            cat.homs(e, xg)
                .iter()
                .map(|&h| {
                    let ph = cat.compose(p, h);
                    let i = cat.homs(e, c).iter().position(|&k| k == ph).unwrap() as u32;
                    code.enc(e, i, a.act(h, gp, q))
                })
                .collect()
        })
        .collect();
    (Presheaf::yoneda(cat, xg), cod, Subst { maps })
}

/// A local homotopy representation of A over Γ: one [`LocalPoint`] per `(x, γ)`.
#[derive(Clone, Debug)]
pub struct LocalRepresentation {
    pub points: Vec<Vec<LocalPoint>>,
}

fn check_point(site: &Site, g: &Presheaf, a: &TyFam, c: Obj, gamma: u32, (obj, p, q): (Obj, Mor, u32)) -> Result<()> {
    let cat = &site.cat;
    if cat.dst(p) != c || cat.src(p) != obj {
        return Err(Error::InvalidStructure(format!("p is not a map into {}", site.object_label(c))));
    }
    if q >= a.fiber(obj, g.act(p, gamma)) {
        return Err(Error::IndexOutOfRange(format!("q = {q} at {}", site.object_label(obj))));
    }
    Ok(())
}

impl LocalRepresentation {
    /// Certifies the chosen `(x.γ, p_γ, q_γ)` at every `(x, γ)`.
    pub fn new(
        site: &Site,
        g: &Presheaf,
        a: &TyFam,
        choice: impl Fn(Obj, u32) -> (Obj, Mor, u32),
        budget: &mut Budget,
    ) -> Result<Self> {
        let mut points = Vec::with_capacity(site.cat.object_count());
        for c in site.cat.objects() {
            let mut row = Vec::with_capacity(g.sizes[c] as usize);
            for gamma in 0..g.sizes[c] {
                row.push(LocalPoint::certify(site, g, a, c, gamma, choice(c, gamma), budget)?);
            }
            points.push(row);
        }
        Ok(LocalRepresentation { points })
    }

    /// The representation of `Aσ` at δ is the one of A at σδ.
    pub fn subst(&self, sigma: &Subst) -> LocalRepresentation {
        LocalRepresentation {
            points: sigma.maps.iter().enumerate().map(|(c, m)| m.iter().map(|&r| self.points[c][r as usize].clone()).collect()).collect(),
        }
    }

    pub fn validate(&self, site: &Site, g: &Presheaf, a: &TyFam, budget: &mut Budget) -> Result<()> {
        let (lvl, incl) = site.levelwise()?;
        let u = |h: &Presheaf| Presheaf { sizes: h.sizes.clone(), restr: incl.iter().map(|&m| h.restr[m].clone()).collect() };
        let one = Presheaf::terminal(&lvl.cat);
        for c in site.cat.objects() {
            for gamma in 0..g.sizes[c] {
                let pt = &self.points[c][gamma as usize];
                check_point(site, g, a, c, gamma, pt.data())?;
                let (dom, cod, map) = comprehension_map(site, g, a, c, gamma, pt.p, pt.q);
                if pt.certificate.forward.vals != map.maps {
                    return Err(Error::Validation(format!("certificate is for another map at {}", site.object_label(c))));
                }
                let (ta, tb) = (TyFam::weaken(&lvl.cat, &one, &u(&dom)), TyFam::weaken(&lvl.cat, &one, &u(&cod)));
                pt.certificate.validate(&lvl, &one, &ta, &tb, budget)?;
            }
        }
        Ok(())
    }
}

/// Searches for a local representation, preferring points where `⟨p, q⟩` is already a
/// stage-wise bijection. `None` when some `(x, γ)` admits no representing point.
pub fn find_local_representation(site: &Site, g: &Presheaf, a: &TyFam, budget: &mut Budget) -> Result<Option<LocalRepresentation>> {
    let cat = &site.cat;
    let mut chosen = Vec::with_capacity(cat.object_count());
    for c in cat.objects() {
        let mut row = Vec::with_capacity(g.sizes[c] as usize);
        for gamma in 0..g.sizes[c] {
            let mut cands = Vec::new();
            for &p in cat.incoming(c) {
                for q in 0..a.fiber(cat.src(p), g.act(p, gamma)) {
                    cands.push((cat.src(p), p, q));
                }
            }
            let strict = cands.iter().copied().find(|&(_, p, q)| {
                let (dom, cod, map) = comprehension_map(site, g, a, c, gamma, p, q);
                map.is_bijective(&dom, &cod)
            });
            let mut found = None;
            if let Some((obj, p, q)) = strict {
                let (dom, cod, map) = comprehension_map(site, g, a, c, gamma, p, q);
                found = Some(LocalPoint { obj, p, q, certificate: levelwise_equiv(site, &dom, &cod, &map, budget)? });
            } else {
                let mut inconclusive = false;
                for (obj, p, q) in cands {
                    let (dom, cod, map) = comprehension_map(site, g, a, c, gamma, p, q);
                    match levelwise_equiv(site, &dom, &cod, &map, budget) {
                        Ok(certificate) => {
                            found = Some(LocalPoint { obj, p, q, certificate });
                            break;
                        }
                        Err(Error::InvalidStructure(_)) => {}
                        Err(Error::SearchInconclusive(_)) => inconclusive = true,
                        Err(e) => return Err(e),
                    }
                }
                if found.is_none() && inconclusive {
                    return Err(Error::SearchInconclusive(format!("local representation at {}", site.object_label(c))));
                }
            }
            match found {
                Some(pt) => row.push(pt),
                None => return Ok(None),
            }
        }
        chosen.push(row);
    }
    Ok(Some(LocalRepresentation { points: chosen }))
}

fn evaluation(fib: &PiFiber, pt: &LocalPoint, g: &Presheaf, a: &TyFam, p: &TyFam, gamma: u32) -> EvalMap {
    let at = fib.dom_index[&(pt.p, pt.q)];
    let cd = ExtCode::new(a).enc(pt.obj, g.act(pt.p, gamma), pt.q);
    EvalMap { values: fib.members.iter().map(|u| u[at]).collect(), target: p.fiber(pt.obj, cd) }
}

/// `(Π_A P)(x, γ) -> P(x.γ, γ p_γ, q_γ)`, `u ↦ u_{p_γ}(q_γ)`, at every `(x, γ)`.
pub fn pushforward_evals(
    site: &Site,
    loc: &LocalRepresentation,
    g: &Presheaf,
    a: &TyFam,
    p: &TyFam,
    budget: &mut Budget,
) -> Result<Vec<Vec<EvalMap>>> {
    let cat = &site.cat;
    let pi = definite(pi_type(cat, g, a, p, budget))?;
    Ok(cat
        .objects()
        .map(|c| (0..g.sizes[c]).map(|gamma| evaluation(&pi.fibers[c][gamma as usize], &loc.points[c][gamma as usize], g, a, p, gamma)).collect())
        .collect())
}

/// The evaluation at one `(x, γ)`, which needs only the representation there.
pub fn pushforward_eval(
    site: &Site,
    point: &LocalPoint,
    g: &Presheaf,
    a: &TyFam,
    p: &TyFam,
    c: Obj,
    gamma: u32,
    budget: &mut Budget,
) -> Result<EvalMap> {
    if gamma >= g.sizes[c] {
        return Err(Error::IndexOutOfRange(format!("γ = {gamma} at {}", site.object_label(c))));
    }
    let pi = definite(pi_type(&site.cat, g, a, p, budget))?;
    Ok(evaluation(&pi.fibers[c][gamma as usize], point, g, a, p, gamma))
}

/// Restrict-then-invert at one `(x, γ)`: an element of `P(x.γ, γ p_γ, q_γ)` carried back
/// through the evaluation gives an element of `(Π_A P)(x, γ)`.
pub fn projectivity_at(
    site: &Site,
    point: &LocalPoint,
    g: &Presheaf,
    a: &TyFam,
    p: &TyFam,
    c: Obj,
    gamma: u32,
    budget: &mut Budget,
) -> Result<Report> {
    let mut rep = Report::new("projectivity");
    let ev = pushforward_eval(site, point, g, a, p, c, gamma, budget)?;
    rep.check("inhabited", ev.target > 0, || format!("P is empty over the representing point of {}", site.object_label(c)));
    let inv = ev.inverse();
    rep.check("eval-bijective", inv.is_some(), || format!("at {} over {gamma}", site.object_label(c)));
    if let (Some(inv), true) = (inv, ev.target > 0) {
        rep.check("section-constructed", ev.values[inv[0]] == 0, || "inverse does not hit the chosen element".into());
        rep.fact("sections", ev.values.len());
    }
    Ok(rep)
}

/// For P over Γ.A with every fiber inhabited, picks an element of each
/// `P(x.γ, γ p_γ, q_γ)`, carries it back through the inverse of the evaluation, and checks
/// the resulting stage-wise inhabitation of `Π_A P` gives a global section of its truncation.
pub fn projectivity_check(site: &Site, loc: &LocalRepresentation, g: &Presheaf, a: &TyFam, p: &TyFam, budget: &mut Budget) -> Result<Report> {
    let cat = &site.cat;
    let mut rep = Report::new("projectivity");
    let ga = a.ext(cat, g);
    let inhabited = cat.objects().all(|c| (0..ga.sizes[c]).all(|e| p.fiber(c, e) > 0));
    rep.check("inhabited", inhabited, || "P has an empty fiber".into());
    if !inhabited {
        return Ok(rep);
    }
    let evals = pushforward_evals(site, loc, g, a, p, budget)?;
    let mut sizes = Vec::with_capacity(cat.object_count());
    for c in cat.objects() {
        let mut row = Vec::with_capacity(g.sizes[c] as usize);
        for gamma in 0..g.sizes[c] {
            let ev = &evals[c][gamma as usize];
            let back = ev.inverse().map(|inv| inv[0]);
            rep.check("eval-bijective", back.is_some(), || format!("at {} over {gamma}", site.object_label(c)));
            row.push(back.is_some() as u32);
        }
        sizes.push(row);
    }
    let restr = cat.morphisms().map(|m| sizes[cat.dst(m)].iter().map(|&s| if s == 1 { vec![0] } else { vec![] }).collect()).collect();
    let trunc = TyFam { sizes, restr };
    let section = match trunc.validate(cat, g) {
        Ok(()) => definite(first_elem(cat, g, &trunc, budget))?.is_some(),
        Err(_) => false,
    };
    rep.check("global-section", section, || "no section of the truncated dependent product".into());
    Ok(rep)
}
