//! Lex operations on cubical sets lifted to presheaves over an internal category.
//!
//! A base operation T acts on cubical sets over the objects of C; its lift `T_C` is
//! computed on `PSh(∫C0)` and the C-action is put back by factoring every morphism of ∫C
//! as a levelwise map after a map with identity cube part.

mod composite;

#[cfg(test)]
mod tests;

pub use composite::{
    check_modal_characterization, check_pi_two_ways, check_surjections_levelwise, check_truncation_levelwise,
    composite_dt, compose_maps, fiber_truncation, CompositeDT, PiPointing, Units,
};

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::cat::{grothendieck, parse_cofibration, Cat, Cofibration, CubeCategory, CubeMap, InternalCategory, Mor, Site};
use crate::cwf::{check_descent_data, check_lex_stability, lex_of_pointed, LexOperationData, Pointing};
use crate::error::{Error, Result};
use crate::fib::is_equiv_search;
use crate::psh::formers::{exponential, ExpDomain};
use crate::psh::model::{default_contexts, default_types, DisplayLift, PshFunctor, PshModel};
use crate::psh::{fibers, Carrier, Elem, Fibers, Presheaf, Subst, TyFam};
use crate::report::{Budget, Report};

/// A subterminal cubical set, given by which stages are inhabited.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenModality {
    stages: Vec<bool>,
}

impl OpenModality {
    /// Validates the stage sizes as a presheaf on the cube category with at most one
    /// element per stage.
    pub fn new(cube: &CubeCategory, sizes: &[u32]) -> Result<OpenModality> {
        if sizes.len() != cube.dim() + 1 {
            return Err(Error::ArityMismatch(format!("{} stage sizes for dimension {}", sizes.len(), cube.dim())));
        }
        if let Some(k) = sizes.iter().position(|&s| s > 1) {
            return Err(Error::NotSubterminal(format!("{} elements at stage [{k}]", sizes[k])));
        }
        for f in cube.maps() {
            if sizes[f.dst] == 1 && sizes[f.src] == 0 {
                return Err(Error::InvalidStructure(format!("no restriction along {} into an empty stage", f.name())));
            }
        }
        Ok(OpenModality { stages: sizes.iter().map(|&s| s == 1).collect() })
    }

    pub fn constant(inhabited: bool, d: usize) -> OpenModality {
        OpenModality { stages: vec![inhabited; d + 1] }
    }

    /// A cofibration in no variables; with free variables it is a subobject of a cube,
    /// not of the point.
    pub fn from_cofibration(phi: &Cofibration, d: usize) -> Result<OpenModality> {
        if phi.arity() != 0 {
            return Err(Error::NotSubterminal(format!("{phi} has {} free variables", phi.arity())));
        }
        Ok(OpenModality::constant(phi.is_top(), d))
    }

    pub fn stages(&self) -> &[bool] {
        &self.stages
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseLexOp {
    Identity,
    /// `TA = A^P` with the constant-function unit.
    Open(OpenModality),
}

impl fmt::Display for BaseLexOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseLexOp::Identity => write!(f, "identity"),
            BaseLexOp::Open(m) if m.stages.iter().all(|&b| b) => write!(f, "open:top"),
            BaseLexOp::Open(m) if m.stages.iter().all(|&b| !b) => write!(f, "open:bot"),
            BaseLexOp::Open(m) => {
                let bits: String = m.stages.iter().map(|&b| if b { '1' } else { '0' }).collect();
                write!(f, "open:[{bits}]")
            }
        }
    }
}

pub fn open_modality(phi: &Cofibration, d: usize) -> Result<BaseLexOp> {
    Ok(BaseLexOp::Open(OpenModality::from_cofibration(phi, d)?))
}

/// `identity` or `open:<cofibration>`.
pub fn parse_lex_op(name: &str, d: usize) -> Result<BaseLexOp> {
    let name = name.trim();
    if name == "identity" {
        return Ok(BaseLexOp::Identity);
    }
    let Some(src) = name.strip_prefix("open:") else {
        return Err(Error::InvalidStructure(format!("unknown lex operation {name:?}")));
    };
    match parse_cofibration(src, 0) {
        Ok(phi) => open_modality(&phi, d),
        Err(e) => match parse_cofibration(src, 16) {
            Ok(phi) => Err(Error::NotSubterminal(format!("{phi} depends on interval variables"))),
            Err(_) => Err(Error::InvalidStructure(e)),
        },
    }
}

struct Lifted {
    carrier: Carrier,
    domains: Vec<ExpDomain>,
}

/// `T_C` on presheaves over one site.
pub struct SiteLexOp {
    pub site: Site,
    pub lvl: Site,
    incl: Vec<Mor>,
    pub op: BaseLexOp,
    /// The exponent pulled back to ∫C0.
    exponent: Presheaf,
    limit: u64,
    cache: RefCell<HashMap<Presheaf, Arc<Lifted>>>,
}

impl SiteLexOp {
    pub fn new(site: Site, op: BaseLexOp, limit: u64) -> Result<SiteLexOp> {
        let (lvl, incl) = site.levelwise()?;
        let stages = match &op {
            BaseLexOp::Identity => vec![true; site.dim() + 1],
            BaseLexOp::Open(m) => {
                let sizes: Vec<u32> = m.stages.iter().map(|&b| b as u32).collect();
                OpenModality::new(site.cube(), &sizes)?;
                m.stages.clone()
            }
        };
        let lcat = &lvl.cat;
        let exponent = Presheaf {
            sizes: lcat.objects().map(|c| stages[lvl.stage(c)] as u32).collect(),
            restr: lcat.morphisms().map(|m| if stages[lvl.stage(lcat.dst(m))] { vec![0] } else { vec![] }).collect(),
        };
        exponent.validate(lcat)?;
        Ok(SiteLexOp { site, lvl, incl, op, exponent, limit, cache: RefCell::new(HashMap::new()) })
    }

    pub fn cat(&self) -> &Cat {
        &self.site.cat
    }

    pub fn u_psh(&self, g: &Presheaf) -> Presheaf {
        Presheaf { sizes: g.sizes.clone(), restr: self.incl.iter().map(|&m| g.restr[m].clone()).collect() }
    }

    pub fn u_ty(&self, a: &TyFam) -> TyFam {
        TyFam { sizes: a.sizes.clone(), restr: self.incl.iter().map(|&m| a.restr[m].clone()).collect() }
    }

    fn lifted(&self, g: &Presheaf) -> Result<Arc<Lifted>> {
        if let Some(l) = self.cache.borrow().get(g) {
            return Ok(l.clone());
        }
        let cat = &self.site.cat;
        let mut budget = Budget::new(self.limit);
        let exp = exponential(&self.lvl.cat, &self.exponent, &self.u_psh(g), &mut budget)?;
        // h ∘ g1 = ℓ ∘ v with ℓ levelwise and v of identity cube part
        let mut plans: Vec<Vec<(usize, Mor)>> = Vec::with_capacity(cat.morphism_count());
        for h in cat.morphisms() {
            let c = cat.dst(h);
            let plan = exp.domains[cat.src(h)]
                .dom
                .iter()
                .map(|&(g1, w)| {
                    let m = cat.compose(h, self.incl[g1]);
                    let f = self.site.cube_part(m);
                    let l0 = self.lvl.lift(c, f)?;
                    let l = self.site.lift(c, f)?;
                    let src = cat.src(l);
                    let id = self
                        .site
                        .cube()
                        .lookup(&CubeMap::identity(self.site.stage(src)))
                        .ok_or_else(|| Error::Validation("missing identity cube map".into()))?;
                    let v = self
                        .site
                        .morphism(id, self.site.point(src), self.site.arrow_part(m))
                        .ok_or_else(|| Error::Validation("missing factorization".into()))?;
                    Ok((exp.domains[c].index[&(l0, w)], v))
                })
                .collect::<Result<Vec<_>>>()?;
            plans.push(plan);
        }
        let carrier =
            Carrier::build(cat, exp.carrier.elems, |h, fam| plans[h].iter().map(|&(i, v)| g.act(v, fam[i])).collect())?;
        carrier.psh.validate(cat)?;
        let l = Arc::new(Lifted { carrier, domains: exp.domains });
        self.cache.borrow_mut().insert(g.clone(), l.clone());
        Ok(l)
    }

    /// `ϑ_Γ : Γ -> T_C Γ`, sending γ to its family of restrictions.
    pub fn unit(&self, g: &Presheaf) -> Result<Subst> {
        if self.op == BaseLexOp::Identity {
            return Ok(Subst::identity(g));
        }
        let l = self.lifted(g)?;
        let maps = self
            .site
            .cat
            .objects()
            .map(|c| {
                (0..g.sizes[c])
                    .map(|gamma| {
                        let fam: Vec<u32> = l.domains[c].dom.iter().map(|&(g1, _)| g.act(self.incl[g1], gamma)).collect();
                        l.carrier.lookup(c, &fam).ok_or_else(|| Error::NaturalityViolation("unit leaves T_C Γ".into()))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Subst { maps })
    }

    /// `T_C A` as the fibers of `T_C p`.
    pub fn ty(&self, g: &Presheaf, a: &TyFam) -> Result<Fibers> {
        let cat = &self.site.cat;
        let ga = a.ext(cat, g);
        Ok(fibers(cat, &self.obj(&ga)?, &self.obj(g)?, &self.map(&ga, g, &a.proj())?))
    }

    /// `(T̄A, ϑ_A)` with `T̄A = (T_C A)ϑ_Γ` and `ϑ_A ∈ El(Γ.A, (T̄A)p)`.
    pub fn unit_ty(&self, g: &Presheaf, a: &TyFam) -> Result<(TyFam, Elem)> {
        let model = PshModel::new(self.site.cat.clone(), self.op.to_string());
        let dl = DisplayLift::new(&model, &model, self);
        let theta = ThetaPointing(self);
        let lex = LexOperationData { model: &model, d: &dl, alpha: &theta };
        Ok((lex.ty(g, a)?, lex.unit(g, a)?))
    }
}

impl PshFunctor for SiteLexOp {
    fn source_cat(&self) -> &Cat {
        &self.site.cat
    }
    fn target_cat(&self) -> &Cat {
        &self.site.cat
    }
    fn obj(&self, g: &Presheaf) -> Result<Presheaf> {
        if self.op == BaseLexOp::Identity {
            return Ok(g.clone());
        }
        Ok(self.lifted(g)?.carrier.psh.clone())
    }
    fn map(&self, dom: &Presheaf, cod: &Presheaf, s: &Subst) -> Result<Subst> {
        if self.op == BaseLexOp::Identity {
            return Ok(s.clone());
        }
        let (ld, lc) = (self.lifted(dom)?, self.lifted(cod)?);
        let lcat = &self.lvl.cat;
        let maps = self
            .site
            .cat
            .objects()
            .map(|c| {
                ld.carrier.elems[c]
                    .iter()
                    .map(|fam| {
                        let img: Vec<u32> =
                            fam.iter().zip(&ld.domains[c].dom).map(|(&v, &(g1, _))| s.maps[lcat.src(g1)][v as usize]).collect();
                        lc.carrier.lookup(c, &img).ok_or_else(|| Error::NaturalityViolation("T_C σ leaves T_C Δ".into()))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Subst { maps })
    }
}

/// ϑ as a pointing of `T_C`.
pub struct ThetaPointing<'a>(pub &'a SiteLexOp);

impl Pointing<PshModel> for ThetaPointing<'_> {
    fn component(&self, g: &Presheaf) -> Result<Subst> {
        self.0.unit(g)
    }
}

/// `T_C` over a site together with `T_{C0}` over its levelwise site.
pub struct LiftedLexOp {
    pub global: SiteLexOp,
    pub levelwise: SiteLexOp,
    /// The strict comparison of U against the levelwise lift on the default roster.
    pub report: Report,
}

/// Lifts T to the site and re-checks `U(T_C A) = T_{C0}(UA)` and `U(ϑ_A) = ϑ_{UA}` on the
/// default contexts and types.
pub fn lift_lex(op: &BaseLexOp, site: &Site, limit: u64) -> Result<LiftedLexOp> {
    let global = SiteLexOp::new(site.clone(), op.clone(), limit)?;
    let levelwise = SiteLexOp::new(global.lvl.clone(), op.clone(), limit)?;
    let cat = &site.cat;
    let samples = default_contexts(cat)
        .into_iter()
        .map(|g| {
            let ts = default_types(cat, &g)?;
            Ok((g, ts))
        })
        .collect::<Result<Vec<_>>>()?;
    let report = check_u_strict(&global, &levelwise, &samples)?;
    if !report.pass() {
        let w = &report.failures[0];
        return Err(Error::InvalidStructure(format!("U does not commute with {op}: {} at {}", w.equation, w.witness)));
    }
    Ok(LiftedLexOp { global, levelwise, report })
}

/// Stage-wise carrier equality of `U ∘ T_C` and `T_{C0} ∘ U` on contexts, types and units.
pub fn check_u_strict(global: &SiteLexOp, levelwise: &SiteLexOp, samples: &[(Presheaf, Vec<TyFam>)]) -> Result<Report> {
    let mut rep = Report::new(format!("u-strict/{}", global.op));
    for (i, (g, tys)) in samples.iter().enumerate() {
        let ug = global.u_psh(g);
        rep.check("u-context", global.u_psh(&global.obj(g)?) == levelwise.obj(&ug)?, || format!("Γ#{i}"));
        rep.check("u-unit", global.unit(g)? == levelwise.unit(&ug)?, || format!("Γ#{i}"));
        for (j, a) in tys.iter().enumerate() {
            let ua = global.u_ty(a);
            rep.check("u-type", global.u_ty(&global.ty(g, a)?.ty) == levelwise.ty(&ug, &ua)?.ty, || format!("Γ#{i}, A#{j}"));
            let (bar, theta) = global.unit_ty(g, a)?;
            let (lbar, ltheta) = levelwise.unit_ty(&ug, &ua)?;
            rep.check("u-type-unit", global.u_ty(&bar) == lbar && theta == ltheta, || format!("Γ#{i}, A#{j}"));
        }
    }
    Ok(rep)
}

/// Lexness on one pair of contexts: `T_C 1 = 1` and `⟨T p1, T p2⟩ : T(X × Y) -> TX × TY` bijective.
pub fn check_lex_preservation(t: &SiteLexOp, x: &Presheaf, y: &Presheaf) -> Result<Report> {
    let cat = t.cat();
    let mut rep = Report::new(format!("lex/{}", t.op));
    let one = t.obj(&Presheaf::terminal(cat))?;
    rep.check("terminal", one.sizes.iter().all(|&s| s == 1), || format!("sizes {:?}", one.sizes));
    let xy = Presheaf::product(cat, x, y);
    let (p1, p2) = crate::cobar::projections(cat, x, y);
    let (tx, ty, txy) = (t.obj(x)?, t.obj(y)?, t.obj(&xy)?);
    let (q1, q2) = (t.map(&xy, x, &p1)?, t.map(&xy, y, &p2)?);
    let prod = Presheaf::product(cat, &tx, &ty);
    let cmp = Subst {
        maps: cat
            .objects()
            .map(|c| (0..txy.sizes[c] as usize).map(|v| q1.maps[c][v] * ty.sizes[c] + q2.maps[c][v]).collect())
            .collect(),
    };
    rep.check("products", cmp.is_bijective(&txy, &prod), || "T(X × Y) -> TX × TY".into());
    Ok(rep)
}

/// The descent-data certificate for T on cubical sets (the terminal internal category):
/// `T̄ϑ_A` and `ϑ_{T̄A}` are searched for equivalence data on the given sizes of discrete A.
pub fn certify_descent(op: &BaseLexOp, d: usize, sizes: &[u32], limit: u64) -> Result<Report> {
    let site = grothendieck(&InternalCategory::constant(&Cat::terminal(), d, "cubes")?)?;
    let t = SiteLexOp::new(site.clone(), op.clone(), limit)?;
    let cat = site.cat.clone();
    let one = Presheaf::terminal(&cat);
    let roster = vec![(one.clone(), sizes.iter().map(|&n| TyFam::constant(&cat, &one, n)).collect::<Vec<_>>())];
    let model = PshModel::new(cat.clone(), format!("cubes/{op}")).with_roster(roster)?;
    let dl = DisplayLift::new(&model, &model, &t);
    let theta = ThetaPointing(&t);
    let mut budget = Budget::new(limit);
    let lex = lex_of_pointed(&model, &dl, &theta, &mut budget)?;
    let mut rep = check_lex_stability(&lex, &mut budget)?;
    let samples: Vec<(Presheaf, TyFam)> = sizes.iter().map(|&n| (one.clone(), TyFam::constant(&cat, &one, n))).collect();
    let mut search = |g: &Presheaf, a: &TyFam, b: &TyFam, f: &Elem, b2: &mut Budget| Ok(is_equiv_search(&site, g, a, b, f, b2).outcome);
    rep.merge(check_descent_data(&lex, &samples, &mut search, &mut budget)?);
    Ok(rep)
}
