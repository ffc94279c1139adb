//! `D_N ∘ T_C` with unit `π = τ_T ∘ ϑ`, the modal characterization and the levelwise
//! principles for truncation and surjections.

use super::{LiftedLexOp, SiteLexOp, ThetaPointing};
use crate::cat::{Cat, Site};
use crate::cobar::{CobarFunctor, TauPointing};
use crate::cwf::{LexOperationData, Pointing};
use crate::error::{Error, Result};
use crate::fib::{is_equiv_search, path_type};
use crate::psh::model::{DisplayLift, PshFunctor, PshModel};
use crate::psh::{first_elem, Elem, ExtCode, Presheaf, Subst, TyFam};
use crate::report::{Budget, Outcome, Report};

pub struct CompositeDT<'a, 'b> {
    pub t: &'b LiftedLexOp,
    pub d: &'b CobarFunctor<'a>,
}

pub fn composite_dt<'a, 'b>(t: &'b LiftedLexOp, d: &'b CobarFunctor<'a>) -> Result<CompositeDT<'a, 'b>> {
    let (tc, dc) = (&t.global.site.cat, d.cobar.site().cat.clone());
    if tc.object_count() != dc.object_count() || tc.morphism_count() != dc.morphism_count() {
        return Err(Error::InvalidStructure("T_C and D_N live over different sites".into()));
    }
    Ok(CompositeDT { t, d })
}

/// The units at a type, each as a map out of A over Γ.
pub struct Units {
    /// `(DT)‾A` and `π_A`.
    pub dt_bar: TyFam,
    pub pi: Elem,
    /// `D̄ϑ_A ∘ τ_A`, carried to `(DT)‾A` along `D↓ϑ⁺`.
    pub pi_via_d: Elem,
    pub d_bar: TyFam,
    pub tau: Elem,
    pub t_bar: TyFam,
    pub theta: Elem,
}

impl CompositeDT<'_, '_> {
    pub fn site(&self) -> &Site {
        &self.t.global.site
    }

    fn cat(&self) -> &Cat {
        &self.t.global.site.cat
    }

    /// `π_Γ = τ_{TΓ} ∘ ϑ_Γ`.
    pub fn pi(&self, g: &Presheaf) -> Result<Subst> {
        let tg = self.t.global.obj(g)?;
        let tau = self.d.cobar.unit(&tg, &*self.d.context(&tg)?)?;
        Ok(tau.compose(&self.t.global.unit(g)?))
    }

    /// `Dϑ_Γ ∘ τ_Γ`.
    pub fn pi_alt(&self, g: &Presheaf) -> Result<Subst> {
        let t = &self.t.global;
        let tg = t.obj(g)?;
        let dtheta = self.d.map(g, &tg, &t.unit(g)?)?;
        Ok(dtheta.compose(&self.d.cobar.unit(g, &*self.d.context(g)?)?))
    }

    pub fn units(&self, g: &Presheaf, a: &TyFam) -> Result<Units> {
        let cat = self.cat();
        let model = PshModel::new(self.t.global.site.cat.clone(), "DT");
        let tf = &self.t.global;
        let (tl, theta_p) = (DisplayLift::new(&model, &model, tf), ThetaPointing(tf));
        let lex_t = LexOperationData { model: &model, d: &tl, alpha: &theta_p };
        let (dl, tau_p) = (DisplayLift::new(&model, &model, self.d), TauPointing(self.d));
        let lex_d = LexOperationData { model: &model, d: &dl, alpha: &tau_p };
        let (cl, pi_p) = (DisplayLift::new(&model, &model, self), PiPointing(self));
        let lex_dt = LexOperationData { model: &model, d: &cl, alpha: &pi_p };

        let (dt_bar, pi) = (lex_dt.ty(g, a)?, lex_dt.unit(g, a)?);
        let (t_bar, theta) = (lex_t.ty(g, a)?, lex_t.unit(g, a)?);
        let (d_bar, tau) = (lex_d.ty(g, a)?, lex_d.unit(g, a)?);
        let dtheta = lex_d.map(g, a, &t_bar, &theta)?;
        let via = compose_maps(cat, a, &d_bar, &tau, &dtheta);

        // D̄T̄A over Γ is D(T̄A) at τ(ρ); its members map into DT(Γ.A) by D of ↓ϑ⁺
        let tau_g = tau_p.component(g)?;
        let pi_g = pi_p.component(g)?;
        let fib_d = dl.fibers(g, &t_bar)?;
        let fib_dt = cl.fibers(g, a)?;
        let (gt, ga) = (t_bar.ext(cat, g), a.ext(cat, g));
        let dplus = self.d.map(&gt, &tf.obj(&ga)?, &lex_t.down_alpha_plus(g, a)?)?;
        let code = ExtCode::new(a);
        let mut vals = Vec::with_capacity(cat.object_count());
        for c in cat.objects() {
            let mut row = Vec::with_capacity(via.vals[c].len());
            for (cd, &u) in via.vals[c].iter().enumerate() {
                let (rho, _) = code.dec(c, cd as u32);
                let t = fib_d.members[c][tau_g.maps[c][rho as usize] as usize][u as usize];
                let t2 = dplus.maps[c][t as usize];
                let j = fib_dt.position[c][t2 as usize];
                if fib_dt.members[c][pi_g.maps[c][rho as usize] as usize].get(j as usize) != Some(&t2) {
                    return Err(Error::NaturalityViolation("D↓ϑ⁺ does not lie over π_Γ".into()));
                }
                row.push(j);
            }
            vals.push(row);
        }
        Ok(Units { dt_bar, pi, pi_via_d: Elem { vals }, d_bar, tau, t_bar, theta })
    }
}

impl PshFunctor for CompositeDT<'_, '_> {
    fn source_cat(&self) -> &Cat {
        self.cat()
    }
    fn target_cat(&self) -> &Cat {
        self.cat()
    }
    fn obj(&self, g: &Presheaf) -> Result<Presheaf> {
        self.d.obj(&self.t.global.obj(g)?)
    }
    fn map(&self, dom: &Presheaf, cod: &Presheaf, s: &Subst) -> Result<Subst> {
        let t = &self.t.global;
        self.d.map(&t.obj(dom)?, &t.obj(cod)?, &t.map(dom, cod, s)?)
    }
}

/// π as a pointing of `D_N ∘ T_C`.
pub struct PiPointing<'c, 'a, 'b>(pub &'c CompositeDT<'a, 'b>);

impl Pointing<PshModel> for PiPointing<'_, '_, '_> {
    fn component(&self, g: &Presheaf) -> Result<Subst> {
        self.0.pi(g)
    }
}

/// `h ∘ f` for `f ∈ El(Γ.A, Bp)` and `h ∈ El(Γ.B, Cp)`.
pub fn compose_maps(cat: &Cat, a: &TyFam, b: &TyFam, f: &Elem, h: &Elem) -> Elem {
    let (ca, cb) = (ExtCode::new(a), ExtCode::new(b));
    Elem {
        vals: cat
            .objects()
            .map(|c| {
                (0..ca.size(c))
                    .map(|cd| {
                        let (rho, _) = ca.dec(c, cd);
                        h.vals[c][cb.enc(c, rho, f.vals[c][cd as usize]) as usize]
                    })
                    .collect()
            })
            .collect(),
    }
}

/// π computed as `τ_T ∘ ϑ` against `Dϑ ∘ τ`, on contexts and on types.
pub fn check_pi_two_ways(dt: &CompositeDT, samples: &[(Presheaf, Vec<TyFam>)]) -> Result<Report> {
    let mut rep = Report::new(format!("pi/{}", dt.t.global.op));
    for (i, (g, tys)) in samples.iter().enumerate() {
        rep.check("pi-context", dt.pi(g)? == dt.pi_alt(g)?, || format!("Γ#{i}"));
        for (j, a) in tys.iter().enumerate() {
            let u = dt.units(g, a)?;
            rep.check("pi-type", u.pi == u.pi_via_d, || format!("Γ#{i}, A#{j}"));
        }
    }
    Ok(rep)
}

fn search(rep: &mut Report, goal: &str, site: &Site, g: &Presheaf, a: &TyFam, b: &TyFam, f: &Elem, limit: u64) -> Outcome {
    let mut budget = Budget::new(limit);
    let v = is_equiv_search(site, g, a, b, f, &mut budget);
    rep.search(goal, v.outcome, budget.spent);
    v.outcome
}

/// `IsEquiv(π_A)` against `IsEquiv(τ_A)` and levelwise `IsEquiv(ϑ_{UA})`.
pub fn check_modal_characterization(dt: &CompositeDT, g: &Presheaf, a: &TyFam, limit: u64) -> Result<Report> {
    let mut rep = Report::new(format!("modal/{}", dt.t.global.op));
    let (t, lt) = (&dt.t.global, &dt.t.levelwise);
    let u = dt.units(g, a)?;
    let (ug, ua) = (t.u_psh(g), t.u_ty(a));
    let (lbar, ltheta) = lt.unit_ty(&ug, &ua)?;
    rep.check("u-unit", t.u_ty(&u.t_bar) == lbar && u.theta == ltheta, || "U(ϑ_A) ≠ ϑ_UA".into());
    let pi = search(&mut rep, "IsEquiv(π_A)", dt.site(), g, a, &u.dt_bar, &u.pi, limit);
    let tau = search(&mut rep, "IsEquiv(τ_A)", dt.site(), g, a, &u.d_bar, &u.tau, limit);
    let theta = search(&mut rep, "levelwise IsEquiv(ϑ_UA)", &lt.site, &ug, &ua, &lbar, &ltheta, limit);
    if [pi, tau, theta].contains(&Outcome::Inconclusive) {
        return Err(Error::SearchInconclusive(format!("π_A {pi:?}, τ_A {tau:?}, ϑ_UA {theta:?}")));
    }
    let found = |o: Outcome| o == Outcome::Found;
    rep.check("modal-biconditional", found(pi) == (found(tau) && found(theta)), || {
        format!("π_A {pi:?}, τ_A {tau:?}, ϑ_UA {theta:?}")
    });
    rep.fact("modal", found(pi));
    Ok(rep)
}

/// `‖Σ_{a:A} Path_B(f a, b)‖` over `Γ.B`, truncated stage-wise: the fiber at `(ρ, b)` has
/// one element when some a has a path from `f a` to b.
pub fn fiber_truncation(site: &Site, g: &Presheaf, a: &TyFam, b: &TyFam, f: &Elem, budget: &mut Budget) -> Result<TyFam> {
    let cat = &site.cat;
    let pt = path_type(site, g, b, budget)?;
    let (ca, cb) = (ExtCode::new(a), ExtCode::new(b));
    let gb = b.ext(cat, g);
    let sizes: Vec<Vec<u32>> = cat
        .objects()
        .map(|c| {
            (0..gb.sizes[c])
                .map(|cd| {
                    let (rho, y) = cb.dec(c, cd);
                    (0..a.fiber(c, rho)).any(|u| {
                        let fu = f.vals[c][ca.enc(c, rho, u) as usize];
                        (0..pt.pi.ty.fiber(c, rho)).any(|s| pt.eval(c, rho, s, false) == fu && pt.eval(c, rho, s, true) == y)
                    }) as u32
                })
                .collect()
        })
        .collect();
    truncation(cat, &gb, sizes)
}

fn truncation(cat: &Cat, g: &Presheaf, sizes: Vec<Vec<u32>>) -> Result<TyFam> {
    let restr = cat
        .morphisms()
        .map(|m| sizes[cat.dst(m)].iter().map(|&s| if s == 1 { vec![0] } else { vec![] }).collect())
        .collect();
    let ty = TyFam { sizes, restr };
    ty.validate(cat, g).map_err(|e| Error::NaturalityViolation(format!("truncation: {e}")))?;
    Ok(ty)
}

fn inhabited(cat: &Cat, g: &Presheaf, ty: &TyFam, budget: &mut Budget) -> Result<bool> {
    Ok(first_elem(cat, g, ty, budget)?.is_some())
}

fn definite<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::BudgetExceeded(m) => Error::SearchInconclusive(m),
        e => e,
    })
}

/// Global against levelwise surjectivity of `f : A -> B` over Γ, after recording the DT-modal
/// certificates of A and B.
pub fn check_surjections_levelwise(
    dt: &CompositeDT,
    g: &Presheaf,
    a: &TyFam,
    b: &TyFam,
    f: &Elem,
    limit: u64,
) -> Result<Report> {
    let mut rep = Report::new(format!("surjection/{}", dt.t.global.op));
    let (t, lt): (&SiteLexOp, &SiteLexOp) = (&dt.t.global, &dt.t.levelwise);
    for (label, ty) in [("A", a), ("B", b)] {
        let u = dt.units(g, ty)?;
        let o = search(&mut rep, &format!("IsEquiv(π_{label})"), dt.site(), g, ty, &u.dt_bar, &u.pi, limit);
        rep.fact(format!("{label}.modal"), format!("{o:?}"));
    }
    let mut budget = Budget::new(limit);
    let site = dt.site();
    let trunc = definite(fiber_truncation(site, g, a, b, f, &mut budget))?;
    let global = definite(inhabited(&site.cat, &b.ext(&site.cat, g), &trunc, &mut budget))?;
    let (ug, ua, ub) = (t.u_psh(g), t.u_ty(a), t.u_ty(b));
    let ltrunc = definite(fiber_truncation(&lt.site, &ug, &ua, &ub, f, &mut budget))?;
    let levelwise = definite(inhabited(&lt.site.cat, &ub.ext(&lt.site.cat, &ug), &ltrunc, &mut budget))?;
    rep.fact("global", global);
    rep.fact("levelwise", levelwise);
    rep.check("surjection-levelwise", global == levelwise, || format!("global {global}, levelwise {levelwise}"));
    Ok(rep)
}

/// `El(Γ, ‖A‖)` against `El(UΓ, ‖UA‖)`, with `‖A‖` the stage-wise inhabitation of A.
pub fn check_truncation_levelwise(site: &Site, g: &Presheaf, a: &TyFam, limit: u64) -> Result<Report> {
    let mut rep = Report::new("truncation");
    let (lvl, incl) = site.levelwise()?;
    let sizes: Vec<Vec<u32>> = a.sizes.iter().map(|row| row.iter().map(|&s| (s > 0) as u32).collect()).collect();
    let trunc = truncation(&site.cat, g, sizes.clone())?;
    let ug = Presheaf { sizes: g.sizes.clone(), restr: incl.iter().map(|&m| g.restr[m].clone()).collect() };
    let ltrunc = truncation(&lvl.cat, &ug, sizes)?;
    let mut budget = Budget::new(limit);
    let global = definite(inhabited(&site.cat, g, &trunc, &mut budget))?;
    let levelwise = definite(inhabited(&lvl.cat, &ug, &ltrunc, &mut budget))?;
    rep.fact("global", global);
    rep.fact("levelwise", levelwise);
    rep.check("truncation-levelwise", global == levelwise, || format!("global {global}, levelwise {levelwise}"));
    Ok(rep)
}
