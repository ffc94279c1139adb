//! Models of type theory as categories with families, pseudomorphisms between them,
//! pointings, the induced lex operations, and the descent-data check.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::report::{Budget, Outcome, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Cont,
    Subs,
    Ty,
    El,
}

/// The four sorts with substitution and comprehension. `compose(σ, δ)` is `σ ∘ δ`.
pub trait Model {
    type Cont: Clone + Debug + PartialEq;
    type Subs: Clone + Debug + PartialEq;
    type Ty: Clone + Debug + PartialEq;
    type El: Clone + Debug + PartialEq;

    fn name(&self) -> String;
    fn empty(&self) -> Self::Cont;
    fn id(&self, g: &Self::Cont) -> Self::Subs;
    fn compose(&self, sigma: &Self::Subs, delta: &Self::Subs) -> Self::Subs;
    fn ty_subst(&self, a: &Self::Ty, sigma: &Self::Subs) -> Self::Ty;
    fn el_subst(&self, t: &Self::El, sigma: &Self::Subs) -> Self::El;
    fn bang(&self, g: &Self::Cont) -> Self::Subs;
    fn ext(&self, g: &Self::Cont, a: &Self::Ty) -> Self::Cont;
    fn p(&self, g: &Self::Cont, a: &Self::Ty) -> Self::Subs;
    fn q(&self, g: &Self::Cont, a: &Self::Ty) -> Self::El;
    /// `⟨σ, u⟩` where A lives over the codomain of σ and u over its domain.
    fn pair(&self, sigma: &Self::Subs, a: &Self::Ty, u: &Self::El) -> Self::Subs;

    /// `σ⁺ : Δ.Aσ -> Γ.A`.
    fn lift(&self, sigma: &Self::Subs, delta: &Self::Cont, a: &Self::Ty) -> Self::Subs {
        let a_sigma = self.ty_subst(a, sigma);
        let p = self.p(delta, &a_sigma);
        self.pair(&self.compose(sigma, &p), a, &self.q(delta, &a_sigma))
    }

    /// Whether equality on a sort is decidable; the law checker refuses to compare otherwise.
    fn decidable(&self, _sort: Sort) -> bool {
        true
    }
}

/// Finite enumeration hooks: a roster of contexts and types, with substitutions and
/// elements enumerated in full.
pub trait Enumerate: Model {
    fn contexts(&self) -> Vec<Self::Cont>;
    fn types(&self, g: &Self::Cont) -> Vec<Self::Ty>;
    fn substs(&self, dom: &Self::Cont, cod: &Self::Cont, budget: &mut Budget) -> Result<Vec<Self::Subs>>;
    fn elems(&self, g: &Self::Cont, a: &Self::Ty, budget: &mut Budget) -> Result<Vec<Self::El>>;
}

fn require_decidable<M: Model>(m: &M) -> Result<()> {
    for s in [Sort::Cont, Sort::Subs, Sort::Ty, Sort::El] {
        if !m.decidable(s) {
            return Err(Error::NonDecidableEquality(format!("{s:?} in {}", m.name())));
        }
    }
    Ok(())
}

/// Checks every CwF equation on the model's rosters with full enumeration of
/// substitutions and elements.
pub fn check_cwf_laws<M: Enumerate>(m: &M, budget: &mut Budget) -> Result<Report> {
    require_decidable(m)?;
    let mut rep = Report::new(format!("cwf-laws/{}", m.name()));
    let cs = m.contexts();
    let n = cs.len();
    let mut subs = vec![vec![Vec::new(); n]; n];
    for (i, row) in subs.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = m.substs(&cs[i], &cs[j], budget)?;
        }
    }
    let one = m.empty();
    for (i, g) in cs.iter().enumerate() {
        let id = m.id(g);
        for j in 0..n {
            for (k, s) in subs[j][i].iter().enumerate() {
                rep.check("id-left", m.compose(&id, s) == *s, || format!("Γ#{i}, Δ#{j}, σ#{k}"));
            }
            for (k, s) in subs[i][j].iter().enumerate() {
                rep.check("id-right", m.compose(s, &id) == *s, || format!("Γ#{j}, Δ#{i}, σ#{k}"));
            }
        }
        for (k, s) in m.substs(g, &one, budget)?.iter().enumerate() {
            rep.check("terminal-unique", *s == m.bang(g), || format!("Γ#{i}, σ#{k}"));
        }
    }
    // (σδ)θ = σ(δθ) for Ξ -θ-> Θ -δ-> Δ -σ-> Γ
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for (si, s) in subs[b][a].iter().enumerate() {
                        for (di, dl) in subs[c][b].iter().enumerate() {
                            let sd = m.compose(s, dl);
                            for (ti, t) in subs[d][c].iter().enumerate() {
                                budget.charge(1, "associativity instances")?;
                                rep.check("assoc", m.compose(&sd, t) == m.compose(s, &m.compose(dl, t)), || {
                                    format!("contexts #{d}->#{c}->#{b}->#{a}, θ#{ti}, δ#{di}, σ#{si}")
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    for (gi, g) in cs.iter().enumerate() {
        let id = m.id(g);
        for (ai, a) in m.types(g).iter().enumerate() {
            let w = |extra: String| format!("Γ#{gi}, A#{ai}{extra}");
            rep.check("ty-id", m.ty_subst(a, &id) == *a, || w(String::new()));
            let ts = m.elems(g, a, budget)?;
            for (ti, t) in ts.iter().enumerate() {
                rep.check("el-id", m.el_subst(t, &id) == *t, || w(format!(", t#{ti}")));
            }
            let ga = m.ext(g, a);
            let p = m.p(g, a);
            let q = m.q(g, a);
            rep.check("pair-eta", m.pair(&p, a, &q) == m.id(&ga), || w(String::new()));
            for di in 0..n {
                for (si, s) in subs[di][gi].iter().enumerate() {
                    let a_s = m.ty_subst(a, s);
                    let lifted = m.lift(s, &cs[di], a);
                    let pd = m.p(&cs[di], &a_s);
                    rep.check("lift-p", m.compose(&p, &lifted) == m.compose(s, &pd), || w(format!(", Δ#{di}, σ#{si}")));
                    let us = m.elems(&cs[di], &a_s, budget)?;
                    for (ui, u) in us.iter().enumerate() {
                        let pr = m.pair(s, a, u);
                        rep.check("p-pair", m.compose(&p, &pr) == *s, || w(format!(", Δ#{di}, σ#{si}, u#{ui}")));
                        rep.check("q-pair", m.el_subst(&q, &pr) == *u, || w(format!(", Δ#{di}, σ#{si}, u#{ui}")));
                        for th in 0..n {
                            for (ei, e) in subs[th][di].iter().enumerate() {
                                budget.charge(1, "pairing naturality instances")?;
                                let lhs = m.compose(&pr, e);
                                let rhs = m.pair(&m.compose(s, e), a, &m.el_subst(u, e));
                                rep.check("pair-nat", lhs == rhs, || {
                                    w(format!(", Δ#{di}, σ#{si}, u#{ui}, Θ#{th}, δ#{ei}"))
                                });
                            }
                        }
                    }
                    for th in 0..n {
                        for (ei, e) in subs[th][di].iter().enumerate() {
                            let se = m.compose(s, e);
                            rep.check("ty-comp", m.ty_subst(&a_s, e) == m.ty_subst(a, &se), || {
                                w(format!(", Δ#{di}, σ#{si}, Θ#{th}, δ#{ei}"))
                            });
                            for (ti, t) in ts.iter().enumerate() {
                                budget.charge(1, "element substitution instances")?;
                                rep.check("el-comp", m.el_subst(&m.el_subst(t, s), e) == m.el_subst(t, &se), || {
                                    w(format!(", t#{ti}, Δ#{di}, σ#{si}, Θ#{th}, δ#{ei}"))
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    rep.fact("contexts", n);
    Ok(rep)
}

/// A map of models preserving substitution strictly and comprehension up to `↓`.
/// Actions receive the typing context of their argument.
pub trait Pseudomorphism {
    type Src: Model;
    type Tgt: Model;

    fn source(&self) -> &Self::Src;
    fn target(&self) -> &Self::Tgt;
    fn cont(&self, g: &Cont<Self::Src>) -> Result<Cont<Self::Tgt>>;
    fn subs(&self, dom: &Cont<Self::Src>, cod: &Cont<Self::Src>, s: &Subs<Self::Src>) -> Result<Subs<Self::Tgt>>;
    fn ty(&self, g: &Cont<Self::Src>, a: &Ty<Self::Src>) -> Result<Ty<Self::Tgt>>;
    fn el(&self, g: &Cont<Self::Src>, a: &Ty<Self::Src>, t: &El<Self::Src>) -> Result<El<Self::Tgt>>;
    /// `↓ : DΓ.DA -> D(Γ.A)`.
    fn down(&self, g: &Cont<Self::Src>, a: &Ty<Self::Src>) -> Result<Subs<Self::Tgt>>;
    /// `↓ : 1 -> D1`.
    fn down_empty(&self) -> Result<Subs<Self::Tgt>>;
}

pub type Cont<M> = <M as Model>::Cont;
pub type Subs<M> = <M as Model>::Subs;
pub type Ty<M> = <M as Model>::Ty;
pub type El<M> = <M as Model>::El;

/// Checks strict preservation and the `↓` equations over the source's enumeration.
pub fn check_pseudomorphism<F>(f: &F, budget: &mut Budget) -> Result<Report>
where
    F: Pseudomorphism,
    F::Src: Enumerate,
{
    let src = f.source();
    let tgt = f.target();
    require_decidable(src)?;
    require_decidable(tgt)?;
    let mut rep = Report::new(format!("pseudomorphism/{}->{}", src.name(), tgt.name()));
    let cs = src.contexts();
    let n = cs.len();
    let mut subs = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            subs[i][j] = src.substs(&cs[i], &cs[j], budget)?;
        }
    }
    let dcs = cs.iter().map(|g| f.cont(g)).collect::<Result<Vec<_>>>()?;
    let mut dsubs = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            dsubs[i][j] = subs[i][j].iter().map(|s| f.subs(&cs[i], &cs[j], s)).collect::<Result<Vec<_>>>()?;
        }
    }
    for (i, g) in cs.iter().enumerate() {
        let dg = &dcs[i];
        rep.check("preserve-id", f.subs(g, g, &src.id(g))? == tgt.id(dg), || format!("Γ#{i}"));
        for j in 0..n {
            for k in 0..n {
                for (a, s) in subs[j][i].iter().enumerate() {
                    for (b, d) in subs[k][j].iter().enumerate() {
                        budget.charge(1, "composition preservation")?;
                        let lhs = f.subs(&cs[k], g, &src.compose(s, d))?;
                        rep.check("preserve-compose", lhs == tgt.compose(&dsubs[j][i][a], &dsubs[k][j][b]), || {
                            format!("Γ#{i}, Δ#{j}, Θ#{k}, σ#{a}, δ#{b}")
                        });
                    }
                }
            }
        }
        for (ai, a) in src.types(g).iter().enumerate() {
            let da = f.ty(g, a)?;
            let w = |extra: String| format!("Γ#{i}, A#{ai}{extra}");
            let down = f.down(g, a)?;
            let ga = src.ext(g, a);
            let dga = f.cont(&ga)?;
            let dg_da = tgt.ext(dg, &da);
            let dp = f.subs(&ga, g, &src.p(g, a))?;
            let ap = src.ty_subst(a, &src.p(g, a));
            let dq = f.el(&ga, &ap, &src.q(g, a))?;
            rep.check("down-p", tgt.compose(&dp, &down) == tgt.p(dg, &da), || w(String::new()));
            rep.check("down-q", tgt.el_subst(&dq, &down) == tgt.q(dg, &da), || w(String::new()));
            let up = tgt.pair(&dp, &da, &dq);
            rep.check("down-pair", tgt.compose(&down, &up) == tgt.id(&dga), || w(String::new()));
            rep.check("pair-down", tgt.compose(&up, &down) == tgt.id(&dg_da), || w(String::new()));
            let ts = src.elems(g, a, budget)?;
            let dts = ts.iter().map(|t| f.el(g, a, t)).collect::<Result<Vec<_>>>()?;
            for j in 0..n {
                for (si, s) in subs[j][i].iter().enumerate() {
                    let ds = &dsubs[j][i][si];
                    let a_s = src.ty_subst(a, s);
                    rep.check("preserve-ty-subst", f.ty(&cs[j], &a_s)? == tgt.ty_subst(&da, ds), || {
                        w(format!(", Δ#{j}, σ#{si}"))
                    });
                    for (ti, t) in ts.iter().enumerate() {
                        let lhs = f.el(&cs[j], &a_s, &src.el_subst(t, s))?;
                        rep.check("preserve-el-subst", lhs == tgt.el_subst(&dts[ti], ds), || {
                            w(format!(", t#{ti}, Δ#{j}, σ#{si}"))
                        });
                    }
                }
            }
        }
    }
    let one = src.empty();
    let d1 = f.cont(&one)?;
    rep.check("down-empty", tgt.compose(&f.down_empty()?, &tgt.bang(&d1)) == tgt.id(&d1), || "1".into());
    Ok(rep)
}

/// The identity pseudomorphism on a model.
pub struct IdentityMorphism<'a, M>(pub &'a M);

impl<M: Model> Pseudomorphism for IdentityMorphism<'_, M> {
    type Src = M;
    type Tgt = M;
    fn source(&self) -> &M {
        self.0
    }
    fn target(&self) -> &M {
        self.0
    }
    fn cont(&self, g: &M::Cont) -> Result<M::Cont> {
        Ok(g.clone())
    }
    fn subs(&self, _: &M::Cont, _: &M::Cont, s: &M::Subs) -> Result<M::Subs> {
        Ok(s.clone())
    }
    fn ty(&self, _: &M::Cont, a: &M::Ty) -> Result<M::Ty> {
        Ok(a.clone())
    }
    fn el(&self, _: &M::Cont, _: &M::Ty, t: &M::El) -> Result<M::El> {
        Ok(t.clone())
    }
    fn down(&self, g: &M::Cont, a: &M::Ty) -> Result<M::Subs> {
        Ok(self.0.id(&self.0.ext(g, a)))
    }
    fn down_empty(&self) -> Result<M::Subs> {
        Ok(self.0.id(&self.0.empty()))
    }
}

/// A natural family `α_Γ : Γ -> DΓ`.
pub trait Pointing<M: Model> {
    fn component(&self, g: &M::Cont) -> Result<M::Subs>;
}

/// The identity pointing of the identity pseudomorphism.
pub struct IdentityPointing<'a, M>(pub &'a M);

impl<M: Model> Pointing<M> for IdentityPointing<'_, M> {
    fn component(&self, g: &M::Cont) -> Result<M::Subs> {
        Ok(self.0.id(g))
    }
}

/// The lex operation of a pointed pseudo-endomorphism.
pub struct LexOperationData<'a, M: Model, D, P> {
    pub model: &'a M,
    pub d: &'a D,
    pub alpha: &'a P,
}

/// Builds the lex operation, checking `ασ = (Dσ)α` on every enumerated σ.
pub fn lex_of_pointed<'a, M, D, P>(
    model: &'a M,
    d: &'a D,
    alpha: &'a P,
    budget: &mut Budget,
) -> Result<LexOperationData<'a, M, D, P>>
where
    M: Enumerate,
    D: Pseudomorphism<Src = M, Tgt = M>,
    P: Pointing<M>,
{
    let cs = model.contexts();
    for (i, g) in cs.iter().enumerate() {
        let ag = alpha.component(g)?;
        for (j, dl) in cs.iter().enumerate() {
            let ad = alpha.component(dl)?;
            for (k, s) in model.substs(dl, g, budget)?.iter().enumerate() {
                if model.compose(&ag, s) != model.compose(&d.subs(dl, g, s)?, &ad) {
                    return Err(Error::NaturalityViolation(format!("ασ ≠ (Dσ)α at Γ#{i}, Δ#{j}, σ#{k}")));
                }
            }
        }
    }
    Ok(LexOperationData { model, d, alpha })
}

impl<M, D, P> LexOperationData<'_, M, D, P>
where
    M: Model,
    D: Pseudomorphism<Src = M, Tgt = M>,
    P: Pointing<M>,
{
    /// `D̄A = (DA)α`.
    pub fn ty(&self, g: &M::Cont, a: &M::Ty) -> Result<M::Ty> {
        Ok(self.model.ty_subst(&self.d.ty(g, a)?, &self.alpha.component(g)?))
    }

    /// `↓α⁺ : Γ.D̄A -> D(Γ.A)`, where `α⁺ = ⟨αp, q⟩ : Γ.D̄A -> DΓ.DA`.
    pub fn down_alpha_plus(&self, g: &M::Cont, a: &M::Ty) -> Result<M::Subs> {
        let m = self.model;
        let bar = self.ty(g, a)?;
        let p = m.p(g, &bar);
        let plus = m.pair(&m.compose(&self.alpha.component(g)?, &p), &self.d.ty(g, a)?, &m.q(g, &bar));
        Ok(m.compose(&self.d.down(g, a)?, &plus))
    }

    /// `D̃B = (DB)↓α⁺` over `Γ.D̄A`, for B over Γ.A.
    pub fn fam(&self, g: &M::Cont, a: &M::Ty, b: &M::Ty) -> Result<M::Ty> {
        let ga = self.model.ext(g, a);
        Ok(self.model.ty_subst(&self.d.ty(&ga, b)?, &self.down_alpha_plus(g, a)?))
    }

    /// `D̄t = (Dt)α`.
    pub fn el(&self, g: &M::Cont, a: &M::Ty, t: &M::El) -> Result<M::El> {
        Ok(self.model.el_subst(&self.d.el(g, a, t)?, &self.alpha.component(g)?))
    }

    /// `(Dt)↓α⁺` for t ∈ El(Γ.A, B).
    pub fn fam_el(&self, g: &M::Cont, a: &M::Ty, b: &M::Ty, t: &M::El) -> Result<M::El> {
        let ga = self.model.ext(g, a);
        Ok(self.model.el_subst(&self.d.el(&ga, b, t)?, &self.down_alpha_plus(g, a)?))
    }

    /// `η_A = (Dq)α_{Γ.A} ∈ El(Γ.A, (D̄A)p)`.
    pub fn unit(&self, g: &M::Cont, a: &M::Ty) -> Result<M::El> {
        let m = self.model;
        let ga = m.ext(g, a);
        let ap = m.ty_subst(a, &m.p(g, a));
        Ok(m.el_subst(&self.d.el(&ga, &ap, &m.q(g, a))?, &self.alpha.component(&ga)?))
    }

    /// The action on a map `f : A -> B` given as an element of Bp over Γ.A; the result is a
    /// map `D̄A -> D̄B`.
    pub fn map(&self, g: &M::Cont, a: &M::Ty, b: &M::Ty, f: &M::El) -> Result<M::El> {
        let bp = self.model.ty_subst(b, &self.model.p(g, a));
        self.fam_el(g, a, &bp, f)
    }
}

/// Checks `(D̄A)σ = D̄(Aσ)` and naturality of the unit over the enumeration.
pub fn check_lex_stability<M, D, P>(lex: &LexOperationData<'_, M, D, P>, budget: &mut Budget) -> Result<Report>
where
    M: Enumerate,
    D: Pseudomorphism<Src = M, Tgt = M>,
    P: Pointing<M>,
{
    let m = lex.model;
    let mut rep = Report::new(format!("lex-stability/{}", m.name()));
    let cs = m.contexts();
    for (i, g) in cs.iter().enumerate() {
        for (ai, a) in m.types(g).iter().enumerate() {
            let bar = lex.ty(g, a)?;
            let eta = lex.unit(g, a)?;
            for (j, dl) in cs.iter().enumerate() {
                for (k, s) in m.substs(dl, g, budget)?.iter().enumerate() {
                    let a_s = m.ty_subst(a, s);
                    rep.check("lex-ty-subst", m.ty_subst(&bar, s) == lex.ty(dl, &a_s)?, || {
                        format!("Γ#{i}, A#{ai}, Δ#{j}, σ#{k}")
                    });
                    let lifted = m.lift(s, dl, a);
                    rep.check("unit-nat", m.el_subst(&eta, &lifted) == lex.unit(dl, &a_s)?, || {
                        format!("Γ#{i}, A#{ai}, Δ#{j}, σ#{k}")
                    });
                }
            }
        }
    }
    Ok(rep)
}

/// An equivalence search on a map of types `f : A -> B` over Γ, given as an element of
/// Bp over Γ.A.
pub trait EquivSearch<M: Model> {
    fn search(&mut self, g: &M::Cont, a: &M::Ty, b: &M::Ty, f: &M::El, budget: &mut Budget) -> Result<Outcome>;
}

impl<M: Model, F> EquivSearch<M> for F
where
    F: FnMut(&M::Cont, &M::Ty, &M::Ty, &M::El, &mut Budget) -> Result<Outcome>,
{
    fn search(&mut self, g: &M::Cont, a: &M::Ty, b: &M::Ty, f: &M::El, budget: &mut Budget) -> Result<Outcome> {
        self(g, a, b, f, budget)
    }
}

/// For each sample `(Γ, A)`, searches for equivalence data on `D̄η_A` and `η_{D̄A}`.
/// Identity maps are accepted without search.
pub fn check_descent_data<M, D, P, S>(
    lex: &LexOperationData<'_, M, D, P>,
    samples: &[(M::Cont, M::Ty)],
    search: &mut S,
    budget: &mut Budget,
) -> Result<Report>
where
    M: Model,
    D: Pseudomorphism<Src = M, Tgt = M>,
    P: Pointing<M>,
    S: EquivSearch<M>,
{
    let m = lex.model;
    let mut rep = Report::new(format!("descent-data/{}", m.name()));
    for (i, (g, a)) in samples.iter().enumerate() {
        let bar = lex.ty(g, a)?;
        let bar2 = lex.ty(g, &bar)?;
        let eta = lex.unit(g, a)?;
        let maps = [("D̄η", lex.map(g, a, &bar, &eta)?), ("ηD̄", lex.unit(g, &bar)?)];
        for (name, f) in maps {
            let goal = format!("{name} sample#{i}");
            if bar2 == bar && f == m.q(g, &bar) {
                rep.search(goal, Outcome::Found, 0);
                rep.check("descent-equivalence", true, String::new);
                continue;
            }
            let before = budget.spent;
            let outcome = match search.search(g, &bar, &bar2, &f, budget) {
                Ok(o) => o,
                Err(Error::BudgetExceeded(_)) => Outcome::Inconclusive,
                Err(e) => return Err(e),
            };
            rep.search(goal.clone(), outcome, budget.spent.saturating_sub(before));
            match outcome {
                Outcome::Found => rep.check("descent-equivalence", true, String::new),
                Outcome::Refuted => rep.fail("descent-equivalence", goal),
                Outcome::Inconclusive => {}
            }
        }
    }
    Ok(rep)
}
