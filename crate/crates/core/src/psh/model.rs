//! The presheaf model as a [`Model`], and pseudomorphisms induced by functors on presheaves.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use super::{elems, fibers, substs, Elem, Fibers, Presheaf, Subst, TyFam};
use crate::cat::Cat;
use crate::cwf::{Enumerate, Model, Pseudomorphism};
use crate::error::{Error, Result};
use crate::report::Budget;

/// Deliberate defects for canary runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Planted {
    /// `id` sends every element to the first element of its stage.
    ConstantId,
    /// Claims element equality is undecidable.
    OpaqueElements,
}

#[derive(Clone, Debug)]
pub struct PshModel {
    pub cat: Arc<Cat>,
    pub name: String,
    roster: Vec<(Presheaf, Vec<TyFam>)>,
    planted: Option<Planted>,
}

impl PshModel {
    pub fn new(cat: Arc<Cat>, name: impl Into<String>) -> PshModel {
        PshModel { cat, name: name.into(), roster: Vec::new(), planted: None }
    }

    /// The model with the default roster of contexts and types.
    pub fn with_default_roster(cat: Arc<Cat>, name: impl Into<String>) -> Result<PshModel> {
        let mut m = PshModel::new(cat, name);
        for g in default_contexts(&m.cat) {
            let tys = default_types(&m.cat, &g)?;
            m.roster.push((g, tys));
        }
        Ok(m)
    }

    pub fn with_roster(mut self, roster: Vec<(Presheaf, Vec<TyFam>)>) -> Result<PshModel> {
        for (g, tys) in &roster {
            g.validate(&self.cat)?;
            for a in tys {
                a.validate(&self.cat, g)?;
            }
        }
        self.roster = roster;
        Ok(self)
    }

    pub fn planted(mut self, p: Planted) -> PshModel {
        self.planted = Some(p);
        self
    }

    pub fn roster(&self) -> &[(Presheaf, Vec<TyFam>)] {
        &self.roster
    }
}

/// Contexts with carriers of at most three elements per object: the empty and terminal
/// presheaves, a constant two-element set, the representables that fit, and one
/// presheaf with a non-injective restriction when the category has a non-identity arrow.
pub fn default_contexts(cat: &Cat) -> Vec<Presheaf> {
    let mut out = vec![Presheaf::empty(cat), Presheaf::terminal(cat), Presheaf::constant(cat, 2)];
    if cat.morphism_count() == cat.object_count() {
        out.push(Presheaf::constant(cat, 3));
    }
    for x in cat.objects() {
        let y = Presheaf::yoneda(cat, x);
        if y.sizes.iter().all(|&s| s <= 3) && !out.contains(&y) {
            out.push(y);
        }
    }
    if let Some(g) = collapsing(cat) {
        out.push(g);
    }
    let mut uniq: Vec<Presheaf> = Vec::new();
    for g in out {
        if !uniq.contains(&g) {
            uniq.push(g);
        }
    }
    uniq
}

/// 3 elements at every object; restriction along a non-identity arrow merges 1 and 2.
fn collapsing(cat: &Cat) -> Option<Presheaf> {
    if cat.morphisms().all(|f| cat.is_id(f)) {
        return None;
    }
    // Γ(X) = {0, 1, 2}; non-identity arrows send 2 to 1. Composites of non-identities are
    // non-identities in a category without non-trivial isomorphisms, so this is functorial
    // for the categories in the roster; validation below guards the rest.
    let g = Presheaf {
        sizes: vec![3; cat.object_count()],
        restr: cat.morphisms().map(|f| if cat.is_id(f) { vec![0, 1, 2] } else { vec![0, 1, 1] }).collect(),
    };
    g.validate(cat).ok().map(|_| g)
}

/// Constant types of size 1 and 2, and the fibers of the first non-identity endomorphism.
pub fn default_types(cat: &Cat, g: &Presheaf) -> Result<Vec<TyFam>> {
    let mut out = vec![TyFam::constant(cat, g, 1), TyFam::constant(cat, g, 2)];
    let id = Subst::identity(g);
    if let Some(h) = substs(cat, g, g, &mut Budget::new(1_000_000))?.into_iter().find(|s| *s != id) {
        out.push(fibers(cat, g, g, &h).ty);
    }
    Ok(out)
}

impl Model for PshModel {
    type Cont = Presheaf;
    type Subs = Subst;
    type Ty = TyFam;
    type El = Elem;

    fn name(&self) -> String {
        self.name.clone()
    }

    fn empty(&self) -> Presheaf {
        Presheaf::terminal(&self.cat)
    }

    fn id(&self, g: &Presheaf) -> Subst {
        if self.planted == Some(Planted::ConstantId) {
            return Subst { maps: g.sizes.iter().map(|&s| vec![0; s as usize]).collect() };
        }
        Subst::identity(g)
    }

    fn compose(&self, sigma: &Subst, delta: &Subst) -> Subst {
        sigma.compose(delta)
    }

    fn ty_subst(&self, a: &TyFam, sigma: &Subst) -> TyFam {
        a.subst(&self.cat, sigma)
    }

    fn el_subst(&self, t: &Elem, sigma: &Subst) -> Elem {
        t.subst(sigma)
    }

    fn bang(&self, g: &Presheaf) -> Subst {
        Subst::bang(g)
    }

    fn ext(&self, g: &Presheaf, a: &TyFam) -> Presheaf {
        a.ext(&self.cat, g)
    }

    fn p(&self, _g: &Presheaf, a: &TyFam) -> Subst {
        a.proj()
    }

    fn q(&self, _g: &Presheaf, a: &TyFam) -> Elem {
        a.generic()
    }

    fn pair(&self, sigma: &Subst, a: &TyFam, u: &Elem) -> Subst {
        sigma.pair(a, u)
    }

    fn decidable(&self, sort: crate::cwf::Sort) -> bool {
        !(self.planted == Some(Planted::OpaqueElements) && sort == crate::cwf::Sort::El)
    }
}

impl Enumerate for PshModel {
    fn contexts(&self) -> Vec<Presheaf> {
        self.roster.iter().map(|(g, _)| g.clone()).collect()
    }

    fn types(&self, g: &Presheaf) -> Vec<TyFam> {
        match self.roster.iter().find(|(h, _)| h == g) {
            Some((_, tys)) => tys.clone(),
            None => vec![TyFam::constant(&self.cat, g, 1), TyFam::constant(&self.cat, g, 2)],
        }
    }

    fn substs(&self, dom: &Presheaf, cod: &Presheaf, budget: &mut Budget) -> Result<Vec<Subst>> {
        substs(&self.cat, dom, cod, budget)
    }

    fn elems(&self, g: &Presheaf, a: &TyFam, budget: &mut Budget) -> Result<Vec<Elem>> {
        elems(&self.cat, g, a, budget)
    }
}

/// A functor on presheaves over one category into presheaves over another.
pub trait PshFunctor {
    fn source_cat(&self) -> &Cat;
    fn target_cat(&self) -> &Cat;
    fn obj(&self, g: &Presheaf) -> Result<Presheaf>;
    fn map(&self, dom: &Presheaf, cod: &Presheaf, s: &Subst) -> Result<Subst>;
}

impl<F: PshFunctor + ?Sized> PshFunctor for &F {
    fn source_cat(&self) -> &Cat {
        (**self).source_cat()
    }
    fn target_cat(&self) -> &Cat {
        (**self).target_cat()
    }
    fn obj(&self, g: &Presheaf) -> Result<Presheaf> {
        (**self).obj(g)
    }
    fn map(&self, dom: &Presheaf, cod: &Presheaf, s: &Subst) -> Result<Subst> {
        (**self).map(dom, cod, s)
    }
}

/// The pseudomorphism induced by a functor on presheaves: types act through display maps,
/// `F(A)` being the fibers of `F(p) : F(Γ.A) -> F(Γ)`, so `↓` is the canonical map from
/// pairs to fiber members.
pub struct DisplayLift<'a, F> {
    pub src: &'a PshModel,
    pub tgt: &'a PshModel,
    pub functor: F,
    cache: RefCell<HashMap<(Presheaf, TyFam), Arc<Fibers>>>,
}

impl<'a, F: PshFunctor> DisplayLift<'a, F> {
    pub fn new(src: &'a PshModel, tgt: &'a PshModel, functor: F) -> Self {
        DisplayLift { src, tgt, functor, cache: RefCell::new(HashMap::new()) }
    }

    pub fn fibers(&self, g: &Presheaf, a: &TyFam) -> Result<Arc<Fibers>> {
        let key = (g.clone(), a.clone());
        if let Some(f) = self.cache.borrow().get(&key) {
            return Ok(f.clone());
        }
        let ga = a.ext(self.functor.source_cat(), g);
        let fg = self.functor.obj(g)?;
        let fga = self.functor.obj(&ga)?;
        let fp = self.functor.map(&ga, g, &a.proj())?;
        let fib = Arc::new(fibers(self.functor.target_cat(), &fga, &fg, &fp));
        self.cache.borrow_mut().insert(key, fib.clone());
        Ok(fib)
    }
}

impl<F: PshFunctor> Pseudomorphism for DisplayLift<'_, F> {
    type Src = PshModel;
    type Tgt = PshModel;

    fn source(&self) -> &PshModel {
        self.src
    }

    fn target(&self) -> &PshModel {
        self.tgt
    }

    fn cont(&self, g: &Presheaf) -> Result<Presheaf> {
        self.functor.obj(g)
    }

    fn subs(&self, dom: &Presheaf, cod: &Presheaf, s: &Subst) -> Result<Subst> {
        self.functor.map(dom, cod, s)
    }

    fn ty(&self, g: &Presheaf, a: &TyFam) -> Result<TyFam> {
        Ok(self.fibers(g, a)?.ty.clone())
    }

    fn el(&self, g: &Presheaf, a: &TyFam, t: &Elem) -> Result<Elem> {
        let fib = self.fibers(g, a)?;
        let ga = a.ext(self.functor.source_cat(), g);
        let sect = Subst::identity(g).pair(a, t);
        Ok(fib.section(&self.functor.map(g, &ga, &sect)?))
    }

    fn down(&self, g: &Presheaf, a: &TyFam) -> Result<Subst> {
        Ok(self.fibers(g, a)?.down())
    }

    fn down_empty(&self) -> Result<Subst> {
        let one = self.functor.obj(&Presheaf::terminal(self.functor.source_cat()))?;
        if one.sizes.iter().any(|&s| s != 1) {
            return Err(Error::InvalidStructure("functor does not preserve the terminal presheaf".into()));
        }
        Ok(Subst::identity(&one))
    }
}

/// The identity functor, for exercising [`DisplayLift`].
pub struct IdentityFunctor(pub Arc<Cat>);

impl PshFunctor for IdentityFunctor {
    fn source_cat(&self) -> &Cat {
        &self.0
    }
    fn target_cat(&self) -> &Cat {
        &self.0
    }
    fn obj(&self, g: &Presheaf) -> Result<Presheaf> {
        Ok(g.clone())
    }
    fn map(&self, _: &Presheaf, _: &Presheaf, s: &Subst) -> Result<Subst> {
        Ok(s.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cwf::{check_cwf_laws, check_pseudomorphism, IdentityMorphism};
    use crate::error::Error;

    /// Finite sets, built directly: a context is a cardinality, a type a list of fiber
    /// cardinalities, substitutions and elements are plain functions.
    struct Sets;

    impl Model for Sets {
        type Cont = usize;
        type Subs = Vec<usize>;
        type Ty = Vec<usize>;
        type El = Vec<usize>;
        fn name(&self) -> String {
            "sets".into()
        }
        fn empty(&self) -> usize {
            1
        }
        fn id(&self, g: &usize) -> Vec<usize> {
            (0..*g).collect()
        }
        fn compose(&self, s: &Vec<usize>, d: &Vec<usize>) -> Vec<usize> {
            d.iter().map(|&i| s[i]).collect()
        }
        fn ty_subst(&self, a: &Vec<usize>, s: &Vec<usize>) -> Vec<usize> {
            s.iter().map(|&i| a[i]).collect()
        }
        fn el_subst(&self, t: &Vec<usize>, s: &Vec<usize>) -> Vec<usize> {
            s.iter().map(|&i| t[i]).collect()
        }
        fn bang(&self, g: &usize) -> Vec<usize> {
            vec![0; *g]
        }
        fn ext(&self, _: &usize, a: &Vec<usize>) -> usize {
            a.iter().sum()
        }
        fn p(&self, _: &usize, a: &Vec<usize>) -> Vec<usize> {
            a.iter().enumerate().flat_map(|(i, &n)| std::iter::repeat(i).take(n)).collect()
        }
        fn q(&self, _: &usize, a: &Vec<usize>) -> Vec<usize> {
            a.iter().flat_map(|&n| 0..n).collect()
        }
        fn pair(&self, s: &Vec<usize>, a: &Vec<usize>, u: &Vec<usize>) -> Vec<usize> {
            s.iter().zip(u).map(|(&i, &v)| a[..i].iter().sum::<usize>() + v).collect()
        }
    }

    #[test]
    fn terminal_category_is_the_sets_model() {
        let cat = Arc::new(Cat::terminal());
        let m = PshModel::with_default_roster(cat.clone(), "terminal").unwrap();
        let s = Sets;
        let mut budget = Budget::unlimited();
        for g in m.contexts() {
            let n = g.sizes[0] as usize;
            for a in m.types(&g) {
                let fib: Vec<usize> = a.sizes[0].iter().map(|&v| v as usize).collect();
                assert_eq!(m.ext(&g, &a).sizes[0] as usize, s.ext(&n, &fib));
                assert_eq!(m.p(&g, &a).maps[0].iter().map(|&v| v as usize).collect::<Vec<_>>(), s.p(&n, &fib));
                assert_eq!(m.q(&g, &a).vals[0].iter().map(|&v| v as usize).collect::<Vec<_>>(), s.q(&n, &fib));
                let els = m.elems(&g, &a, &mut budget).unwrap();
                assert_eq!(els.len(), fib.iter().product::<usize>());
                for sub in m.substs(&g, &g, &mut budget).unwrap() {
                    let sv: Vec<usize> = sub.maps[0].iter().map(|&v| v as usize).collect();
                    for u in m.elems(&g, &m.ty_subst(&a, &sub), &mut budget).unwrap() {
                        let uv: Vec<usize> = u.vals[0].iter().map(|&v| v as usize).collect();
                        let got: Vec<usize> = m.pair(&sub, &a, &u).maps[0].iter().map(|&v| v as usize).collect();
                        assert_eq!(got, s.pair(&sv, &fib, &uv));
                    }
                }
            }
        }
    }

    #[test]
    fn laws_hold_on_small_categories() {
        for (name, cat) in [("terminal", Cat::terminal()), ("walking-arrow", Cat::walking_arrow())] {
            let m = PshModel::with_default_roster(Arc::new(cat), name).unwrap();
            let rep = check_cwf_laws(&m, &mut Budget::unlimited()).unwrap();
            assert!(rep.pass(), "{name}: {:?}", &rep.failures[..rep.failures.len().min(3)]);
            assert!(rep.checked > 100);
        }
    }

    #[test]
    fn constant_identity_canary_names_neutrality() {
        let m = PshModel::with_default_roster(Arc::new(Cat::terminal()), "terminal").unwrap().planted(Planted::ConstantId);
        let rep = check_cwf_laws(&m, &mut Budget::unlimited()).unwrap();
        assert!(!rep.pass());
        assert!(rep.failures.iter().any(|f| f.equation == "id-left" || f.equation == "id-right"));
    }

    #[test]
    fn opaque_equality_is_an_error() {
        let m = PshModel::with_default_roster(Arc::new(Cat::terminal()), "terminal").unwrap().planted(Planted::OpaqueElements);
        assert!(matches!(check_cwf_laws(&m, &mut Budget::unlimited()), Err(Error::NonDecidableEquality(_))));
    }

    #[test]
    fn empty_category_model_is_vacuous() {
        let m = PshModel::with_default_roster(Arc::new(Cat::discrete(0)), "empty").unwrap();
        let rep = check_cwf_laws(&m, &mut Budget::unlimited()).unwrap();
        assert!(rep.pass());
        // every context is the terminal one
        assert!(m.contexts().iter().all(|g| g.sizes.is_empty()));
    }

    #[test]
    fn identity_pseudomorphisms_pass() {
        let cat = Arc::new(Cat::walking_arrow());
        let m = PshModel::with_default_roster(cat.clone(), "walking-arrow").unwrap();
        assert!(check_pseudomorphism(&IdentityMorphism(&m), &mut Budget::unlimited()).unwrap().pass());
        let lift = DisplayLift::new(&m, &m, IdentityFunctor(cat));
        let rep = check_pseudomorphism(&lift, &mut Budget::unlimited()).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures);
    }
}
