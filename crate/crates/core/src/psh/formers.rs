//! Dependent products, exponentials, and presheaves pulled back from the cube category.

use std::collections::HashMap;
use std::hash::Hash;

use super::search::NatProblem;
use super::{Carrier, Elem, ExtCode, Presheaf, TyFam};
use crate::cat::{Cat, CubeMap, IntervalElement, Mor, Obj, Site};
use crate::error::{Error, Result};
use crate::report::Budget;

/// The carrier of `Π_A B` at one `(X, ρ)`: natural families indexed by `(f : Y -> X, u)`
/// with `u ∈ A(Y, ρf)`.
#[derive(Clone, Debug)]
pub struct PiFiber {
    pub domain: Vec<(Mor, u32)>,
    pub dom_index: HashMap<(Mor, u32), usize>,
    pub members: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
}

impl PiFiber {
    /// Index of a natural family among the members.
    pub fn position(&self, fam: &[u32]) -> Option<u32> {
        self.index.get(fam).copied()
    }
}

#[derive(Clone, Debug)]
pub struct PiType {
    pub ty: TyFam,
    pub fibers: Vec<Vec<PiFiber>>,
    code: ExtCode,
}

pub fn pi_type(cat: &Cat, gamma: &Presheaf, a: &TyFam, b: &TyFam, budget: &mut Budget) -> Result<PiType> {
    let code = ExtCode::new(a);
    let mut fibers = Vec::with_capacity(cat.object_count());
    for x in cat.objects() {
        let mut row = Vec::with_capacity(gamma.sizes[x] as usize);
        for rho in 0..gamma.sizes[x] {
            let mut domain = Vec::new();
            let mut sizes = Vec::new();
            for &f in cat.incoming(x) {
                let y = cat.src(f);
                let rf = gamma.act(f, rho);
                for u in 0..a.fiber(y, rf) {
                    domain.push((f, u));
                    sizes.push(b.sizes[y][code.enc(y, rf, u) as usize]);
                }
            }
            let dom_index: HashMap<(Mor, u32), usize> = domain.iter().enumerate().map(|(i, &k)| (k, i)).collect();
            let mut prob = NatProblem::new(sizes);
            for (i, &(f, u)) in domain.iter().enumerate() {
                let y = cat.src(f);
                let rf = gamma.act(f, rho);
                let e = code.enc(y, rf, u);
                for &g in cat.incoming(y) {
                    if cat.is_id(g) {
                        continue;
                    }
                    let tab = prob.add_table(b.restr[g][e as usize].clone());
                    let j = dom_index[&(cat.compose(f, g), a.act(g, rf, u))];
                    prob.link(i, j, tab);
                }
            }
            let mut members = prob.all(budget)?;
            members.sort();
            let index = members.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
            row.push(PiFiber { domain, dom_index, members, index });
        }
        fibers.push(row);
    }
    let sizes = fibers.iter().map(|row| row.iter().map(|f| f.members.len() as u32).collect()).collect();
    let mut restr = Vec::with_capacity(cat.morphism_count());
    for h in cat.morphisms() {
        let (x1, x) = (cat.src(h), cat.dst(h));
        let mut per_rho = Vec::with_capacity(gamma.sizes[x] as usize);
        for rho in 0..gamma.sizes[x] {
            let src = &fibers[x][rho as usize];
            let dst = &fibers[x1][gamma.act(h, rho) as usize];
            let mut t = Vec::with_capacity(src.members.len());
            for s in &src.members {
                let fam: Vec<u32> = dst.domain.iter().map(|&(g, u)| s[src.dom_index[&(cat.compose(h, g), u)]]).collect();
                t.push(dst.index[&fam]);
            }
            per_rho.push(t);
        }
        restr.push(per_rho);
    }
    Ok(PiType { ty: TyFam { sizes, restr }, fibers, code })
}

impl PiType {
    /// `λb` for `b ∈ El(Γ.A, B)`.
    pub fn lam(&self, cat: &Cat, gamma: &Presheaf, b: &Elem) -> Result<Elem> {
        let mut vals = Vec::with_capacity(cat.object_count());
        for x in cat.objects() {
            let mut row = Vec::with_capacity(gamma.sizes[x] as usize);
            for rho in 0..gamma.sizes[x] {
                let fib = &self.fibers[x][rho as usize];
                let fam: Vec<u32> = fib
                    .domain
                    .iter()
                    .map(|&(f, u)| {
                        let y = cat.src(f);
                        b.vals[y][self.code.enc(y, gamma.act(f, rho), u) as usize]
                    })
                    .collect();
                row.push(*fib.index.get(&fam).ok_or_else(|| Error::NaturalityViolation("λ of a non-natural family".into()))?);
            }
            vals.push(row);
        }
        Ok(Elem { vals })
    }

    /// `app(t, a) ∈ El(Γ, B⟨id, a⟩)`.
    pub fn app(&self, cat: &Cat, t: &Elem, a: &Elem) -> Elem {
        Elem {
            vals: cat
                .objects()
                .map(|x| {
                    t.vals[x]
                        .iter()
                        .enumerate()
                        .map(|(rho, &k)| {
                            let fib = &self.fibers[x][rho];
                            fib.members[k as usize][fib.dom_index[&(cat.id(x), a.vals[x][rho])]]
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// The element of B over Γ.A with `(ρ, u) ↦ t(ρ)(id, u)`.
    pub fn uncurry(&self, cat: &Cat, t: &Elem) -> Elem {
        Elem {
            vals: cat
                .objects()
                .map(|x| {
                    let mut out = Vec::new();
                    for (rho, &k) in t.vals[x].iter().enumerate() {
                        let fib = &self.fibers[x][rho];
                        for (&(f, _), &v) in fib.domain.iter().zip(&fib.members[k as usize]) {
                            if f == cat.id(x) {
                                out.push(v);
                            }
                        }
                    }
                    out
                })
                .collect(),
        }
    }

    /// Count of all (not necessarily natural) families at `(X, ρ)`.
    pub fn raw_count(&self, b: &TyFam, cat: &Cat, gamma: &Presheaf, x: Obj, rho: u32) -> u128 {
        let fib = &self.fibers[x][rho as usize];
        fib.domain
            .iter()
            .map(|&(f, u)| {
                let y = cat.src(f);
                b.sizes[y][self.code.enc(y, gamma.act(f, rho), u) as usize] as u128
            })
            .product()
    }
}

/// Domain of `B^P` at X: pairs `(g : Y -> X, w ∈ P(Y))`.
#[derive(Clone, Debug)]
pub struct ExpDomain {
    pub dom: Vec<(Mor, u32)>,
    pub index: HashMap<(Mor, u32), usize>,
}

pub fn exp_domain(cat: &Cat, p: &Presheaf, x: Obj) -> ExpDomain {
    let mut dom = Vec::new();
    for &g in cat.incoming(x) {
        for w in 0..p.sizes[cat.src(g)] {
            dom.push((g, w));
        }
    }
    let index = dom.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    ExpDomain { dom, index }
}

/// Natural families on the domain with values in B.
pub fn exp_problem(cat: &Cat, p: &Presheaf, b: &Presheaf, d: &ExpDomain) -> NatProblem {
    let mut prob = NatProblem::new(d.dom.iter().map(|&(g, _)| b.sizes[cat.src(g)]).collect());
    let mut tables: HashMap<Mor, usize> = HashMap::new();
    for (i, &(g, w)) in d.dom.iter().enumerate() {
        for &h in cat.incoming(cat.src(g)) {
            if cat.is_id(h) {
                continue;
            }
            let tab = *tables.entry(h).or_insert_with(|| prob.add_table(b.restr[h].clone()));
            prob.link(i, d.index[&(cat.compose(g, h), p.act(h, w))], tab);
        }
    }
    prob
}

/// `B^P`, with elements stored as families over [`ExpDomain`].
#[derive(Clone, Debug)]
pub struct Exponential {
    pub carrier: Carrier,
    pub domains: Vec<ExpDomain>,
}

/// Restriction of a family on the domain at X along `k : X' -> X`.
pub fn restrict_family(cat: &Cat, domains: &[ExpDomain], k: Mor, fam: &[u32]) -> Vec<u32> {
    let (x1, x) = (cat.src(k), cat.dst(k));
    domains[x1].dom.iter().map(|&(g, w)| fam[domains[x].index[&(cat.compose(k, g), w)]]).collect()
}

pub fn exponential(cat: &Cat, p: &Presheaf, b: &Presheaf, budget: &mut Budget) -> Result<Exponential> {
    let domains: Vec<ExpDomain> = cat.objects().map(|x| exp_domain(cat, p, x)).collect();
    let mut elems = Vec::with_capacity(cat.object_count());
    for x in cat.objects() {
        let mut sols = exp_problem(cat, p, b, &domains[x]).all(budget)?;
        sols.sort();
        elems.push(sols);
    }
    let carrier = Carrier::build(cat, elems, |k, fam| restrict_family(cat, &domains, k, fam))?;
    Ok(Exponential { carrier, domains })
}

impl Exponential {
    /// `ev(s, w) = s(id, w)`.
    pub fn eval(&self, cat: &Cat, x: Obj, s: u32, w: u32) -> u32 {
        self.carrier.elems[x][s as usize][self.domains[x].index[&(cat.id(x), w)]]
    }
}

/// A presheaf on the site pulled back from a presheaf on the cube category, given by its
/// elements at each stage and the action of cube maps.
pub fn cube_presheaf<T: Clone + Eq + Hash>(
    site: &Site,
    stage_elems: &[Vec<T>],
    act: impl Fn(&T, &CubeMap) -> Result<T>,
) -> Result<Presheaf> {
    let cat = &site.cat;
    let index: Vec<HashMap<T, u32>> =
        stage_elems.iter().map(|es| es.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect()).collect();
    let sizes = cat.objects().map(|c| stage_elems[site.stage(c)].len() as u32).collect();
    let mut restr = Vec::with_capacity(cat.morphism_count());
    for m in cat.morphisms() {
        let f = site.cube().map(site.cube_part(m));
        let mut t = Vec::new();
        for e in &stage_elems[f.dst] {
            let r = act(e, f)?;
            t.push(*index[f.src].get(&r).ok_or_else(|| Error::Validation("cube action leaves the carrier".into()))?);
        }
        restr.push(t);
    }
    Ok(Presheaf { sizes, restr })
}

/// The interval `I`, with `I(k, x)` the arity-k lattice elements.
pub fn interval(site: &Site) -> Result<Presheaf> {
    let stages = (0..=site.dim()).map(IntervalElement::enumerate).collect::<Result<Vec<_>>>()?;
    cube_presheaf(site, &stages, |r, f| r.subst(&f.comps, f.src))
}

/// Index of the constant `e` in the interval's carrier at stage k.
pub fn interval_const(k: usize, e: bool) -> Result<u32> {
    let all = IntervalElement::enumerate(k)?;
    let c = if e { IntervalElement::one(k) } else { IntervalElement::zero(k) };
    Ok(all.iter().position(|r| *r == c).unwrap() as u32)
}

/// The path object `B^I`.
pub fn paths(site: &Site, b: &Presheaf, budget: &mut Budget) -> Result<Exponential> {
    exponential(&site.cat, &interval(site)?, b, budget)
}
