//! The presheaf model of extensional type theory over a materialized category.
//!
//! Carriers are finite sets `0..n` at each object. A presheaf stores, for every morphism
//! `f : Y -> X`, the restriction table `Γ(X) -> Γ(Y)`; a type over Γ stores a fiber size per
//! `(X, ρ)` and tables `A(X, ρ) -> A(Y, ρf)`. Context extension encodes `(ρ, u)` in
//! lexicographic order.

pub mod adjoint;
pub mod formers;
pub mod model;
pub mod parse;
pub mod search;

use std::collections::HashMap;

use crate::cat::{Cat, Mor, Obj};
use crate::error::{Error, Result};
use crate::report::Budget;
use search::{NatProblem, IDENTITY};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Presheaf {
    pub sizes: Vec<u32>,
    /// `restr[f][ρ]` for `f : Y -> X` and `ρ ∈ Γ(X)`.
    pub restr: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TyFam {
    pub sizes: Vec<Vec<u32>>,
    pub restr: Vec<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Elem {
    pub vals: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subst {
    pub maps: Vec<Vec<u32>>,
}

fn invalid(msg: String) -> Error {
    Error::Validation(msg)
}

impl Presheaf {
    pub fn new(cat: &Cat, sizes: Vec<u32>, restr: Vec<Vec<u32>>) -> Result<Presheaf> {
        let p = Presheaf { sizes, restr };
        p.validate(cat)?;
        Ok(p)
    }

    pub fn size(&self, x: Obj) -> u32 {
        self.sizes[x]
    }

    pub fn act(&self, f: Mor, rho: u32) -> u32 {
        self.restr[f][rho as usize]
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().map(|&s| s as usize).sum()
    }

    pub fn validate(&self, cat: &Cat) -> Result<()> {
        if self.sizes.len() != cat.object_count() || self.restr.len() != cat.morphism_count() {
            return Err(invalid("presheaf shape does not match the category".into()));
        }
        for f in cat.morphisms() {
            let (y, x) = (cat.src(f), cat.dst(f));
            if self.restr[f].len() != self.sizes[x] as usize {
                return Err(invalid(format!("restriction along {} has the wrong length", cat.morphism_name(f))));
            }
            if self.restr[f].iter().any(|&v| v >= self.sizes[y]) {
                return Err(invalid(format!("restriction along {} leaves the carrier", cat.morphism_name(f))));
            }
            if cat.is_id(f) && self.restr[f].iter().enumerate().any(|(r, &v)| v as usize != r) {
                return Err(invalid(format!("ρ id = ρ fails at {}", cat.object_name(x))));
            }
            for &g in cat.incoming(y) {
                let fg = cat.compose(f, g);
                for rho in 0..self.sizes[x] {
                    if self.act(g, self.act(f, rho)) != self.act(fg, rho) {
                        return Err(invalid(format!(
                            "(ρf)g = ρ(fg) fails for f = {}, g = {}, ρ = {rho}",
                            cat.morphism_name(f),
                            cat.morphism_name(g)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn empty(cat: &Cat) -> Presheaf {
        Presheaf::constant(cat, 0)
    }

    pub fn terminal(cat: &Cat) -> Presheaf {
        Presheaf::constant(cat, 1)
    }

    /// Identity restrictions everywhere.
    pub fn constant(cat: &Cat, n: u32) -> Presheaf {
        Presheaf {
            sizes: vec![n; cat.object_count()],
            restr: cat.morphisms().map(|_| (0..n).collect()).collect(),
        }
    }

    /// `yx(Y) = Hom(Y, x)` in the order of [`Cat::homs`].
    pub fn yoneda(cat: &Cat, x: Obj) -> Presheaf {
        let sizes = cat.objects().map(|y| cat.homs(y, x).len() as u32).collect();
        let restr = cat
            .morphisms()
            .map(|g| {
                let (z, y) = (cat.src(g), cat.dst(g));
                let target = cat.homs(z, x);
                cat.homs(y, x)
                    .iter()
                    .map(|&h| target.iter().position(|&k| k == cat.compose(h, g)).unwrap() as u32)
                    .collect()
            })
            .collect();
        Presheaf { sizes, restr }
    }

    /// Pairs encoded as `i * |B(X)| + j`.
    pub fn product(cat: &Cat, a: &Presheaf, b: &Presheaf) -> Presheaf {
        let sizes = cat.objects().map(|x| a.sizes[x] * b.sizes[x]).collect();
        let restr = cat
            .morphisms()
            .map(|f| {
                let (y, x) = (cat.src(f), cat.dst(f));
                let mut t = Vec::with_capacity((a.sizes[x] * b.sizes[x]) as usize);
                for i in 0..a.sizes[x] {
                    for j in 0..b.sizes[x] {
                        t.push(a.act(f, i) * b.sizes[y] + b.act(f, j));
                    }
                }
                t
            })
            .collect();
        Presheaf { sizes, restr }
    }
}

/// Flat indexing of `(X, i)` for `i < sizes[X]`.
#[derive(Clone, Debug)]
pub struct Layout {
    pub offsets: Vec<usize>,
}

impl Layout {
    pub fn new(sizes: impl IntoIterator<Item = usize>) -> Layout {
        let mut offsets = vec![0];
        for s in sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        Layout { offsets }
    }

    pub fn at(&self, x: usize, i: usize) -> usize {
        self.offsets[x] + i
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slice<'a, T>(&self, flat: &'a [T], x: usize) -> &'a [T] {
        &flat[self.offsets[x]..self.offsets[x + 1]]
    }
}

/// Offsets of `(ρ, u)` pairs in `Γ.A`.
#[derive(Clone, Debug)]
pub struct ExtCode {
    offsets: Vec<Vec<u32>>,
}

impl ExtCode {
    pub fn new(a: &TyFam) -> ExtCode {
        let offsets = a
            .sizes
            .iter()
            .map(|row| {
                let mut o = Vec::with_capacity(row.len() + 1);
                o.push(0);
                for &s in row {
                    o.push(o.last().unwrap() + s);
                }
                o
            })
            .collect();
        ExtCode { offsets }
    }

    pub fn enc(&self, x: Obj, rho: u32, u: u32) -> u32 {
        self.offsets[x][rho as usize] + u
    }

    pub fn dec(&self, x: Obj, code: u32) -> (u32, u32) {
        let o = &self.offsets[x];
        let rho = o.partition_point(|&v| v <= code) - 1;
        (rho as u32, code - o[rho])
    }

    pub fn size(&self, x: Obj) -> u32 {
        *self.offsets[x].last().unwrap()
    }
}

impl TyFam {
    pub fn validate(&self, cat: &Cat, gamma: &Presheaf) -> Result<()> {
        if self.sizes.len() != cat.object_count() || self.restr.len() != cat.morphism_count() {
            return Err(invalid("type shape does not match the category".into()));
        }
        for x in cat.objects() {
            if self.sizes[x].len() != gamma.sizes[x] as usize {
                return Err(invalid(format!("type has the wrong number of fibers at {}", cat.object_name(x))));
            }
        }
        for f in cat.morphisms() {
            let (y, x) = (cat.src(f), cat.dst(f));
            if self.restr[f].len() != gamma.sizes[x] as usize {
                return Err(invalid(format!("type restriction along {} has the wrong length", cat.morphism_name(f))));
            }
            for rho in 0..gamma.sizes[x] {
                let rf = gamma.act(f, rho);
                let t = &self.restr[f][rho as usize];
                if t.len() != self.sizes[x][rho as usize] as usize || t.iter().any(|&v| v >= self.sizes[y][rf as usize]) {
                    return Err(invalid(format!("type restriction along {} at ρ = {rho} is malformed", cat.morphism_name(f))));
                }
                if cat.is_id(f) && t.iter().enumerate().any(|(u, &v)| v as usize != u) {
                    return Err(invalid(format!("u id = u fails at {}", cat.object_name(x))));
                }
                for &g in cat.incoming(y) {
                    let fg = cat.compose(f, g);
                    for u in 0..t.len() {
                        if self.restr[g][rf as usize][t[u] as usize] != self.restr[fg][rho as usize][u] {
                            return Err(invalid(format!(
                                "(uf)g = u(fg) fails for f = {}, g = {}",
                                cat.morphism_name(f),
                                cat.morphism_name(g)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn act(&self, f: Mor, rho: u32, u: u32) -> u32 {
        self.restr[f][rho as usize][u as usize]
    }

    pub fn fiber(&self, x: Obj, rho: u32) -> u32 {
        self.sizes[x][rho as usize]
    }

    pub fn constant(cat: &Cat, gamma: &Presheaf, n: u32) -> TyFam {
        TyFam::weaken(cat, gamma, &Presheaf::constant(cat, n))
    }

    /// The type `P` weakened to Γ.
    pub fn weaken(cat: &Cat, gamma: &Presheaf, p: &Presheaf) -> TyFam {
        TyFam {
            sizes: cat.objects().map(|x| vec![p.sizes[x]; gamma.sizes[x] as usize]).collect(),
            restr: cat.morphisms().map(|f| vec![p.restr[f].clone(); gamma.sizes[cat.dst(f)] as usize]).collect(),
        }
    }

    /// `Aσ` for `σ : Δ -> Γ`.
    pub fn subst(&self, cat: &Cat, sigma: &Subst) -> TyFam {
        TyFam {
            sizes: cat.objects().map(|x| sigma.maps[x].iter().map(|&r| self.sizes[x][r as usize]).collect()).collect(),
            restr: cat
                .morphisms()
                .map(|f| sigma.maps[cat.dst(f)].iter().map(|&r| self.restr[f][r as usize].clone()).collect())
                .collect(),
        }
    }

    /// Context extension `Γ.A`.
    pub fn ext(&self, cat: &Cat, gamma: &Presheaf) -> Presheaf {
        let code = ExtCode::new(self);
        let sizes = cat.objects().map(|x| code.size(x)).collect();
        let restr = cat
            .morphisms()
            .map(|f| {
                let (y, x) = (cat.src(f), cat.dst(f));
                let mut t = Vec::with_capacity(code.size(x) as usize);
                for rho in 0..gamma.sizes[x] {
                    let rf = gamma.act(f, rho);
                    for u in 0..self.sizes[x][rho as usize] {
                        t.push(code.enc(y, rf, self.act(f, rho, u)));
                    }
                }
                t
            })
            .collect();
        Presheaf { sizes, restr }
    }

    /// `p : Γ.A -> Γ`.
    pub fn proj(&self) -> Subst {
        Subst {
            maps: self
                .sizes
                .iter()
                .map(|row| row.iter().enumerate().flat_map(|(r, &s)| std::iter::repeat(r as u32).take(s as usize)).collect())
                .collect(),
        }
    }

    /// `q ∈ El(Γ.A, Ap)`.
    pub fn generic(&self) -> Elem {
        Elem { vals: self.sizes.iter().map(|row| row.iter().flat_map(|&s| 0..s).collect()).collect() }
    }

    /// `Σ_A B` for B over Γ.A, pairs `(u, b)` in lexicographic order.
    pub fn sigma(&self, cat: &Cat, gamma: &Presheaf, b: &TyFam) -> TyFam {
        let code = ExtCode::new(self);
        let sizes = cat
            .objects()
            .map(|x| {
                (0..gamma.sizes[x])
                    .map(|rho| (0..self.sizes[x][rho as usize]).map(|u| b.sizes[x][code.enc(x, rho, u) as usize]).sum())
                    .collect()
            })
            .collect();
        let restr = cat
            .morphisms()
            .map(|f| {
                let (y, x) = (cat.src(f), cat.dst(f));
                (0..gamma.sizes[x])
                    .map(|rho| {
                        let rf = gamma.act(f, rho);
                        let mut t = Vec::new();
                        for u in 0..self.sizes[x][rho as usize] {
                            let uf = self.act(f, rho, u);
                            let base: u32 = (0..uf).map(|v| b.sizes[y][code.enc(y, rf, v) as usize]).sum();
                            let e = code.enc(x, rho, u);
                            for v in 0..b.sizes[x][e as usize] {
                                t.push(base + b.act(f, e, v));
                            }
                        }
                        t
                    })
                    .collect()
            })
            .collect();
        TyFam { sizes, restr }
    }

    /// Extensional identity type over `Γ.A.Ap`: a singleton where the two points agree.
    pub fn identity_type(&self, cat: &Cat, gamma: &Presheaf) -> (Presheaf, TyFam) {
        let ga = self.ext(cat, gamma);
        let ap = self.subst(cat, &self.proj());
        let gaa = ap.ext(cat, &ga);
        let outer = ExtCode::new(&ap);
        let inner = ExtCode::new(self);
        let diag = |x: Obj, code: u32| {
            let (r, v) = outer.dec(x, code);
            let (_, u) = inner.dec(x, r);
            u == v
        };
        let sizes = cat.objects().map(|x| (0..gaa.sizes[x]).map(|c| diag(x, c) as u32).collect()).collect();
        let restr = cat
            .morphisms()
            .map(|f| (0..gaa.sizes[cat.dst(f)]).map(|c| if diag(cat.dst(f), c) { vec![0] } else { vec![] }).collect())
            .collect();
        (gaa, TyFam { sizes, restr })
    }

    /// `Id_A(a, b)` over Γ.
    pub fn id_of(&self, cat: &Cat, a: &Elem, b: &Elem) -> TyFam {
        let sizes: Vec<Vec<u32>> = cat
            .objects()
            .map(|x| a.vals[x].iter().zip(&b.vals[x]).map(|(u, v)| (u == v) as u32).collect())
            .collect();
        let restr = cat
            .morphisms()
            .map(|f| sizes[cat.dst(f)].iter().map(|&s| (0..s).collect()).collect())
            .collect();
        TyFam { sizes, restr }
    }
}

impl Elem {
    pub fn validate(&self, cat: &Cat, gamma: &Presheaf, a: &TyFam) -> Result<()> {
        if self.vals.len() != cat.object_count() {
            return Err(invalid("element shape does not match the category".into()));
        }
        for x in cat.objects() {
            if self.vals[x].len() != gamma.sizes[x] as usize {
                return Err(invalid(format!("element has the wrong length at {}", cat.object_name(x))));
            }
            for (rho, &u) in self.vals[x].iter().enumerate() {
                if u >= a.sizes[x][rho] {
                    return Err(invalid(format!("element leaves its fiber at {}", cat.object_name(x))));
                }
            }
        }
        for f in cat.morphisms() {
            let (y, x) = (cat.src(f), cat.dst(f));
            for rho in 0..gamma.sizes[x] {
                let u = self.vals[x][rho as usize];
                if a.act(f, rho, u) != self.vals[y][gamma.act(f, rho) as usize] {
                    return Err(Error::NaturalityViolation(format!(
                        "t(X,ρ)f = t(Y,ρf) fails along {} at ρ = {rho}",
                        cat.morphism_name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn subst(&self, sigma: &Subst) -> Elem {
        Elem { vals: sigma.maps.iter().zip(&self.vals).map(|(m, t)| m.iter().map(|&r| t[r as usize]).collect()).collect() }
    }
}

impl Subst {
    pub fn validate(&self, cat: &Cat, dom: &Presheaf, cod: &Presheaf) -> Result<()> {
        if self.maps.len() != cat.object_count() {
            return Err(invalid("substitution shape does not match the category".into()));
        }
        for x in cat.objects() {
            if self.maps[x].len() != dom.sizes[x] as usize || self.maps[x].iter().any(|&v| v >= cod.sizes[x]) {
                return Err(invalid(format!("substitution component at {} is malformed", cat.object_name(x))));
            }
        }
        for f in cat.morphisms() {
            let (y, x) = (cat.src(f), cat.dst(f));
            for d in 0..dom.sizes[x] {
                if cod.act(f, self.maps[x][d as usize]) != self.maps[y][dom.act(f, d) as usize] {
                    return Err(Error::NaturalityViolation(format!(
                        "σ(δf) = (σδ)f fails along {} at δ = {d}",
                        cat.morphism_name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(gamma: &Presheaf) -> Subst {
        Subst { maps: gamma.sizes.iter().map(|&s| (0..s).collect()).collect() }
    }

    /// `self ∘ delta`.
    pub fn compose(&self, delta: &Subst) -> Subst {
        Subst { maps: delta.maps.iter().zip(&self.maps).map(|(d, s)| d.iter().map(|&v| s[v as usize]).collect()).collect() }
    }

    /// `⟨σ, u⟩ : Δ -> Γ.A` for `u ∈ El(Δ, Aσ)`.
    pub fn pair(&self, a: &TyFam, u: &Elem) -> Subst {
        let code = ExtCode::new(a);
        Subst {
            maps: self
                .maps
                .iter()
                .enumerate()
                .map(|(x, m)| m.iter().zip(&u.vals[x]).map(|(&r, &v)| code.enc(x, r, v)).collect())
                .collect(),
        }
    }

    /// `⟨⟩ : Γ -> 1`.
    pub fn bang(gamma: &Presheaf) -> Subst {
        Subst { maps: gamma.sizes.iter().map(|&s| vec![0; s as usize]).collect() }
    }

    pub fn is_bijective(&self, dom: &Presheaf, cod: &Presheaf) -> bool {
        self.maps.iter().enumerate().all(|(x, m)| {
            if dom.sizes[x] != cod.sizes[x] {
                return false;
            }
            let mut seen = vec![false; cod.sizes[x] as usize];
            m.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true))
        })
    }

    pub fn is_surjective(&self, cod: &Presheaf) -> bool {
        self.maps.iter().enumerate().all(|(x, m)| {
            let mut seen = vec![false; cod.sizes[x] as usize];
            for &v in m {
                seen[v as usize] = true;
            }
            seen.into_iter().all(|b| b)
        })
    }

    /// Inverse of a stage-wise bijection.
    pub fn inverse(&self, cod: &Presheaf) -> Subst {
        Subst {
            maps: self
                .maps
                .iter()
                .enumerate()
                .map(|(x, m)| {
                    let mut inv = vec![0; cod.sizes[x] as usize];
                    for (i, &v) in m.iter().enumerate() {
                        inv[v as usize] = i as u32;
                    }
                    inv
                })
                .collect(),
        }
    }
}

/// All natural transformations `Δ -> Γ`.
pub fn substs(cat: &Cat, dom: &Presheaf, cod: &Presheaf, budget: &mut Budget) -> Result<Vec<Subst>> {
    let layout = Layout::new(dom.sizes.iter().map(|&s| s as usize));
    let mut prob = NatProblem::new(cat.objects().flat_map(|x| std::iter::repeat(cod.sizes[x]).take(dom.sizes[x] as usize)).collect());
    for f in cat.morphisms() {
        let (y, x) = (cat.src(f), cat.dst(f));
        let tab = if cat.is_id(f) { IDENTITY } else { prob.add_table(cod.restr[f].clone()) };
        for d in 0..dom.sizes[x] {
            prob.link(layout.at(x, d as usize), layout.at(y, dom.act(f, d) as usize), tab);
        }
    }
    Ok(prob
        .all(budget)?
        .into_iter()
        .map(|v| Subst { maps: cat.objects().map(|x| layout.slice(&v, x).to_vec()).collect() })
        .collect())
}

fn elem_problem(cat: &Cat, gamma: &Presheaf, a: &TyFam) -> (NatProblem, Layout) {
    let layout = Layout::new(gamma.sizes.iter().map(|&s| s as usize));
    let mut prob = NatProblem::new(cat.objects().flat_map(|x| a.sizes[x].iter().copied()).collect());
    for f in cat.morphisms() {
        if cat.is_id(f) {
            continue;
        }
        let (y, x) = (cat.src(f), cat.dst(f));
        for rho in 0..gamma.sizes[x] {
            let tab = prob.add_table(a.restr[f][rho as usize].clone());
            prob.link(layout.at(x, rho as usize), layout.at(y, gamma.act(f, rho) as usize), tab);
        }
    }
    (prob, layout)
}

/// All elements of A over Γ.
pub fn elems(cat: &Cat, gamma: &Presheaf, a: &TyFam, budget: &mut Budget) -> Result<Vec<Elem>> {
    let (prob, layout) = elem_problem(cat, gamma, a);
    Ok(prob
        .all(budget)?
        .into_iter()
        .map(|v| Elem { vals: cat.objects().map(|x| layout.slice(&v, x).to_vec()).collect() })
        .collect())
}

pub fn first_elem(cat: &Cat, gamma: &Presheaf, a: &TyFam, budget: &mut Budget) -> Result<Option<Elem>> {
    let (prob, layout) = elem_problem(cat, gamma, a);
    Ok(prob.first(budget)?.map(|v| Elem { vals: cat.objects().map(|x| layout.slice(&v, x).to_vec()).collect() }))
}

/// A presheaf whose elements at each object are explicit families (vectors of values),
/// with restriction computed from the families.
#[derive(Clone, Debug)]
pub struct Carrier {
    pub psh: Presheaf,
    pub elems: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, u32>>,
}

impl Carrier {
    /// Builds the carrier from families per object and a restriction rule
    /// `(f, family at dst f) -> family at src f`.
    pub fn build(
        cat: &Cat,
        elems: Vec<Vec<Vec<u32>>>,
        mut restrict: impl FnMut(Mor, &[u32]) -> Vec<u32>,
    ) -> Result<Carrier> {
        let index: Vec<HashMap<Vec<u32>, u32>> = elems
            .iter()
            .map(|es| es.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect())
            .collect();
        let mut restr = Vec::with_capacity(cat.morphism_count());
        for f in cat.morphisms() {
            let (y, x) = (cat.src(f), cat.dst(f));
            let mut t = Vec::with_capacity(elems[x].len());
            for e in &elems[x] {
                let r = restrict(f, e);
                match index[y].get(&r) {
                    Some(&i) => t.push(i),
                    None => {
                        return Err(Error::NaturalityViolation(format!(
                            "restriction along {} leaves the carrier",
                            cat.morphism_name(f)
                        )))
                    }
                }
            }
            restr.push(t);
        }
        let sizes = elems.iter().map(|e| e.len() as u32).collect();
        Ok(Carrier { psh: Presheaf { sizes, restr }, elems, index })
    }

    pub fn lookup(&self, x: Obj, family: &[u32]) -> Option<u32> {
        self.index[x].get(family).copied()
    }
}

/// The fibers of a map `total -> base`, as a type over the base. `members[X][ρ]` lists the
/// total elements over ρ in increasing order; the j-th is the fiber element j.
#[derive(Clone, Debug)]
pub struct Fibers {
    pub ty: TyFam,
    pub members: Vec<Vec<Vec<u32>>>,
    /// `position[X][t] = j` where t is the j-th member of its fiber.
    pub position: Vec<Vec<u32>>,
}

pub fn fibers(cat: &Cat, total: &Presheaf, base: &Presheaf, map: &Subst) -> Fibers {
    let mut members = Vec::new();
    let mut position = Vec::new();
    for x in cat.objects() {
        let mut m = vec![Vec::new(); base.sizes[x] as usize];
        let mut pos = vec![0; total.sizes[x] as usize];
        for t in 0..total.sizes[x] {
            let r = map.maps[x][t as usize] as usize;
            pos[t as usize] = m[r].len() as u32;
            m[r].push(t);
        }
        members.push(m);
        position.push(pos);
    }
    let sizes = members.iter().map(|m| m.iter().map(|l| l.len() as u32).collect()).collect();
    let restr = cat
        .morphisms()
        .map(|f| {
            let (y, x) = (cat.src(f), cat.dst(f));
            members[x].iter().map(|l| l.iter().map(|&t| position[y][total.act(f, t) as usize]).collect()).collect()
        })
        .collect();
    Fibers { ty: TyFam { sizes, restr }, members, position }
}

impl Fibers {
    /// The canonical map `base.ty -> total`, `(ρ, j) ↦ members[ρ][j]`.
    pub fn down(&self) -> Subst {
        Subst { maps: self.members.iter().map(|m| m.iter().flatten().copied().collect()).collect() }
    }

    /// A section of the map, as an element of the fiber type.
    pub fn section(&self, s: &Subst) -> Elem {
        Elem { vals: s.maps.iter().enumerate().map(|(x, m)| m.iter().map(|&t| self.position[x][t as usize]).collect()).collect() }
    }
}
