//! The forgetful functor U : PSh(∫C) -> PSh(∫C0), its right adjoint R (the right Kan
//! extension along ∫C0 -> ∫C), and the endofunctor E = RU.
//!
//! An element of (RΓ0)(c) is a family `s_g ∈ Γ0(c')` indexed by the ∫C-morphisms
//! `g : c' -> c`, natural over ∫C0. Restriction along `k` reindexes `g ↦ k∘g`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use super::formers::pi_type;
use super::model::PshFunctor;
use super::search::NatProblem;
use super::{fibers, Carrier, Presheaf, Subst, TyFam};
use crate::cat::{Cat, Mor, Obj, Site};
use crate::cwf::Pointing;
use crate::error::{Error, Result};
use crate::psh::model::PshModel;
use crate::report::{Budget, Report};

pub struct Adjunction {
    pub site: Site,
    pub lvl: Site,
    /// ∫C0 -> ∫C on morphisms; objects are shared.
    pub incl: Vec<Mor>,
    pub limit: u64,
    cache: RefCell<HashMap<Presheaf, Arc<Carrier>>>,
}

impl Adjunction {
    pub fn new(site: Site, limit: u64) -> Result<Adjunction> {
        let (lvl, incl) = site.levelwise()?;
        Ok(Adjunction { site, lvl, incl, limit, cache: RefCell::new(HashMap::new()) })
    }

    pub fn big(&self) -> &Cat {
        &self.site.cat
    }

    pub fn small(&self) -> &Cat {
        &self.lvl.cat
    }

    pub fn u_psh(&self, g: &Presheaf) -> Presheaf {
        Presheaf { sizes: g.sizes.clone(), restr: self.incl.iter().map(|&m| g.restr[m].clone()).collect() }
    }

    pub fn u_ty(&self, a: &TyFam) -> TyFam {
        TyFam { sizes: a.sizes.clone(), restr: self.incl.iter().map(|&m| a.restr[m].clone()).collect() }
    }

    /// The families at c making up `(RΓ0)(c)`, as a search problem over `incoming(c)`.
    fn r_problem(&self, g0: &Presheaf, c: Obj) -> NatProblem {
        let (big, small) = (self.big(), self.small());
        let into = big.incoming(c);
        let pos: HashMap<Mor, usize> = into.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut prob = NatProblem::new(into.iter().map(|&g| g0.sizes[big.src(g)]).collect());
        let mut tables = HashMap::new();
        for (i, &g) in into.iter().enumerate() {
            for &h in small.incoming(big.src(g)) {
                if small.is_id(h) {
                    continue;
                }
                let tab = *tables.entry(h).or_insert_with(|| prob.add_table(g0.restr[h].clone()));
                prob.link(i, pos[&big.compose(g, self.incl[h])], tab);
            }
        }
        prob
    }

    /// `RΓ0` with its families.
    pub fn r_psh(&self, g0: &Presheaf) -> Result<Arc<Carrier>> {
        if let Some(c) = self.cache.borrow().get(g0) {
            return Ok(c.clone());
        }
        let big = self.big();
        let mut budget = Budget::new(self.limit);
        let mut elems = Vec::with_capacity(big.object_count());
        for c in big.objects() {
            let mut sols = self.r_problem(g0, c).all(&mut budget)?;
            sols.sort();
            elems.push(sols);
        }
        let pos: Vec<HashMap<Mor, usize>> =
            big.objects().map(|c| big.incoming(c).iter().enumerate().map(|(i, &g)| (g, i)).collect()).collect();
        let carrier = Arc::new(Carrier::build(big, elems, |k, s| {
            let c = big.dst(k);
            big.incoming(big.src(k)).iter().map(|&g| s[pos[c][&big.compose(k, g)]]).collect()
        })?);
        self.cache.borrow_mut().insert(g0.clone(), carrier.clone());
        Ok(carrier)
    }

    /// `Rσ0 : RΓ0 -> RΔ0` for `σ0 : Γ0 -> Δ0`.
    pub fn r_subst(&self, dom0: &Presheaf, cod0: &Presheaf, s0: &Subst) -> Result<Subst> {
        let (rd, rc) = (self.r_psh(dom0)?, self.r_psh(cod0)?);
        let big = self.big();
        let mut maps = Vec::with_capacity(big.object_count());
        for c in big.objects() {
            let into = big.incoming(c);
            let mut m = Vec::with_capacity(rd.elems[c].len());
            for s in &rd.elems[c] {
                let img: Vec<u32> = into.iter().zip(s).map(|(&g, &v)| s0.maps[big.src(g)][v as usize]).collect();
                m.push(rc.lookup(c, &img).ok_or_else(|| Error::NaturalityViolation("Rσ leaves the carrier".into()))?);
            }
            maps.push(m);
        }
        Ok(Subst { maps })
    }

    /// `RA0` over `RΓ0`, as the fibers of `R(p) : R(Γ0.A0) -> RΓ0`.
    pub fn r_ty(&self, g0: &Presheaf, a0: &TyFam) -> Result<TyFam> {
        let ga = a0.ext(self.small(), g0);
        let rp = self.r_subst(&ga, g0, &a0.proj())?;
        Ok(fibers(self.big(), &self.r_psh(&ga)?.psh, &self.r_psh(g0)?.psh, &rp).ty)
    }

    /// `η_Γ : Γ -> RUΓ`, `γ ↦ (γ·g)_g`.
    pub fn unit(&self, g: &Presheaf) -> Result<Subst> {
        let r = self.r_psh(&self.u_psh(g))?;
        let big = self.big();
        let mut maps = Vec::with_capacity(big.object_count());
        for c in big.objects() {
            let mut m = Vec::with_capacity(g.sizes[c] as usize);
            for rho in 0..g.sizes[c] {
                let fam: Vec<u32> = big.incoming(c).iter().map(|&k| g.act(k, rho)).collect();
                m.push(r.lookup(c, &fam).ok_or_else(|| Error::NaturalityViolation("η leaves RU".into()))?);
            }
            maps.push(m);
        }
        Ok(Subst { maps })
    }

    /// `ε_Γ0 : URΓ0 -> Γ0`, `(εs)_c = s_{id_c}`.
    pub fn counit(&self, g0: &Presheaf) -> Result<Subst> {
        let r = self.r_psh(g0)?;
        let big = self.big();
        let maps = big
            .objects()
            .map(|c| {
                let at = big.incoming(c).iter().position(|&g| g == big.id(c)).expect("identity is incoming");
                r.elems[c].iter().map(|s| s[at]).collect()
            })
            .collect();
        Ok(Subst { maps })
    }

    /// Both triangle identities, as equalities of maps:
    /// `εU ∘ Uη = id_{UΓ}` and `Rε ∘ ηR = id_{RΓ0}`.
    pub fn check_triangles(&self, g: &Presheaf, g0: &Presheaf) -> Result<Report> {
        let mut rep = Report::new(format!("triangles/{}", self.site.internal.name));
        let ug = self.u_psh(g);
        let left = self.counit(&ug)?.compose(&self.unit(g)?);
        rep.check("counit-U-unit", left == Subst::identity(&ug), || "εU·Uη".into());
        let r = self.r_psh(g0)?;
        let eta_r = self.unit(&r.psh)?;
        let ur = self.u_psh(&r.psh);
        let r_eps = self.r_subst(&ur, g0, &self.counit(g0)?)?;
        rep.check("R-counit-unit", r_eps.compose(&eta_r) == Subst::identity(&r.psh), || "Rε·ηR".into());
        for c in self.big().objects() {
            rep.fact(format!("R.size.{}", self.site.object_label(c)), r.psh.sizes[c]);
        }
        Ok(rep)
    }

    /// `⟨R⟩(UA) = (RUA)η` computed directly: at `(c, γ)` the families
    /// `a_g ∈ A(c', γ·g)` over `g : c' -> c`, natural over ∫C0.
    pub fn r_dep(&self, g: &Presheaf, a: &TyFam) -> Result<TyFam> {
        let (big, small) = (self.big(), self.small());
        let mut budget = Budget::new(self.limit);
        let mut members = Vec::with_capacity(big.object_count());
        for c in big.objects() {
            let into = big.incoming(c);
            let pos: HashMap<Mor, usize> = into.iter().enumerate().map(|(i, &k)| (k, i)).collect();
            let mut row = Vec::with_capacity(g.sizes[c] as usize);
            for rho in 0..g.sizes[c] {
                let mut prob = NatProblem::new(into.iter().map(|&k| a.fiber(big.src(k), g.act(k, rho))).collect());
                for (i, &k) in into.iter().enumerate() {
                    let rk = g.act(k, rho);
                    for &h in small.incoming(big.src(k)) {
                        if small.is_id(h) {
                            continue;
                        }
                        let m = self.incl[h];
                        let tab = prob.add_table(a.restr[m][rk as usize].clone());
                        prob.link(i, pos[&big.compose(k, m)], tab);
                    }
                }
                let mut sols = prob.all(&mut budget)?;
                sols.sort();
                row.push(sols);
            }
            members.push(row);
        }
        let sizes = members.iter().map(|r| r.iter().map(|s| s.len() as u32).collect()).collect();
        let mut restr = Vec::with_capacity(big.morphism_count());
        for k in big.morphisms() {
            let (c1, c) = (big.src(k), big.dst(k));
            let pos: HashMap<Mor, usize> = big.incoming(c).iter().enumerate().map(|(i, &m)| (m, i)).collect();
            let mut per = Vec::with_capacity(g.sizes[c] as usize);
            for rho in 0..g.sizes[c] {
                let target = &members[c1][g.act(k, rho) as usize];
                let t = members[c][rho as usize]
                    .iter()
                    .map(|fam| {
                        let r: Vec<u32> = big.incoming(c1).iter().map(|&m| fam[pos[&big.compose(k, m)]]).collect();
                        target.binary_search(&r).map(|i| i as u32).map_err(|_| Error::NaturalityViolation("⟨R⟩ restriction".into()))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                per.push(t);
            }
            restr.push(per);
        }
        Ok(TyFam { sizes, restr })
    }
}

/// `E = RU` as a functor on presheaves over ∫C.
pub struct CofreeFunctor<'a>(pub &'a Adjunction);

impl PshFunctor for CofreeFunctor<'_> {
    fn source_cat(&self) -> &Cat {
        self.0.big()
    }
    fn target_cat(&self) -> &Cat {
        self.0.big()
    }
    fn obj(&self, g: &Presheaf) -> Result<Presheaf> {
        Ok(self.0.r_psh(&self.0.u_psh(g))?.psh.clone())
    }
    fn map(&self, dom: &Presheaf, cod: &Presheaf, s: &Subst) -> Result<Subst> {
        self.0.r_subst(&self.0.u_psh(dom), &self.0.u_psh(cod), s)
    }
}

/// U as a functor on presheaves, for the forgetful pseudomorphism.
pub struct ForgetfulFunctor<'a>(pub &'a Adjunction);

impl PshFunctor for ForgetfulFunctor<'_> {
    fn source_cat(&self) -> &Cat {
        self.0.big()
    }
    fn target_cat(&self) -> &Cat {
        self.0.small()
    }
    fn obj(&self, g: &Presheaf) -> Result<Presheaf> {
        Ok(self.0.u_psh(g))
    }
    fn map(&self, _: &Presheaf, _: &Presheaf, s: &Subst) -> Result<Subst> {
        Ok(s.clone())
    }
}

/// The unit η as a pointing of E.
pub struct UnitPointing<'a>(pub &'a Adjunction);

impl Pointing<PshModel> for UnitPointing<'_> {
    fn component(&self, g: &Presheaf) -> Result<Subst> {
        self.0.unit(g)
    }
}

/// For constant C, `(RΓ0)(k, x) = Π_{α : y -> x} Γ0(k, y)`. Builds that product directly and
/// checks the map `s ↦ (s_{(id, α)})_α` is a bijection commuting with restriction.
pub fn check_product_formula(adj: &Adjunction, g0: &Presheaf) -> Result<Report> {
    let site = &adj.site;
    let ic = &site.internal;
    if !ic.constant {
        return Err(Error::InvalidStructure("product formula needs a constant internal category".into()));
    }
    let big = adj.big();
    let cube = site.cube();
    let mut rep = Report::new(format!("product-formula/{}", ic.name));
    // tuples[c] = all (t_α)_α for α ∈ C(-, x), lexicographic
    let mut tuples: Vec<Vec<Vec<u32>>> = Vec::with_capacity(big.object_count());
    for c in big.objects() {
        let (k, x) = (site.stage(c), site.point(c));
        let cc = &ic.stages[k];
        let sizes: Vec<u32> = cc.incoming(x).iter().map(|&a| g0.sizes[site.object(k, cc.src(a)).unwrap()]).collect();
        let mut out = Vec::new();
        let mut cur = vec![0u32; sizes.len()];
        if sizes.iter().all(|&s| s > 0) {
            'outer: loop {
                out.push(cur.clone());
                for i in (0..cur.len()).rev() {
                    cur[i] += 1;
                    if cur[i] < sizes[i] {
                        continue 'outer;
                    }
                    cur[i] = 0;
                }
                break;
            }
        }
        tuples.push(out);
    }
    let r = adj.r_psh(g0)?;
    let small_lift = |f: Mor, z_stage_obj: Obj| -> Mor {
        let l = cube.map(f).src;
        adj.lvl.morphism(f, z_stage_obj, adj.lvl.internal.stages[l].id(z_stage_obj)).expect("levelwise lift")
    };
    let mut canon: Vec<Vec<u32>> = Vec::new();
    for c in big.objects() {
        let (k, x) = (site.stage(c), site.point(c));
        let cc = &ic.stages[k];
        let idk = cube.lookup(&crate::cat::CubeMap::identity(k)).unwrap();
        let cols: Vec<usize> = cc
            .incoming(x)
            .iter()
            .map(|&a| big.incoming(c).iter().position(|&g| g == site.morphism(idk, x, a).unwrap()).unwrap())
            .collect();
        let mut m = Vec::with_capacity(r.elems[c].len());
        for s in &r.elems[c] {
            let t: Vec<u32> = cols.iter().map(|&i| s[i]).collect();
            m.push(tuples[c].binary_search(&t).map(|i| i as u32).unwrap_or(u32::MAX));
        }
        rep.fact(format!("product.size.{}", site.object_label(c)), tuples[c].len());
        let mut seen = m.clone();
        seen.sort();
        seen.dedup();
        rep.check("product-bijection", m.len() == tuples[c].len() && seen.len() == m.len() && !seen.contains(&u32::MAX), || {
            format!("{}: {} Kan families vs {} tuples", site.object_label(c), r.elems[c].len(), tuples[c].len())
        });
        canon.push(m);
    }
    // restriction on tuples along (f, β) : (l, y') -> (k, x):  t'_{α'} = t_{β∘α'}·(f, id)
    for mo in big.morphisms() {
        let (c1, c) = (big.src(mo), big.dst(mo));
        let (l, y1) = (site.stage(c1), site.point(c1));
        let (k, x) = (site.stage(c), site.point(c));
        let f = site.cube_part(mo);
        let beta = site.arrow_part(mo);
        let cl = &ic.stages[l];
        let ck = &ic.stages[k];
        let pos: HashMap<Mor, usize> = ck.incoming(x).iter().enumerate().map(|(i, &a)| (a, i)).collect();
        for (si, s) in r.elems[c].iter().enumerate() {
            let Some(t) = tuples[c].get(canon[c][si] as usize) else { continue };
            let t1: Vec<u32> = cl
                .incoming(y1)
                .iter()
                .map(|&a1| {
                    let z = cl.src(a1);
                    let v = t[pos[&cl.compose(beta, a1)]];
                    g0.act(small_lift(f, z), v)
                })
                .collect();
            let restricted = r.psh.act(mo, si as u32);
            rep.check("product-restriction", canon[c1][restricted as usize] as usize == tuples[c1].binary_search(&t1).unwrap_or(usize::MAX), || {
                format!("{} along {}: {:?}", site.object_label(c), big.morphism_name(mo), s)
            });
        }
    }
    Ok(rep)
}

/// Compares `U(Π_A B)` with `Π_{UA} UB` through the map restricting a family to the
/// levelwise morphisms. Records one check per `(c, ρ)`.
pub fn check_u_preserves_pi(adj: &Adjunction, g: &Presheaf, a: &TyFam, b: &TyFam, budget: &mut Budget) -> Result<Report> {
    let (big, small) = (adj.big(), adj.small());
    let mut rep = Report::new(format!("U-pi/{}", adj.site.internal.name));
    let pb = pi_type(big, g, a, b, budget)?;
    let ug = adj.u_psh(g);
    let ps = pi_type(small, &ug, &adj.u_ty(a), &adj.u_ty(b), budget)?;
    let mut canon: Vec<Vec<Vec<usize>>> = Vec::with_capacity(big.object_count());
    for c in big.objects() {
        let mut row = Vec::new();
        for rho in 0..g.sizes[c] {
            let fb = &pb.fibers[c][rho as usize];
            let fs = &ps.fibers[c][rho as usize];
            let mut img: Vec<usize> = Vec::with_capacity(fb.members.len());
            for fam in &fb.members {
                let r: Vec<u32> = fs.domain.iter().map(|&(h, u)| fam[fb.dom_index[&(adj.incl[h], u)]]).collect();
                img.push(fs.members.binary_search(&r).unwrap_or(usize::MAX));
            }
            let mut seen = img.clone();
            seen.sort();
            seen.dedup();
            let ok = seen.len() == fs.members.len() && img.len() == fs.members.len() && !seen.contains(&usize::MAX);
            rep.check("U-pi-bijection", ok, || {
                format!("{} ρ={rho}: |UΠ| = {}, |ΠU| = {}", adj.site.object_label(c), fb.members.len(), fs.members.len())
            });
            row.push(img);
        }
        canon.push(row);
    }
    for h in small.morphisms() {
        let (c1, c) = (small.src(h), small.dst(h));
        for rho in 0..g.sizes[c] {
            let rho1 = ug.act(h, rho);
            for (i, &j) in canon[c][rho as usize].iter().enumerate() {
                if j == usize::MAX {
                    continue;
                }
                let lhs = canon[c1][rho1 as usize][pb.ty.restr[adj.incl[h]][rho as usize][i] as usize];
                let rhs = ps.ty.restr[h][rho as usize][j] as usize;
                rep.check("U-pi-restriction", lhs == rhs, || format!("{} along {}", adj.site.object_label(c), small.morphism_name(h)));
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::{grothendieck, InternalCategory};
    use crate::cwf::{check_lex_stability, check_pseudomorphism, lex_of_pointed, Pseudomorphism};
    use crate::psh::formers::cube_presheaf;
    use crate::psh::model::DisplayLift;
    use crate::psh::Elem;

    fn adj(cat: &Cat, d: usize) -> Adjunction {
        let ic = InternalCategory::constant(cat, d, "c").unwrap();
        Adjunction::new(grothendieck(&ic).unwrap(), 1_000_000).unwrap()
    }

    #[test]
    fn r_over_arrow_at_dimension_zero() {
        let a = adj(&Cat::walking_arrow(), 0);
        let g0 = Presheaf { sizes: vec![1, 2], restr: vec![vec![0], vec![0, 1]] };
        g0.validate(a.small()).unwrap();
        let r = a.r_psh(&g0).unwrap();
        assert_eq!(r.psh.sizes, vec![1, 2]);
        r.psh.validate(a.big()).unwrap();
    }

    #[test]
    fn counit_reads_the_identity_component() {
        let a = adj(&Cat::walking_arrow(), 1);
        let g0 = Presheaf::constant(a.small(), 2);
        let r = a.r_psh(&g0).unwrap();
        let eps = a.counit(&g0).unwrap();
        for c in a.big().objects() {
            let at = a.big().incoming(c).iter().position(|&g| g == a.big().id(c)).unwrap();
            for (i, s) in r.elems[c].iter().enumerate() {
                assert_eq!(eps.maps[c][i], s[at]);
            }
        }
        eps.validate(a.small(), &a.u_psh(&r.psh), &g0).unwrap();
    }

    #[test]
    fn terminal_internal_category_r_is_identity_up_to_iso() {
        let a = adj(&Cat::terminal(), 1);
        for g0 in [Presheaf::constant(a.small(), 2), Presheaf::terminal(a.small())] {
            let r = a.r_psh(&g0).unwrap();
            let eps = a.counit(&g0).unwrap();
            assert!(eps.is_bijective(&a.u_psh(&r.psh), &g0));
        }
    }

    #[test]
    fn triangles_and_product_formula() {
        for (cat, d) in [(Cat::terminal(), 0), (Cat::terminal(), 1), (Cat::walking_arrow(), 0), (Cat::walking_arrow(), 1), (Cat::discrete(2), 1)] {
            let a = adj(&cat, d);
            let big = a.big().clone();
            let small = a.small().clone();
            let mut gs = vec![Presheaf::terminal(&big), Presheaf::constant(&big, 2)];
            gs.extend(big.objects().map(|c| Presheaf::yoneda(&big, c)).filter(|y| y.sizes.iter().all(|&s| s <= 4)));
            let mut g0s = vec![Presheaf::constant(&small, 2)];
            g0s.extend(small.objects().map(|c| Presheaf::yoneda(&small, c)));
            for g in &gs {
                for g0 in &g0s {
                    let rep = a.check_triangles(g, g0).unwrap();
                    assert!(rep.pass(), "{:?}", rep.failures);
                }
            }
            for g0 in &g0s {
                let rep = check_product_formula(&a, g0).unwrap();
                assert!(rep.pass(), "{:?}", rep.failures);
            }
        }
    }

    #[test]
    fn u_of_yoneda_counts_homs() {
        let a = adj(&Cat::walking_arrow(), 1);
        let site = &a.site;
        let c = Cat::walking_arrow();
        for x in a.big().objects() {
            let uy = a.u_psh(&Presheaf::yoneda(a.big(), x));
            uy.validate(a.small()).unwrap();
            for y in a.big().objects() {
                let n = site.cube().hom_count(site.stage(y), site.stage(x)) * c.homs(site.point(y), site.point(x)).len();
                assert_eq!(uy.sizes[y] as usize, n);
            }
        }
    }

    #[test]
    fn u_preserves_products_sigma_and_identity_types() {
        let a = adj(&Cat::walking_arrow(), 1);
        let big = a.big().clone();
        let small = a.small().clone();
        let g = Presheaf::yoneda(&big, 3);
        let h = Presheaf::constant(&big, 2);
        assert_eq!(a.u_psh(&Presheaf::product(&big, &g, &h)), Presheaf::product(&small, &a.u_psh(&g), &a.u_psh(&h)));
        let ty = fibers(&big, &Presheaf::product(&big, &g, &h), &g, &Subst { maps: (0..4).map(|c| (0..g.sizes[c] * 2).map(|i| i / 2).collect()).collect() }).ty;
        let (ctx, id) = ty.identity_type(&big, &g);
        let (uctx, uid) = a.u_ty(&ty).identity_type(&small, &a.u_psh(&g));
        assert_eq!(a.u_psh(&ctx), uctx);
        assert_eq!(a.u_ty(&id), uid);
        let b = TyFam::constant(&big, &ty.ext(&big, &g), 2);
        assert_eq!(a.u_ty(&ty.sigma(&big, &g, &b)), a.u_ty(&ty).sigma(&small, &a.u_psh(&g), &a.u_ty(&b)));
    }

    #[test]
    fn u_preserves_products_indexed_by_cubical_sets() {
        let a = adj(&Cat::walking_arrow(), 1);
        let site = &a.site;
        let big = a.big().clone();
        let g = Presheaf::terminal(&big);
        // J = the interval pulled back from the cube category
        let stages: Vec<Vec<crate::cat::IntervalElement>> =
            (0..=1).map(|k| crate::cat::IntervalElement::enumerate(k).unwrap()).collect();
        let j = cube_presheaf(site, &stages, |r, f| r.subst(&f.comps, f.src)).unwrap();
        let a_ty = TyFam::weaken(&big, &g, &j);
        let b = TyFam::constant(&big, &a_ty.ext(&big, &g), 2);
        let rep = check_u_preserves_pi(&a, &g, &a_ty, &b, &mut Budget::unlimited()).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures);
        // not pulled back from cubes: y([0], a) has an element at a that never restricts from b
        let y = Presheaf::yoneda(&big, site.object(0, 0).unwrap());
        let a2 = TyFam::weaken(&big, &g, &y);
        let b2 = TyFam::constant(&big, &a2.ext(&big, &g), 2);
        let rep = check_u_preserves_pi(&a, &g, &a2, &b2, &mut Budget::unlimited()).unwrap();
        assert!(!rep.pass());
    }

    #[test]
    fn forgetful_pseudomorphism_passes() {
        let a = adj(&Cat::walking_arrow(), 1);
        let src = PshModel::with_default_roster(a.site.cat.clone(), "PSh(∫C)").unwrap();
        let tgt = PshModel::with_default_roster(a.lvl.cat.clone(), "PSh(∫C0)").unwrap();
        let u = DisplayLift::new(&src, &tgt, ForgetfulFunctor(&a));
        let rep = check_pseudomorphism(&u, &mut Budget::new(50_000_000)).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures);
        // ↓ is the identity on encodings
        for (g, tys) in src.roster() {
            for t in tys {
                assert_eq!(u.down(g, t).unwrap(), Subst::identity(&t.ext(a.big(), g)));
            }
        }
    }

    struct BrokenDown<'a, F>(DisplayLift<'a, F>);

    impl<F: PshFunctor> Pseudomorphism for BrokenDown<'_, F> {
        type Src = PshModel;
        type Tgt = PshModel;
        fn source(&self) -> &PshModel {
            self.0.source()
        }
        fn target(&self) -> &PshModel {
            self.0.target()
        }
        fn cont(&self, g: &Presheaf) -> Result<Presheaf> {
            self.0.cont(g)
        }
        fn subs(&self, d: &Presheaf, c: &Presheaf, s: &Subst) -> Result<Subst> {
            self.0.subs(d, c, s)
        }
        fn ty(&self, g: &Presheaf, a: &TyFam) -> Result<TyFam> {
            self.0.ty(g, a)
        }
        fn el(&self, g: &Presheaf, a: &TyFam, t: &Elem) -> Result<Elem> {
            self.0.el(g, a, t)
        }
        // a section over DΓ that always picks the first fiber member
        fn down(&self, g: &Presheaf, a: &TyFam) -> Result<Subst> {
            let fib = self.0.fibers(g, a)?;
            Ok(Subst { maps: fib.members.iter().map(|m| m.iter().flat_map(|l| l.iter().map(|_| l[0])).collect()).collect() })
        }
        fn down_empty(&self) -> Result<Subst> {
            self.0.down_empty()
        }
    }

    #[test]
    fn arbitrary_section_for_down_is_caught() {
        let a = adj(&Cat::terminal(), 0);
        let src = PshModel::with_default_roster(a.site.cat.clone(), "src").unwrap();
        let tgt = PshModel::with_default_roster(a.lvl.cat.clone(), "tgt").unwrap();
        let u = BrokenDown(DisplayLift::new(&src, &tgt, ForgetfulFunctor(&a)));
        let rep = check_pseudomorphism(&u, &mut Budget::unlimited()).unwrap();
        assert!(rep.failures.iter().any(|f| f.equation == "pair-down"));
    }

    #[test]
    fn e_bar_matches_direct_formula() {
        let a = adj(&Cat::walking_arrow(), 0);
        let m = PshModel::with_default_roster(a.site.cat.clone(), "PSh(arrow)").unwrap();
        let e = DisplayLift::new(&m, &m, CofreeFunctor(&a));
        let eta = UnitPointing(&a);
        let lex = lex_of_pointed(&m, &e, &eta, &mut Budget::unlimited()).unwrap();
        for (g, tys) in m.roster() {
            for t in tys {
                assert_eq!(lex.ty(g, t).unwrap(), a.r_dep(g, t).unwrap());
            }
        }
        let rep = check_lex_stability(&lex, &mut Budget::unlimited()).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures);
    }

    #[test]
    fn e_is_a_pseudomorphism() {
        let a = adj(&Cat::walking_arrow(), 0);
        let m = PshModel::with_default_roster(a.site.cat.clone(), "PSh(arrow)").unwrap();
        let e = DisplayLift::new(&m, &m, CofreeFunctor(&a));
        let rep = check_pseudomorphism(&e, &mut Budget::unlimited()).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures);
    }
}
