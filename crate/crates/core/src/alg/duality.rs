//! The site of finite stages, the generic model, Spec through its local representation,
//! and the duality and nullity checks at the discrete level.

use std::collections::HashMap;
use std::sync::Arc;

use super::presented::{hom_enum, presented_algebra, pushout_extend, spec_levelwise, AlgebraHom, Presentation, PresentedAlgebra};
use crate::cat::{grothendieck, Cat, InternalCategory, Mor, Obj, Site};
use crate::error::{Error, Result};
use crate::psh::formers::pi_type;
use crate::psh::{fibers, ExtCode, Presheaf, TyFam};
use crate::repr::{projectivity_at, pushforward_eval, representing_map, LocalPoint};
use crate::report::{Budget, Outcome, Report};

/// Named stages: `f2`, `f3`, `f4`, `f2y` (y² = y), `f2e` (y² = 0), `f2xy` (x² = x, y² = y).
pub fn builtin_stage(name: &str) -> Option<Result<PresentedAlgebra>> {
    let alg = |p, vars: &[&str], rels: &[&str]| PresentedAlgebra::over_prime(name, p, vars, rels);
    Some(match name {
        "f2" => alg(2, &[], &[]),
        "f3" => alg(3, &[], &[]),
        "f4" => alg(2, &["y"], &["y^2 = y + 1"]),
        "f2y" => alg(2, &["y"], &["y^2 = y"]),
        "f2e" => alg(2, &["y"], &["y^2 = 0"]),
        "f2xy" => alg(2, &["x", "y"], &["x^2 = x", "y^2 = y"]),
        _ => return None,
    })
}

/// The opposite of the category of the listed finite stages and all homomorphisms between
/// them, as a site with no cube stages above [0].
#[derive(Clone, Debug)]
pub struct StageSite {
    pub stages: Vec<Arc<PresentedAlgebra>>,
    /// For a morphism `Y' -> Y` of the site, the homomorphism `Y -> Y'`.
    pub maps: Vec<AlgebraHom>,
    pub carrier: Vec<Vec<u32>>,
    pub site: Site,
}

impl StageSite {
    pub fn new(stages: Vec<Arc<PresentedAlgebra>>) -> Result<StageSite> {
        let mut uniq: Vec<Arc<PresentedAlgebra>> = Vec::new();
        for s in stages {
            s.size()?;
            if !uniq.iter().any(|t| **t == *s) {
                uniq.push(s);
            }
        }
        let n = uniq.len();
        let mut mors = Vec::new();
        let mut maps = Vec::new();
        let mut carrier = Vec::new();
        let mut index: HashMap<(usize, usize, Vec<u32>), Mor> = HashMap::new();
        let mut ids = vec![usize::MAX; n];
        for s in 0..n {
            for t in 0..n {
                // site morphisms s -> t are homomorphisms t -> s
                for h in hom_enum(&uniq[t], &uniq[s])? {
                    let map = h.carrier_map(&uniq[t], &uniq[s])?;
                    let k = mors.len();
                    if s == t && map.iter().enumerate().all(|(i, &v)| i as u32 == v) {
                        ids[s] = k;
                    }
                    index.insert((s, t, map.clone()), k);
                    mors.push((format!("{}<-{}#{}", uniq[s].name, uniq[t].name, k), s, t));
                    maps.push(h);
                    carrier.push(map);
                }
            }
        }
        let names = uniq.iter().map(|s| s.name.clone()).collect();
        let srcs: Vec<usize> = mors.iter().map(|m| m.1).collect();
        let dsts: Vec<usize> = mors.iter().map(|m| m.2).collect();
        let cat = Cat::build(names, mors, ids, |g, f| {
            // f : X -> Y, g : Y -> Z; as carrier maps Y -> X and Z -> Y
            let comp: Vec<u32> = carrier[g].iter().map(|&y| carrier[f][y as usize]).collect();
            index.get(&(srcs[f], dsts[g], comp)).copied().ok_or_else(|| Error::Validation("composite homomorphism missing".into()))
        })?;
        let site = grothendieck(&InternalCategory::constant(&cat, 0, "stages")?)?;
        // at dimension 0 the site's morphisms are those of the stage category
        let maps = site.cat.morphisms().map(|m| maps[site.arrow_part(m)].clone()).collect();
        let carrier = site.cat.morphisms().map(|m| carrier[site.arrow_part(m)].clone()).collect();
        Ok(StageSite { stages: uniq, maps, carrier, site })
    }

    pub fn obj(&self, stage: usize) -> Obj {
        self.site.object(0, stage).expect("stage object")
    }

    pub fn stage_of(&self, a: &PresentedAlgebra) -> Option<usize> {
        self.stages.iter().position(|s| **s == *a)
    }

    /// The morphism `Y' -> Y` for a homomorphism `Y -> Y'`.
    pub fn morphism(&self, from: Obj, to: Obj, h: &AlgebraHom) -> Option<Mor> {
        self.site.cat.homs(from, to).iter().copied().find(|&m| self.maps[m] == *h)
    }

    /// `G(Y)` is the carrier of Y, restricted along homomorphisms.
    pub fn generic_model(&self) -> Presheaf {
        let cat = &self.site.cat;
        Presheaf {
            sizes: cat.objects().map(|x| self.stages[self.site.point(x)].size().unwrap() as u32).collect(),
            restr: cat.morphisms().map(|m| self.carrier[m].clone()).collect(),
        }
    }

    /// Associativity and unit laws, recomputed from carrier maps.
    pub fn check_laws(&self) -> Report {
        let cat = &self.site.cat;
        let mut rep = Report::new("stage-category");
        for f in cat.morphisms() {
            let (x, y) = (cat.src(f), cat.dst(f));
            rep.check("left-unit", cat.compose(cat.id(y), f) == f, || cat.morphism_name(f).to_string());
            rep.check("right-unit", cat.compose(f, cat.id(x)) == f, || cat.morphism_name(f).to_string());
            for &g in cat.objects().flat_map(|z| cat.homs(y, z)) {
                let gf = cat.compose(g, f);
                let expect: Vec<u32> = self.carrier[g].iter().map(|&v| self.carrier[f][v as usize]).collect();
                rep.check("composite", self.carrier[gf] == expect, || format!("{} after {}", cat.morphism_name(g), cat.morphism_name(f)));
                for &h in cat.objects().flat_map(|w| cat.homs(cat.dst(g), w)) {
                    rep.check("associativity", cat.compose(h, gf) == cat.compose(cat.compose(h, g), f), || {
                        format!("{}, {}, {}", cat.morphism_name(h), cat.morphism_name(g), cat.morphism_name(f))
                    });
                }
            }
        }
        rep.fact("stages", self.stages.len());
        rep.fact("morphisms", cat.morphism_count());
        rep
    }
}

/// Spec(u) over the stage A, as the fibers of `y⟨u⟩ -> yA`, with its representation at
/// `(A, id)` by `(⟨u⟩, p_u, id)`.
#[derive(Clone, Debug)]
pub struct SpecInstance {
    pub base: Arc<PresentedAlgebra>,
    pub u: Presentation,
    pub algebra: Arc<PresentedAlgebra>,
    pub stages: StageSite,
    pub a_obj: Obj,
    pub u_obj: Obj,
    pub p_mor: Mor,
    pub gamma: Presheaf,
    pub gamma_id: u32,
    pub spec: TyFam,
    /// `members[Y][h]`: the elements of `y⟨u⟩(Y)` over h.
    pub members: Vec<Vec<Vec<u32>>>,
    pub point: LocalPoint,
}

pub fn spec_instance(base: &Arc<PresentedAlgebra>, u: &Presentation, roster: &[Arc<PresentedAlgebra>], budget: &mut Budget) -> Result<SpecInstance> {
    let algebra = Arc::new(presented_algebra(base, u)?);
    algebra.size()?;
    let mut stages = vec![base.clone(), algebra.clone()];
    stages.extend(roster.iter().cloned());
    let st = StageSite::new(stages)?;
    let (a_obj, u_obj) = (st.obj(st.stage_of(base).unwrap()), st.obj(st.stage_of(&algebra).unwrap()));
    let cat = &st.site.cat;
    let p_mor = st.morphism(u_obj, a_obj, &algebra.coprojection()).ok_or_else(|| Error::Validation("p_u missing from the stage category".into()))?;
    let gamma = Presheaf::yoneda(cat, a_obj);
    let gamma_id = crate::repr::identity_index(&st.site, a_obj);
    let yu = Presheaf::yoneda(cat, u_obj);
    let delta = cat.homs(u_obj, a_obj).iter().position(|&m| m == p_mor).unwrap() as u32;
    let fib = fibers(cat, &yu, &gamma, &representing_map(&st.site, &gamma, u_obj, delta));
    let id_u = crate::repr::identity_index(&st.site, u_obj);
    let q = fib.position[u_obj][id_u as usize];
    let point = LocalPoint::certify(&st.site, &gamma, &fib.ty, a_obj, gamma_id, (u_obj, p_mor, q), budget)?;
    Ok(SpecInstance {
        base: base.clone(),
        u: u.clone(),
        algebra,
        a_obj,
        u_obj,
        p_mor,
        gamma,
        gamma_id,
        spec: fib.ty,
        members: fib.members,
        point,
        stages: st,
    })
}

impl SpecInstance {
    pub fn site(&self) -> &Site {
        &self.stages.site
    }

    /// The homomorphism `⟨u⟩ -> Y` behind the j-th point of `Spec(Y, h)`.
    pub fn point_hom(&self, y: Obj, h: u32, j: u32) -> &AlgebraHom {
        let t = self.members[y][h as usize][j as usize];
        &self.stages.maps[self.site().cat.homs(y, self.u_obj)[t as usize]]
    }

    pub fn spec_size_at_base(&self) -> u32 {
        self.spec.fiber(self.a_obj, self.gamma_id)
    }

    /// `P(Y, s) = {y ∈ Y : y·s(x) = y} ⊔ {*}` for the first generator x of u.
    pub fn support_family(&self) -> Result<TyFam> {
        let kx = self.base.nvars();
        if self.u.generators.is_empty() {
            return Err(Error::InvalidStructure("the support family needs a generator".into()));
        }
        let cat = &self.site().cat;
        let code = ExtCode::new(&self.spec);
        let ext = self.spec.ext(cat, &self.gamma);
        let mut lists: Vec<Vec<Vec<u32>>> = Vec::new();
        for y in cat.objects() {
            let stage = &self.stages.stages[self.site().point(y)];
            let elems = stage.elements()?;
            let row = (0..ext.sizes[y])
                .map(|e| {
                    let (h, j) = code.dec(y, e);
                    let idem = &self.point_hom(y, h, j).images[kx];
                    (0..elems.len() as u32).filter(|&i| stage.mul(&elems[i as usize], idem) == elems[i as usize]).collect()
                })
                .collect();
            lists.push(row);
        }
        let sizes: Vec<Vec<u32>> = lists.iter().map(|r| r.iter().map(|l| l.len() as u32 + 1).collect()).collect();
        let restr = cat
            .morphisms()
            .map(|m| {
                let (ys, yd) = (cat.src(m), cat.dst(m));
                (0..ext.sizes[yd])
                    .map(|e| {
                        let to = &lists[ys][ext.act(m, e) as usize];
                        let mut out: Vec<u32> = lists[yd][e as usize]
                            .iter()
                            .map(|&v| to.iter().position(|&w| w == self.stages.carrier[m][v as usize]).unwrap() as u32)
                            .collect();
                        out.push(to.len() as u32);
                        out
                    })
                    .collect()
            })
            .collect();
        let t = TyFam { sizes, restr };
        t.validate(cat, &ext)?;
        Ok(t)
    }
}

/// For each stage B: `Hom(⟨u⟩, B) ≅ Σ_{h : A -> B} Ret_B(uh)` by `g ↦ (g p_u, r_g)`, both sides
/// enumerated; `q_u` is a retraction with `q_u ∘ p_u⁺ = id`; and `⟨p_u, q_u⟩` is certified
/// as a levelwise equivalence at `(A, id)`.
pub fn check_local_representability(base: &Arc<PresentedAlgebra>, u: &Presentation, roster: &[Arc<PresentedAlgebra>], budget: &mut Budget) -> Result<Report> {
    let mut rep = Report::new("local-representability");
    let alg = Arc::new(presented_algebra(base, u)?);
    let ka = base.nvars();
    let p_u = alg.coprojection();
    for b in roster {
        let homs_u = hom_enum(&alg, b)?;
        let mut sigma = Vec::new();
        for h in hom_enum(base, b)? {
            let po = pushout_extend(&h, base, b, u)?;
            for r in spec_levelwise(b, &po.uh)? {
                sigma.push((h.clone(), r));
            }
        }
        let mut hit = vec![false; sigma.len()];
        let mut ok = true;
        for g in &homs_u {
            let h = g.after(&p_u, &alg, b);
            let mut images = AlgebraHom::identity(b).images;
            images.extend(g.images[ka..].iter().cloned());
            match sigma.iter().position(|(h2, r)| *h2 == h && r.images == images) {
                Some(i) if !hit[i] => hit[i] = true,
                _ => ok = false,
            }
        }
        rep.check("sigma-bijection", ok && hit.iter().all(|&x| x), || format!("at {}: {} homomorphisms, {} pairs", b.name, homs_u.len(), sigma.len()));
        rep.fact(format!("{}: |Hom(<u>, B)|", b.name), homs_u.len());
        rep.fact(format!("{}: |Σ Ret|", b.name), sigma.len());
    }
    // q_u : ⟨u p_u⟩ -> ⟨u⟩ sends the copied generators back
    let po = pushout_extend(&p_u, base, &alg, u)?;
    let mut q_images = AlgebraHom::identity(&alg).images;
    q_images.extend((0..u.generators.len()).map(|j| alg.nf(&alg.ring.var(ka + j))));
    let q_u = AlgebraHom { images: q_images };
    rep.check("q-valid", q_u.check(&po.target, &alg).is_ok(), || "q_u violates a relation".into());
    let fixes = (0..alg.nvars()).all(|i| q_u.apply(&po.target, &alg, &po.target.ring.var(i)) == alg.nf(&alg.ring.var(i)));
    rep.check("q-retraction", fixes, || "q_u does not fix <u>".into());
    let round = q_u.after(&po.h_plus, &po.target, &alg);
    rep.check("q-after-p-plus", round == AlgebraHom::identity(&alg), || format!("{:?}", round.images));
    match spec_instance(base, u, roster, budget) {
        Ok(_) => rep.check("levelwise-equivalence", true, String::new),
        Err(Error::SearchInconclusive(_) | Error::BudgetExceeded(_)) => rep.search("levelwise-equivalence", Outcome::Inconclusive, budget.spent),
        Err(e) => rep.check("levelwise-equivalence", false, || e.to_string()),
    }
    Ok(rep)
}

/// Sizes and the evaluation bijection `⟨u⟩ -> (G^Spec)(A, u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityOutcome {
    pub left: usize,
    pub right: usize,
    pub spec_at_base: u32,
}

/// The transposed evaluation `a ↦ (s ↦ s(a))` lands in `Π_{Spec} G` at `(A, id)`, is a
/// bijection, and composed with evaluation at the representing point is the identity.
pub fn check_duality_axiom(base: &Arc<PresentedAlgebra>, u: &Presentation, roster: &[Arc<PresentedAlgebra>], budget: &mut Budget) -> Result<(Report, DualityOutcome)> {
    let mut rep = Report::new("duality");
    let inst = spec_instance(base, u, roster, budget)?;
    let site = inst.site();
    let cat = &site.cat;
    let g = inst.stages.generic_model();
    let ext = inst.spec.ext(cat, &inst.gamma);
    let gw = TyFam::weaken(cat, &ext, &g);
    let ev = pushforward_eval(site, &inst.point, &inst.gamma, &inst.spec, &gw, inst.a_obj, inst.gamma_id, budget)?;
    let pi = pi_type(cat, &inst.gamma, &inst.spec, &gw, budget).map_err(|e| match e {
        Error::BudgetExceeded(m) => Error::SearchInconclusive(m),
        e => e,
    })?;
    let fib = &pi.fibers[inst.a_obj][inst.gamma_id as usize];
    let elems = inst.algebra.elements()?;
    let mut seen = vec![false; fib.members.len()];
    let mut natural = true;
    let mut round = true;
    for (i, a) in elems.iter().enumerate() {
        let fam: Vec<u32> = fib
            .domain
            .iter()
            .map(|&(f, j)| {
                let y = cat.src(f);
                let s = inst.point_hom(y, inst.gamma.act(f, inst.gamma_id), j);
                let stage = &inst.stages.stages[site.point(y)];
                stage.index(&s.apply(&inst.algebra, stage, a))
            })
            .collect::<Result<_>>()?;
        match fib.position(&fam) {
            Some(k) => {
                seen[k as usize] = true;
                round &= ev.values[k as usize] as usize == i;
            }
            None => natural = false,
        }
    }
    rep.check("transpose-natural", natural, || "an evaluation family is not natural".into());
    rep.check("evaluation-surjective", seen.iter().all(|&s| s), || format!("{} of {} families reached", seen.iter().filter(|&&s| s).count(), seen.len()));
    rep.check("evaluation-injective", elems.len() == fib.members.len(), || format!("{} elements, {} families", elems.len(), fib.members.len()));
    rep.check("round-trip", round, || "evaluating at the representing point is not the identity".into());
    rep.check("representation-bijective", ev.is_bijective(), || format!("{} families onto {} elements", ev.values.len(), ev.target));
    let out = DualityOutcome { left: elems.len(), right: fib.members.len(), spec_at_base: inst.spec_size_at_base() };
    rep.fact("left", out.left);
    rep.fact("right", out.right);
    rep.fact("spec-at-base", out.spec_at_base);
    Ok((rep, out))
}

/// The constant presheaf on `0..segment`: restriction along `p_u` is a bijection, and the
/// constant map `N(A) -> (N^Spec)(A, u)` is a bijection.
pub fn check_nullity_axiom(base: &Arc<PresentedAlgebra>, u: &Presentation, roster: &[Arc<PresentedAlgebra>], segment: u32, budget: &mut Budget) -> Result<Report> {
    let mut rep = Report::new("nullity");
    let inst = spec_instance(base, u, roster, budget)?;
    let site = inst.site();
    let cat = &site.cat;
    let n = Presheaf::constant(cat, segment);
    let restricted: Vec<u32> = (0..segment).map(|k| n.act(inst.p_mor, k)).collect();
    let mut sorted = restricted.clone();
    sorted.sort_unstable();
    sorted.dedup();
    rep.check("restriction-bijective", sorted.len() == segment as usize && n.sizes[inst.u_obj] == segment, || format!("{restricted:?}"));
    let ext = inst.spec.ext(cat, &inst.gamma);
    let nw = TyFam::weaken(cat, &ext, &n);
    let pi = pi_type(cat, &inst.gamma, &inst.spec, &nw, budget).map_err(|e| match e {
        Error::BudgetExceeded(m) => Error::SearchInconclusive(m),
        e => e,
    })?;
    let fib = &pi.fibers[inst.a_obj][inst.gamma_id as usize];
    let hits: Vec<Option<u32>> = (0..segment).map(|k| fib.position(&vec![k; fib.domain.len()])).collect();
    let mut found: Vec<u32> = hits.iter().flatten().copied().collect();
    found.sort_unstable();
    found.dedup();
    rep.check("constant-map-bijective", hits.iter().all(Option::is_some) && found.len() == fib.members.len(), || {
        format!("{} constants, {} natural families", segment, fib.members.len())
    });
    rep.fact("segment", segment);
    Ok(rep)
}

/// Restrict-then-invert for a family over `Γ.Spec` at the base stage.
pub fn check_spec_projectivity(inst: &SpecInstance, p: &TyFam, budget: &mut Budget) -> Result<Report> {
    let mut rep = projectivity_at(inst.site(), &inst.point, &inst.gamma, &inst.spec, p, inst.a_obj, inst.gamma_id, budget)?;
    let fibers: Vec<u32> = (0..inst.spec_size_at_base()).map(|j| p.fiber(inst.a_obj, ExtCode::new(&inst.spec).enc(inst.a_obj, inst.gamma_id, j))).collect();
    rep.check("stagewise-inhabited", fibers.iter().all(|&s| s > 0), || format!("{fibers:?}"));
    rep.fact("fibers-at-base", format!("{fibers:?}"));
    Ok(rep)
}
