use proptest::prelude::*;

use super::properties::path_comparison;
use super::*;
use crate::cat::{grothendieck, Cat, InternalCategory};
use crate::psh::substs;

fn site(cat: &Cat, d: usize, name: &str) -> Site {
    grothendieck(&InternalCategory::constant(cat, d, name).unwrap()).unwrap()
}

fn adj(cat: &Cat, d: usize) -> Adjunction {
    Adjunction::new(site(cat, d, "c"), 1 << 24).unwrap()
}

/// Components of the category of elements of `P_n`, by union-find over cube restrictions.
fn components(site: &Site, p: &Presheaf) -> usize {
    let cat = &site.cat;
    let base: Vec<usize> = cat.objects().scan(0, |acc, c| {
        let s = *acc;
        *acc += p.sizes[c] as usize;
        Some(s)
    }).collect();
    let total: usize = p.sizes.iter().map(|&s| s as usize).sum();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for f in cat.morphisms() {
        let (y, x) = (cat.src(f), cat.dst(f));
        for w in 0..p.sizes[x] {
            let (a, b) = (find(&mut parent, base[x] + w as usize), find(&mut parent, base[y] + p.act(f, w) as usize));
            parent[a] = b;
        }
    }
    (0..total).filter(|&i| find(&mut parent, i) == i).count()
}

/// Counts `D_N Γ(c)` by running through every raw assignment of every component and testing
/// naturality and compatibility directly.
fn brute_force_size(cb: &Cobar, tower: &Tower, c: Obj) -> u64 {
    let cat = &cb.site().cat;
    let doms: Vec<Vec<(usize, u32)>> = (0..=cb.n)
        .map(|n| {
            let mut d = Vec::new();
            for &g in cat.incoming(c) {
                for w in 0..cb.p[n].psh.sizes[cat.src(g)] {
                    d.push((g, w));
                }
            }
            d
        })
        .collect();
    let slots: Vec<(usize, usize, u32)> =
        doms.iter().enumerate().flat_map(|(n, d)| d.iter().map(move |&(g, w)| (n, g, w))).collect();
    let sizes: Vec<u32> = slots.iter().map(|&(n, g, _)| tower.levels[n + 1].sizes[cat.src(g)]).collect();
    let at = |n: usize, g: usize, w: u32| slots.iter().position(|&s| s == (n, g, w)).unwrap();
    let mut vals = vec![0u32; slots.len()];
    let mut count = 0;
    if sizes.contains(&0) {
        return 0;
    }
    loop {
        let natural = slots.iter().enumerate().all(|(i, &(n, g, w))| {
            cat.incoming(cat.src(g)).iter().all(|&h| {
                let j = at(n, cat.compose(g, h), cb.p[n].psh.act(h, w));
                vals[j] == tower.levels[n + 1].act(h, vals[i])
            })
        });
        let compatible = natural
            && slots.iter().enumerate().all(|(i, &(n, g, w))| {
                n == cb.n
                    || (0..=n + 1).all(|k| {
                        let y = cat.src(g);
                        let j = at(n + 1, g, cb.faces[n][k].maps[y][w as usize]);
                        vals[j] == tower.eta[n][k].maps[y][vals[i] as usize]
                    })
            });
        if compatible {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == vals.len() {
                return count;
            }
            vals[i] += 1;
            if vals[i] < sizes[i] {
                break;
            }
            vals[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn empty_context_gives_empty_cobar() {
    let a = adj(&Cat::walking_arrow(), 1);
    let cb = Cobar::new(&a, 2, a.limit).unwrap();
    let gx = cb.context(&Presheaf::empty(&a.site.cat)).unwrap();
    assert!(gx.psh().sizes.iter().all(|&s| s == 0));
}

#[test]
fn discrete_two_over_terminal() {
    let a = adj(&Cat::terminal(), 1);
    let cb = Cobar::new(&a, 2, a.limit).unwrap();
    let g = Presheaf::constant(&a.site.cat, 2);
    let gx = cb.context(&g).unwrap();
    let c0 = a.site.object(0, 0).unwrap();
    assert_eq!(gx.psh().sizes[c0], 2);
    let tau = cb.unit(&g, &gx).unwrap();
    assert!(tau.is_bijective(&g, gx.psh()));
    // every P_n is connected, so each γ_n is constant and fixed by γ_0
    for n in 0..=2 {
        assert_eq!(components(&a.site, &cb.p[n].psh), 1);
    }
    assert!(gx.psh().sizes.iter().all(|&s| s == 2));
}

#[test]
fn tau_bijective_on_discrete_over_terminal() {
    let a = adj(&Cat::terminal(), 1);
    for n in 1..=2 {
        let cb = Cobar::new(&a, n, a.limit).unwrap();
        for size in [1, 3] {
            let g = Presheaf::constant(&a.site.cat, size);
            let gx = cb.context(&g).unwrap();
            assert!(cb.unit(&g, &gx).unwrap().is_bijective(&g, gx.psh()), "N={n} |Γ|={size}");
        }
    }
}

#[test]
fn generation_matches_brute_force() {
    let cat = Cat::walking_arrow();
    let a = adj(&cat, 0);
    let cb = Cobar::new(&a, 1, a.limit).unwrap();
    let g = Presheaf { sizes: vec![2, 2], restr: vec![vec![0, 1], vec![0, 1], vec![1, 0]] };
    g.validate(&a.site.cat).unwrap();
    let gx = cb.context(&g).unwrap();
    for c in a.site.cat.objects() {
        assert_eq!(gx.psh().sizes[c] as u64, brute_force_size(&cb, &gx.tower, c));
    }
}

#[test]
fn generation_matches_brute_force_over_terminal_at_stage_one() {
    let a = adj(&Cat::terminal(), 1);
    let cb = Cobar::new(&a, 1, a.limit).unwrap();
    let g = Presheaf::constant(&a.site.cat, 2);
    let gx = cb.context(&g).unwrap();
    // the stage-1 object has 2^26 raw assignments; stage 0 has 2^10
    let c0 = a.site.object(0, 0).unwrap();
    assert_eq!(gx.psh().sizes[c0] as u64, brute_force_size(&cb, &gx.tower, c0));
}

#[test]
fn unit_powers_agree_along_every_route() {
    let cat = Cat::walking_arrow();
    let a = adj(&cat, 1);
    let cb = Cobar::new(&a, 2, a.limit).unwrap();
    let t = cb.tower(&Presheaf::constant(&a.site.cat, 2)).unwrap();
    for n in 0..2 {
        for k in 0..=n + 1 {
            assert_eq!(t.eta[n][k].compose(&t.unit[n]), t.unit[n + 1], "n={n} k={k}");
        }
    }
}

#[test]
fn tau_images_are_compatible_and_perturbation_is_caught() {
    let a = adj(&Cat::terminal(), 1);
    let cb = Cobar::new(&a, 1, a.limit).unwrap();
    let g = Presheaf::constant(&a.site.cat, 2);
    let gx = cb.context(&g).unwrap();
    let tau = cb.unit(&g, &gx).unwrap();
    let c0 = a.site.object(0, 0).unwrap();
    let elt = gx.element(c0, tau.maps[c0][0]);
    assert_eq!(cb.check_cobar_compat(&gx.tower, &elt), Ok(()));

    // γ_1 at (id, (0, 1)) is the 0-th face of γ_0 at (id, (1))
    let mut bad = elt.clone();
    let w01 = cb.p[1].stages[0].iter().position(|w| w.to_string() == "(0, 1)").unwrap() as u32;
    let slot = cb.domains[1][c0].index[&(a.site.cat.id(c0), w01)];
    bad.comps[1][slot] = 1 - bad.comps[1][slot];
    let fails = cb.compat_failures(&gx.tower, &bad);
    assert_eq!(fails.len(), 1, "{fails:?}");
    assert_eq!((fails[0].n, fails[0].k), (0, 0));
    assert!(fails[0].weight.starts_with("(1)"));
    assert!(cb.check_cobar_compat(&gx.tower, &bad).is_err());
}

#[test]
fn every_generated_element_is_compatible() {
    let cat = Cat::walking_arrow();
    let a = adj(&cat, 1);
    let cb = Cobar::new(&a, 1, a.limit).unwrap();
    let g = Presheaf { sizes: vec![2, 3], restr: vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 1]] };
    let st = &a.site;
    let gs = crate::psh::model::default_contexts(&st.cat);
    for g in gs.iter().take(3).chain(std::iter::once(&lift(st, &cat, &g))) {
        let gx = cb.context(g).unwrap();
        for c in st.cat.objects() {
            for i in 0..gx.psh().sizes[c] {
                assert_eq!(cb.check_cobar_compat(&gx.tower, &gx.element(c, i)), Ok(()));
            }
        }
    }
}

/// A presheaf on C pulled back to the site (constant in the cube direction).
fn lift(site: &Site, cat: &Cat, g: &Presheaf) -> Presheaf {
    let sizes = site.cat.objects().map(|c| g.sizes[site.point(c)]).collect();
    let restr = site.cat.morphisms().map(|m| g.restr[site.arrow_part(m)].clone()).collect();
    let p = Presheaf { sizes, restr };
    p.validate(&site.cat).unwrap();
    let _ = cat;
    p
}

#[test]
fn functorial_and_unit_natural() {
    let cat = Cat::walking_arrow();
    let a = adj(&cat, 1);
    let cb = Cobar::new(&a, 1, a.limit).unwrap();
    let st = &a.site;
    let g = lift(st, &cat, &Presheaf { sizes: vec![2, 2], restr: vec![vec![0, 1], vec![0, 1], vec![1, 0]] });
    let d = lift(st, &cat, &Presheaf::constant(&cat, 1));
    let (gx, dx) = (cb.context(&g).unwrap(), cb.context(&d).unwrap());
    let id = cb.subst(&gx, &gx, &Subst::identity(&g)).unwrap();
    assert_eq!(id, Subst::identity(gx.psh()));
    let (tg, td) = (cb.unit(&g, &gx).unwrap(), cb.unit(&d, &dx).unwrap());
    for s in substs(&st.cat, &d, &g, &mut Budget::unlimited()).unwrap() {
        let ds = cb.subst(&dx, &gx, &s).unwrap();
        assert_eq!(ds.compose(&td), tg.compose(&s));
        for t in substs(&st.cat, &g, &d, &mut Budget::unlimited()).unwrap() {
            let dt = cb.subst(&gx, &dx, &t).unwrap();
            assert_eq!(cb.subst(&gx, &gx, &s.compose(&t)).unwrap(), ds.compose(&dt));
        }
    }
}

#[test]
fn products_over_walking_arrow() {
    let cat = Cat::walking_arrow();
    let a = adj(&cat, 1);
    let cb = Cobar::new(&a, 1, a.limit).unwrap();
    let st = &a.site;
    let x = Presheaf::constant(&st.cat, 2);
    let y = lift(st, &cat, &Presheaf { sizes: vec![2, 3], restr: vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 1]] });
    let (dx, dy) = (cb.context(&x).unwrap(), cb.context(&y).unwrap());
    let dxy = cb.context(&Presheaf::product(&st.cat, &x, &y)).unwrap();
    let (cmp, prod) = product_comparison(&cb, &x, &y, &dx, &dy, &dxy).unwrap();
    for c in st.cat.objects() {
        assert_eq!(dxy.psh().sizes[c], dx.psh().sizes[c] * dy.psh().sizes[c]);
    }
    assert!(cmp.is_bijective(dxy.psh(), &prod));
    cmp.validate(&st.cat, dxy.psh(), &prod).unwrap();
}

#[test]
fn paths_preserved_over_terminal() {
    let a = adj(&Cat::terminal(), 1);
    let cb = Cobar::new(&a, 1, a.limit).unwrap();
    let x = Presheaf::constant(&a.site.cat, 2);
    let dx = cb.context(&x).unwrap();
    let mut budget = Budget::unlimited();
    let (pc, target) = path_comparison(&cb, &x, &dx, &mut budget).unwrap();
    let xi = crate::psh::formers::paths(&a.site, &x, &mut budget).unwrap();
    let dxi = cb.context(&xi.carrier.psh).unwrap();
    assert!(pc.is_bijective(dxi.psh(), &target));
}

#[test]
fn types_and_elements() {
    let cat = Cat::walking_arrow();
    let a = adj(&cat, 1);
    let cb = Cobar::new(&a, 1, a.limit).unwrap();
    let st = &a.site;
    let g = Presheaf::terminal(&st.cat);
    let gx = cb.context(&g).unwrap();
    let ty = TyFam::constant(&st.cat, &g, 2);
    let dt = cb.ty(&g, &gx, &ty).unwrap();
    dt.ty.validate(&st.cat, gx.psh()).unwrap();
    // over the terminal context D_N A is D_N of the total space
    for c in st.cat.objects() {
        assert_eq!(dt.ty.fiber(c, 0), cb.context(&Presheaf::constant(&st.cat, 2)).unwrap().psh().sizes[c]);
    }
    for t in crate::psh::elems(&st.cat, &g, &ty, &mut Budget::unlimited()).unwrap() {
        let e = cb.elem(&gx, &dt, &ty, &t).unwrap();
        e.validate(&st.cat, gx.psh(), &dt.ty).unwrap();
    }
    let tau_a = cb.unit_ty(&g, &ty, &dt).unwrap();
    let tau = cb.unit(&g, &gx).unwrap();
    tau_a.validate(&st.cat, &ty.ext(&st.cat, &g), &dt.ty.subst(&st.cat, &tau).subst(&st.cat, &ty.proj())).unwrap();
}

fn discrete_instance(name: &str, cat: &Cat, d: usize, size: u32) -> CobarInstance {
    let st = site(cat, d, name);
    let g = Presheaf::terminal(&st.cat);
    let a = TyFam::constant(&st.cat, &g, size);
    let f = Elem { vals: st.cat.objects().map(|_| (0..size).collect()).collect() };
    CobarInstance { name: name.into(), site: st, gamma: g, a: a.clone(), b: a, f }
}

#[test]
fn properties_on_discrete_two() {
    let cfg = CobarConfig { n: 2, budget: 1 << 22, instances: vec![discrete_instance("discrete2", &Cat::terminal(), 1, 2)] };
    let rep = verify_cobar_properties(&cfg);
    assert!(rep.pass(), "{:?}", rep.failures);
    assert!(!rep.inconclusive(), "{:?}", rep.searches);
    assert!(rep.facts.iter().any(|f| f.key == "discrete2.tau.bijective" && f.value == "true"));
    for goal in ["discrete2: D f", "discrete2: U τ_A", "discrete2: τ_A", "discrete2: f"] {
        let s = rep.searches.iter().find(|s| s.goal == goal).unwrap();
        assert_eq!(s.outcome, crate::report::Outcome::Found, "{goal}");
    }
}

#[test]
fn h_set_on_discrete_three() {
    let cfg = CobarConfig { n: 1, budget: 1 << 22, instances: vec![discrete_instance("discrete3", &Cat::terminal(), 1, 3)] };
    let rep = verify_cobar_properties(&cfg);
    assert!(rep.pass(), "{:?}", rep.failures);
    // 2 stages × 9 endpoint pairs
    let hset = rep.checked;
    assert!(hset >= 18);
}

#[test]
fn refuted_map_stays_refuted() {
    let mut inst = discrete_instance("collapse", &Cat::terminal(), 1, 2);
    let st = inst.site.clone();
    inst.b = TyFam::constant(&st.cat, &inst.gamma, 1);
    inst.f = Elem { vals: st.cat.objects().map(|_| vec![0, 0]).collect() };
    let rep = verify_cobar_properties(&CobarConfig { n: 1, budget: 1 << 22, instances: vec![inst] });
    assert!(rep.pass(), "{:?}", rep.failures);
    let f = rep.searches.iter().find(|s| s.goal == "collapse: f").unwrap();
    assert_eq!(f.outcome, crate::report::Outcome::Refuted);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn random_presheaves_generate_compatible_elements(sa in 1u32..3, sb in 1u32..3, seed in 0u32..64) {
        let cat = Cat::walking_arrow();
        let a = adj(&cat, 0);
        let cb = Cobar::new(&a, 1, a.limit).unwrap();
        let f: Vec<u32> = (0..sb).map(|i| (seed >> i) % sa).collect();
        let g0 = Presheaf { sizes: vec![sa, sb], restr: vec![(0..sa).collect(), (0..sb).collect(), f] };
        let g = lift(&a.site, &cat, &g0);
        let gx = cb.context(&g).unwrap();
        for c in a.site.cat.objects() {
            prop_assert_eq!(gx.psh().sizes[c] as u64, brute_force_size(&cb, &gx.tower, c));
            for i in 0..gx.psh().sizes[c] {
                prop_assert!(cb.check_cobar_compat(&gx.tower, &gx.element(c, i)).is_ok());
            }
        }
        let tau = cb.unit(&g, &gx).unwrap();
        tau.validate(&a.site.cat, &g, gx.psh()).unwrap();
    }
}

#[test]
fn descent_data_over_terminal() {
    use crate::cwf::{check_descent_data, check_lex_stability, lex_of_pointed};
    use crate::psh::model::{DisplayLift, PshModel};
    let a = adj(&Cat::terminal(), 1);
    let st = a.site.clone();
    let cat = st.cat.clone();
    let one = Presheaf::terminal(&cat);
    let two = Presheaf::constant(&cat, 2);
    let roster = vec![
        (one.clone(), vec![TyFam::constant(&cat, &one, 2)]),
        (two.clone(), vec![TyFam::constant(&cat, &two, 1)]),
    ];
    let model = PshModel::new(cat.clone(), "discrete2").with_roster(roster.clone()).unwrap();
    let d = DisplayLift::new(&model, &model, CobarFunctor::new(Cobar::new(&a, 2, a.limit).unwrap()));
    let tau = TauPointing(&d.functor);
    let mut budget = Budget::new(1 << 24);
    let lex = lex_of_pointed(&model, &d, &tau, &mut budget).unwrap();
    assert!(check_lex_stability(&lex, &mut budget).unwrap().pass());
    let samples: Vec<(Presheaf, TyFam)> = roster.into_iter().map(|(g, ts)| (g, ts[0].clone())).collect();
    let mut search = |g: &Presheaf, x: &TyFam, y: &TyFam, f: &Elem, b: &mut Budget| {
        Ok(crate::fib::is_equiv_search(&st, g, x, y, f, b).outcome)
    };
    let rep = check_descent_data(&lex, &samples, &mut search, &mut budget).unwrap();
    assert!(rep.pass(), "{:?}", rep.failures);
    assert!(rep.searches.iter().all(|s| s.outcome == crate::report::Outcome::Found), "{:?}", rep.searches);
}
