use proptest::prelude::*;

use super::*;
use crate::cat::{grothendieck, Cat, InternalCategory};
use crate::cobar::Cobar;
use crate::psh::adjoint::Adjunction;

const LIMIT: u64 = 1 << 22;

fn site(cat: &Cat, d: usize) -> Site {
    grothendieck(&InternalCategory::constant(cat, d, "c").unwrap()).unwrap()
}

fn budget() -> Budget {
    Budget::new(LIMIT)
}

/// Over the walking arrow `f : a -> b` every morphism family is functorial.
fn arrow_family(st: &Site, g: &Presheaf, sizes: Vec<Vec<u32>>, f: Vec<Vec<u32>>) -> TyFam {
    let cat = &st.cat;
    let restr = cat
        .morphisms()
        .map(|m| if cat.is_id(m) { sizes[cat.dst(m)].iter().map(|&s| (0..s).collect()).collect() } else { f.clone() })
        .collect();
    let t = TyFam { sizes, restr };
    t.validate(cat, g).unwrap();
    t
}

fn arrow(st: &Site) -> Mor {
    st.cat.homs(st.object(0, 0).unwrap(), st.object(0, 1).unwrap())[0]
}

fn components(cat: &Cat, p: &Presheaf) -> u32 {
    let layout = crate::psh::Layout::new(p.sizes.iter().map(|&s| s as usize));
    let mut parent: Vec<usize> = (0..layout.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for m in cat.morphisms() {
        for r in 0..p.sizes[cat.dst(m)] {
            let (u, v) = (find(&mut parent, layout.at(cat.dst(m), r as usize)), find(&mut parent, layout.at(cat.src(m), p.act(m, r) as usize)));
            parent[u] = v;
        }
    }
    (0..layout.len()).filter(|&i| find(&mut parent, i) == i).count() as u32
}

#[test]
fn identity_representation_is_strict_yoneda() {
    let st = site(&Cat::walking_arrow(), 1);
    for x in st.cat.objects() {
        let rep = HomotopyRepresentation::identity(&st, x, &mut budget()).unwrap();
        let yx = Presheaf::yoneda(&st.cat, x);
        rep.validate(&st, &yx, &mut budget()).unwrap();
        for n in 1..=2 {
            let p = TyFam::constant(&st.cat, &yx, n);
            let ev = yoneda_eval(&st, &rep, &yx, &p, &mut budget()).unwrap();
            assert!(ev.map.is_bijective());
            for (u, &a) in ev.sections.iter().zip(&ev.map.values) {
                assert_eq!(*u, yoneda_section(&st, x, &p, a));
            }
        }
    }
}

#[test]
fn cobar_replacement_of_representable_over_terminal() {
    let adj = Adjunction::new(site(&Cat::terminal(), 1), LIMIT).unwrap();
    let st = &adj.site;
    let x = st.object(0, 0).unwrap();
    let yx = Presheaf::yoneda(&st.cat, x);
    let cb = Cobar::new(&adj, 1, LIMIT).unwrap();
    let cx = cb.context(&yx).unwrap();
    let delta_psh = cx.psh().clone();
    let tau = cb.unit(&yx, &cx).unwrap();
    let delta = tau.maps[x][identity_index(st, x) as usize];
    let rep = HomotopyRepresentation::new(st, &delta_psh, x, delta, &mut budget()).unwrap();
    rep.validate(st, &delta_psh, &mut budget()).unwrap();
    let p = TyFam::constant(&st.cat, &delta_psh, 2);
    let ev = yoneda_eval(st, &rep, &delta_psh, &p, &mut budget()).unwrap();
    // sections of a constant family are constant on components
    assert_eq!(ev.sections.len() as u32, 2u32.pow(components(&st.cat, &delta_psh)));
    assert_eq!(ev.map.target, 2);
    assert!(ev.map.is_bijective());
}

#[test]
fn singleton_family_gives_singletons() {
    let st = site(&Cat::walking_arrow(), 1);
    let x = st.object(1, 1).unwrap();
    let rep = HomotopyRepresentation::identity(&st, x, &mut budget()).unwrap();
    let yx = Presheaf::yoneda(&st.cat, x);
    let ev = yoneda_eval(&st, &rep, &yx, &TyFam::constant(&st.cat, &yx, 1), &mut budget()).unwrap();
    assert_eq!(ev.map, EvalMap { values: vec![0], target: 1 });
}

#[test]
fn non_equivalence_is_rejected() {
    let st = site(&Cat::walking_arrow(), 0);
    let x = st.object(0, 1).unwrap();
    let two = Presheaf::constant(&st.cat, 2);
    assert!(matches!(HomotopyRepresentation::new(&st, &two, x, 0, &mut budget()), Err(Error::InvalidStructure(_))));
    assert!(matches!(HomotopyRepresentation::new(&st, &two, x, 5, &mut budget()), Err(Error::IndexOutOfRange(_))));
}

/// A over yb with fibers those of `y f : ya -> yb`, over the walking arrow.
fn fiber_of_arrow(st: &Site) -> (Presheaf, TyFam) {
    let (a, b) = (st.object(0, 0).unwrap(), st.object(0, 1).unwrap());
    let yb = Presheaf::yoneda(&st.cat, b);
    let ya = Presheaf::yoneda(&st.cat, a);
    let f = Subst { maps: st.cat.objects().map(|c| st.cat.homs(c, a).iter().map(|&h| yb.act(h, yb.act(arrow(st), 0))).collect()).collect() };
    let fib = crate::psh::fibers(&st.cat, &ya, &yb, &f);
    (yb, fib.ty)
}

#[test]
fn weakened_terminal_reduces_to_yoneda() {
    let st = site(&Cat::terminal(), 1);
    let one = Presheaf::terminal(&st.cat);
    let x0 = st.object(0, 0).unwrap();
    let a = TyFam::weaken(&st.cat, &one, &Presheaf::yoneda(&st.cat, x0));
    let loc = find_local_representation(&st, &one, &a, &mut budget()).unwrap().unwrap();
    for c in st.cat.objects() {
        assert_eq!(loc.points[c][0].data(), (c, st.cat.id(c), 0));
    }
    let ga = a.ext(&st.cat, &one);
    let p = TyFam::constant(&st.cat, &ga, 2);
    for c in st.cat.objects() {
        let ev = pushforward_eval(&st, &loc.points[c][0], &one, &a, &p, c, 0, &mut budget()).unwrap();
        let rep = HomotopyRepresentation::identity(&st, c, &mut budget()).unwrap();
        let yc = Presheaf::yoneda(&st.cat, c);
        let y = yoneda_eval(&st, &rep, &yc, &TyFam::constant(&st.cat, &yc, 2), &mut budget()).unwrap();
        assert_eq!(ev.values.len(), y.sections.len());
        assert!(ev.is_bijective() && y.map.is_bijective());
    }
}

#[test]
fn fibers_of_a_representable_map_are_representable() {
    let st = site(&Cat::walking_arrow(), 0);
    let (yb, a) = fiber_of_arrow(&st);
    let loc = find_local_representation(&st, &yb, &a, &mut budget()).unwrap().unwrap();
    loc.validate(&st, &yb, &a, &mut budget()).unwrap();
    let (oa, ob) = (st.object(0, 0).unwrap(), st.object(0, 1).unwrap());
    // over b the representing object is a, reached along f
    assert_eq!(loc.points[ob][0].obj, oa);
    assert!(!st.cat.is_id(loc.points[ob][0].p));
    assert_eq!(loc.points[oa][0].obj, oa);
    let ga = a.ext(&st.cat, &yb);
    for n in 1..=3 {
        let p = TyFam::constant(&st.cat, &ga, n);
        let evals = pushforward_evals(&st, &loc, &yb, &a, &p, &mut budget()).unwrap();
        for row in &evals {
            for ev in row {
                assert_eq!(ev.target, n);
                assert!(ev.is_bijective());
            }
        }
    }
}

#[test]
fn representation_found_with_cube_stages() {
    let st = site(&Cat::walking_arrow(), 1);
    let (yb, a) = fiber_of_arrow(&st);
    let loc = find_local_representation(&st, &yb, &a, &mut budget()).unwrap().unwrap();
    loc.validate(&st, &yb, &a, &mut budget()).unwrap();
    // a point at stage [1] is represented at stage [1]
    let ob1 = st.object(1, 1).unwrap();
    assert_eq!(st.stage(loc.points[ob1][0].obj), 1);
    let two = Presheaf::constant(&st.cat, 2);
    assert!(matches!(HomotopyRepresentation::new(&st, &two, ob1, 0, &mut budget()), Err(Error::InvalidStructure(_))));
}

#[test]
fn constant_singleton_pushforward() {
    let st = site(&Cat::walking_arrow(), 0);
    let (yb, a) = fiber_of_arrow(&st);
    let loc = find_local_representation(&st, &yb, &a, &mut budget()).unwrap().unwrap();
    let p = TyFam::constant(&st.cat, &a.ext(&st.cat, &yb), 1);
    for c in st.cat.objects() {
        for g in 0..yb.sizes[c] {
            assert_eq!(pushforward_eval(&st, &loc.points[c][g as usize], &yb, &a, &p, c, g, &mut budget()).unwrap(), EvalMap { values: vec![0], target: 1 });
        }
    }
}

/// `σ⁺ : Δ.Aσ -> Γ.A`.
fn lift_subst(st: &Site, delta: &Presheaf, a: &TyFam, sigma: &Subst) -> Subst {
    let asig = a.subst(&st.cat, sigma);
    let (cs, ca) = (ExtCode::new(&asig), ExtCode::new(a));
    let dext = asig.ext(&st.cat, delta);
    Subst {
        maps: st
            .cat
            .objects()
            .map(|c| {
                (0..dext.sizes[c])
                    .map(|e| {
                        let (d, u) = cs.dec(c, e);
                        ca.enc(c, sigma.maps[c][d as usize], u)
                    })
                    .collect()
            })
            .collect(),
    }
}

fn check_naturality(st: &Site, g: &Presheaf, a: &TyFam, p: &TyFam, delta: &Presheaf, sigma: &Subst) {
    let cat = &st.cat;
    let loc = find_local_representation(st, g, a, &mut budget()).unwrap().unwrap();
    let asig = a.subst(cat, sigma);
    let moved = loc.subst(sigma);
    moved.validate(st, delta, &asig, &mut budget()).unwrap();
    let psig = p.subst(cat, &lift_subst(st, delta, a, sigma));
    let here = pushforward_evals(st, &moved, delta, &asig, &psig, &mut budget()).unwrap();
    let there = pushforward_evals(st, &loc, g, a, p, &mut budget()).unwrap();
    let pi_here = pi_type(cat, delta, &asig, &psig, &mut budget()).unwrap();
    let pi_there = pi_type(cat, g, a, p, &mut budget()).unwrap();
    for c in cat.objects() {
        for d in 0..delta.sizes[c] {
            let sd = sigma.maps[c][d as usize] as usize;
            assert_eq!(moved.points[c][d as usize].data(), loc.points[c][sd].data());
            // restriction then evaluation agrees with evaluation at σδ
            let (fh, ft) = (&pi_here.fibers[c][d as usize], &pi_there.fibers[c][sd]);
            assert_eq!(fh.domain, ft.domain);
            assert_eq!(fh.members, ft.members);
            assert_eq!(here[c][d as usize], there[c][sd]);
        }
    }
}

#[test]
fn pushforward_is_natural_along_the_arrow() {
    let st = site(&Cat::walking_arrow(), 0);
    let (yb, a) = fiber_of_arrow(&st);
    let oa = st.object(0, 0).unwrap();
    let ya = Presheaf::yoneda(&st.cat, oa);
    let sigma = representing_map(&st, &yb, oa, yb.act(arrow(&st), 0));
    sigma.validate(&st.cat, &ya, &yb).unwrap();
    let ga = a.ext(&st.cat, &yb);
    let fsz = ga.sizes[st.object(0, 1).unwrap()] as usize;
    let p = arrow_family(&st, &ga, ga.sizes.iter().map(|&s| vec![3; s as usize]).collect(), vec![vec![2, 0, 1]; fsz]);
    check_naturality(&st, &yb, &a, &p, &ya, &sigma);
}

#[test]
fn projectivity_with_singleton_fibers() {
    let st = site(&Cat::walking_arrow(), 0);
    let (yb, a) = fiber_of_arrow(&st);
    let loc = find_local_representation(&st, &yb, &a, &mut budget()).unwrap().unwrap();
    let p = TyFam::constant(&st.cat, &a.ext(&st.cat, &yb), 1);
    let rep = projectivity_check(&st, &loc, &yb, &a, &p, &mut budget()).unwrap();
    assert!(rep.pass(), "{:?}", rep.failures);
}

#[test]
fn projectivity_at_one_point_agrees_with_brute_force() {
    let st = site(&Cat::walking_arrow(), 0);
    let (yb, a) = fiber_of_arrow(&st);
    let ob = st.object(0, 1).unwrap();
    let loc = find_local_representation(&st, &yb, &a, &mut budget()).unwrap().unwrap();
    let pt = LocalPoint::certify(&st, &yb, &a, ob, 0, loc.points[ob][0].data(), &mut budget()).unwrap();
    let ga = a.ext(&st.cat, &yb);
    let p = TyFam::constant(&st.cat, &ga, 2);
    let rep = projectivity_at(&st, &pt, &yb, &a, &p, ob, 0, &mut budget()).unwrap();
    assert!(rep.pass(), "{:?}", rep.failures);
    let pi = pi_type(&st.cat, &yb, &a, &p, &mut budget()).unwrap();
    assert!(!pi.fibers[ob][0].members.is_empty());
}

#[test]
fn projectivity_reports_empty_fibers() {
    let st = site(&Cat::walking_arrow(), 0);
    let (yb, a) = fiber_of_arrow(&st);
    let loc = find_local_representation(&st, &yb, &a, &mut budget()).unwrap().unwrap();
    let p = TyFam::constant(&st.cat, &a.ext(&st.cat, &yb), 0);
    let rep = projectivity_check(&st, &loc, &yb, &a, &p, &mut budget()).unwrap();
    assert!(!rep.pass());
    assert_eq!(rep.failures[0].equation, "inhabited");
}

/// A(b) = {0, 1} collapsing to A(a) = {0}; P singleton over each point of b but with
/// the two restrictions landing on different points of P(a, 0).
#[test]
fn non_representable_type_breaks_projectivity() {
    let st = site(&Cat::walking_arrow(), 0);
    let cat = &st.cat;
    let one = Presheaf::terminal(cat);
    let a = arrow_family(&st, &one, vec![vec![1], vec![2]], vec![vec![0, 0]]);
    assert!(find_local_representation(&st, &one, &a, &mut budget()).unwrap().is_none());
    let ga = a.ext(cat, &one);
    let code = ExtCode::new(&a);
    let (oa, ob) = (st.object(0, 0).unwrap(), st.object(0, 1).unwrap());
    let mut sizes = vec![vec![0; ga.sizes[oa] as usize], vec![0; ga.sizes[ob] as usize]];
    sizes[oa][code.enc(oa, 0, 0) as usize] = 2;
    for u in 0..2 {
        sizes[ob][code.enc(ob, 0, u) as usize] = 1;
    }
    let mut f = vec![vec![]; ga.sizes[ob] as usize];
    for u in 0..2 {
        f[code.enc(ob, 0, u) as usize] = vec![u];
    }
    let p = arrow_family(&st, &ga, sizes, f);
    assert!(p.sizes.iter().flatten().all(|&s| s > 0));
    // brute force: a family over (id_b, 0), (id_b, 1), (f, 0) must agree on (f, 0)
    let mut natural = 0;
    for u0 in 0..p.fiber(ob, code.enc(ob, 0, 0)) {
        for u1 in 0..p.fiber(ob, code.enc(ob, 0, 1)) {
            let (r0, r1) = (p.act(arrow(&st), code.enc(ob, 0, 0), u0), p.act(arrow(&st), code.enc(ob, 0, 1), u1));
            natural += (r0 == r1) as u32;
        }
    }
    assert_eq!(natural, 0);
    let pi = pi_type(cat, &one, &a, &p, &mut budget()).unwrap();
    assert_eq!(pi.ty.sizes[ob], vec![0]);
    assert!(first_elem(cat, &one, &pi.ty, &mut budget()).unwrap().is_none());
}

#[test]
fn tight_budget_is_inconclusive() {
    let st = site(&Cat::walking_arrow(), 1);
    let x = st.object(1, 1).unwrap();
    let r = HomotopyRepresentation::identity(&st, x, &mut Budget::new(1));
    assert!(matches!(r, Err(Error::SearchInconclusive(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn yoneda_eval_bijective_on_random_families(fa in 1u32..4, fb in 1u32..4, seed in prop::collection::vec(0u32..16, 3)) {
        let st = site(&Cat::walking_arrow(), 0);
        let ob = st.object(0, 1).unwrap();
        let yb = Presheaf::yoneda(&st.cat, ob);
        // yb is terminal, so a family over it has one fiber per object
        let f = vec![(0..fb).map(|i| seed[i as usize] % fa).collect()];
        let p = arrow_family(&st, &yb, vec![vec![fa], vec![fb]], f);
        let rep = HomotopyRepresentation::identity(&st, ob, &mut budget()).unwrap();
        let ev = yoneda_eval(&st, &rep, &yb, &p, &mut budget()).unwrap();
        prop_assert!(ev.map.is_bijective());
        for (u, &a) in ev.sections.iter().zip(&ev.map.values) {
            prop_assert_eq!(u, &yoneda_section(&st, ob, &p, a));
        }
    }

    #[test]
    fn pushforward_naturality_on_random_families(sizes in prop::collection::vec(1u32..4, 2), seed in prop::collection::vec(0u32..16, 4)) {
        let st = site(&Cat::walking_arrow(), 0);
        let (yb, a) = fiber_of_arrow(&st);
        let oa = st.object(0, 0).unwrap();
        let ya = Presheaf::yoneda(&st.cat, oa);
        let sigma = representing_map(&st, &yb, oa, yb.act(arrow(&st), 0));
        let ga = a.ext(&st.cat, &yb);
        let psizes: Vec<Vec<u32>> = ga.sizes.iter().enumerate().map(|(c, &s)| vec![sizes[c]; s as usize]).collect();
        let fsz = ga.sizes[st.object(0, 1).unwrap()] as usize;
        let f = (0..fsz).map(|_| (0..sizes[1]).map(|i| seed[i as usize] % sizes[0]).collect()).collect();
        let p = arrow_family(&st, &ga, psizes, f);
        check_naturality(&st, &yb, &a, &p, &ya, &sigma);
    }
}

