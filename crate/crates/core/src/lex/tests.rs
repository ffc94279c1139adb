use proptest::prelude::*;

use super::*;
use crate::cat::{grothendieck, Cat, InternalCategory};
use crate::cobar::{Cobar, CobarFunctor};
use crate::psh::adjoint::Adjunction;
use crate::report::Outcome;

const LIMIT: u64 = 1 << 24;

fn site(cat: &Cat, d: usize) -> Site {
    grothendieck(&InternalCategory::constant(cat, d, "c").unwrap()).unwrap()
}

fn ops(d: usize) -> Vec<BaseLexOp> {
    vec![BaseLexOp::Identity, BaseLexOp::Open(OpenModality::constant(true, d)), BaseLexOp::Open(OpenModality::constant(false, d))]
}

/// A presheaf over ∫C pulled back from one over C.
fn lift(site: &Site, g: &Presheaf) -> Presheaf {
    let p = Presheaf {
        sizes: site.cat.objects().map(|c| g.sizes[site.point(c)]).collect(),
        restr: site.cat.morphisms().map(|m| g.restr[site.arrow_part(m)].clone()).collect(),
    };
    p.validate(&site.cat).unwrap();
    p
}

fn arrow_psh() -> Presheaf {
    // Γ(a) = {0, 1}, Γ(b) = {0, 1, 2}, restriction 0,1,2 ↦ 0,1,1
    Presheaf { sizes: vec![2, 3], restr: vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 1]] }
}

#[test]
fn identity_lift_is_identity() {
    let st = site(&Cat::walking_arrow(), 1);
    let t = lift_lex(&BaseLexOp::Identity, &st, LIMIT).unwrap();
    assert!(t.report.pass());
    let g = lift(&st, &arrow_psh());
    assert_eq!(t.global.obj(&g).unwrap(), g);
    assert_eq!(t.global.unit(&g).unwrap(), Subst::identity(&g));
    let a = TyFam::constant(&st.cat, &g, 2);
    let (bar, theta) = t.global.unit_ty(&g, &a).unwrap();
    assert_eq!(bar, a);
    assert_eq!(theta, a.generic());
}

#[test]
fn open_top_is_identity_up_to_iso() {
    for ic in [InternalCategory::constant(&Cat::walking_arrow(), 1, "arrow").unwrap(), InternalCategory::codiscrete_interval(1).unwrap()] {
        let st = grothendieck(&ic).unwrap();
        let t = lift_lex(&BaseLexOp::Open(OpenModality::constant(true, 1)), &st, LIMIT).unwrap();
        assert!(t.report.pass(), "{:?}", t.report.failures);
        for g in default_contexts(&st.cat) {
            let tg = t.global.obj(&g).unwrap();
            let theta = t.global.unit(&g).unwrap();
            theta.validate(&st.cat, &g, &tg).unwrap();
            assert!(theta.is_bijective(&g, &tg));
        }
    }
}

#[test]
fn open_bottom_gives_singletons() {
    for ic in [InternalCategory::constant(&Cat::walking_arrow(), 1, "arrow").unwrap(), InternalCategory::codiscrete_interval(1).unwrap()] {
        let st = grothendieck(&ic).unwrap();
        let t = lift_lex(&BaseLexOp::Open(OpenModality::constant(false, 1)), &st, LIMIT).unwrap();
        for g in default_contexts(&st.cat) {
            // one family on the empty domain at every object
            assert!(t.global.obj(&g).unwrap().sizes.iter().all(|&s| s == 1));
            for a in default_types(&st.cat, &g).unwrap() {
                assert!(t.global.ty(&g, &a).unwrap().ty.sizes.iter().flatten().all(|&s| s == 1));
            }
        }
    }
}

#[test]
fn lifted_contexts_are_presheaves_over_non_constant_category() {
    let ic = InternalCategory::codiscrete_interval(1).unwrap();
    let st = grothendieck(&ic).unwrap();
    for op in ops(1) {
        let t = lift_lex(&op, &st, LIMIT).unwrap();
        assert!(t.report.pass(), "{op}: {:?}", t.report.failures);
        assert!(t.report.checked > 0);
        for g in default_contexts(&st.cat) {
            let tg = t.global.obj(&g).unwrap();
            tg.validate(&st.cat).unwrap();
            t.global.unit(&g).unwrap().validate(&st.cat, &g, &tg).unwrap();
        }
    }
}

#[test]
fn products_are_preserved() {
    let st = site(&Cat::terminal(), 1);
    let cat = &st.cat;
    let (x, y) = (Presheaf::constant(cat, 2), Presheaf::constant(cat, 3));
    for op in ops(1) {
        let t = SiteLexOp::new(st.clone(), op.clone(), LIMIT).unwrap();
        let rep = check_lex_preservation(&t, &x, &y).unwrap();
        assert!(rep.pass(), "{op}: {:?}", rep.failures);
        let (tx, ty, txy) = (t.obj(&x).unwrap(), t.obj(&y).unwrap(), t.obj(&Presheaf::product(cat, &x, &y)).unwrap());
        for c in cat.objects() {
            assert_eq!(txy.sizes[c], tx.sizes[c] * ty.sizes[c], "{op}");
        }
    }
}

#[test]
fn names_and_subterminal_guard() {
    assert_eq!(parse_lex_op("identity", 1).unwrap(), BaseLexOp::Identity);
    let top = parse_lex_op("open:top", 2).unwrap();
    assert_eq!(top, BaseLexOp::Open(OpenModality::constant(true, 2)));
    assert_eq!(top.to_string(), "open:top");
    assert_eq!(parse_lex_op("open:bot", 1).unwrap().to_string(), "open:bot");
    assert!(matches!(parse_lex_op("open:i0=1", 1), Err(Error::NotSubterminal(_))));
    assert!(matches!(parse_lex_op("open:zz", 1), Err(Error::InvalidStructure(_))));
    assert!(matches!(parse_lex_op("sheafify", 1), Err(Error::InvalidStructure(_))));
    let cube = crate::cat::box_category(1).unwrap();
    assert!(matches!(OpenModality::new(&cube, &[1, 2]), Err(Error::NotSubterminal(_))));
    assert!(matches!(OpenModality::new(&cube, &[0, 1]), Err(Error::InvalidStructure(_))));
    assert!(OpenModality::new(&cube, &[1, 1]).is_ok());
}

#[test]
fn open_modality_descent_certificates() {
    for op in ops(1).into_iter().skip(1) {
        let rep = certify_descent(&op, 1, &[1, 2], LIMIT).unwrap();
        assert!(rep.pass(), "{op}: {:?}", rep.failures);
        assert!(rep.searches.iter().all(|s| s.outcome == Outcome::Found), "{op}: {:?}", rep.searches);
    }
}

#[test]
fn unit_at_bottom_is_refuted_on_two() {
    let st = site(&Cat::terminal(), 1);
    let t = SiteLexOp::new(st.clone(), BaseLexOp::Open(OpenModality::constant(false, 1)), LIMIT).unwrap();
    let g = Presheaf::terminal(&st.cat);
    let a = TyFam::constant(&st.cat, &g, 2);
    let (bar, theta) = t.unit_ty(&g, &a).unwrap();
    assert!(bar.sizes.iter().flatten().all(|&s| s == 1));
    let v = is_equiv_search(&st, &g, &a, &bar, &theta, &mut Budget::new(LIMIT));
    assert_eq!(v.outcome, Outcome::Refuted);
}

fn with_dt<R>(cat: &Cat, d: usize, n: usize, op: &BaseLexOp, body: impl FnOnce(&CompositeDT) -> R) -> R {
    let st = site(cat, d);
    let adj = Adjunction::new(st.clone(), LIMIT).unwrap();
    let df = CobarFunctor::new(Cobar::new(&adj, n, LIMIT).unwrap());
    let t = lift_lex(op, &st, LIMIT).unwrap();
    let dt = composite_dt(&t, &df).unwrap();
    body(&dt)
}

#[test]
fn identity_composite_is_cobar() {
    with_dt(&Cat::terminal(), 1, 1, &BaseLexOp::Identity, |dt| {
        let cat = dt.site().cat.clone();
        for g in [Presheaf::terminal(&cat), Presheaf::constant(&cat, 2)] {
            let tau = dt.d.cobar.unit(&g, &*dt.d.context(&g).unwrap()).unwrap();
            assert_eq!(dt.pi(&g).unwrap(), tau);
            let a = TyFam::constant(&cat, &g, 2);
            let u = dt.units(&g, &a).unwrap();
            assert_eq!(u.pi, u.tau);
            assert_eq!(u.dt_bar, u.d_bar);
        }
    });
}

#[test]
fn pi_agrees_both_ways_on_twenty_instances() {
    let mut count = 0;
    for op in ops(1) {
        with_dt(&Cat::terminal(), 1, 1, &op, |dt| {
            let cat = dt.site().cat.clone();
            let samples: Vec<(Presheaf, Vec<TyFam>)> = (1..=2)
                .map(|n| {
                    let g = Presheaf::constant(&cat, n);
                    let tys = (1..=3).map(|k| TyFam::constant(&cat, &g, k)).collect();
                    (g, tys)
                })
                .collect();
            let rep = check_pi_two_ways(dt, &samples).unwrap();
            assert!(rep.pass(), "{op}: {:?}", rep.failures);
            count += rep.checked;
        });
    }
    assert!(count >= 20, "{count}");
}

#[test]
fn pi_agrees_both_ways_over_walking_arrow() {
    let cat = Cat::walking_arrow();
    with_dt(&cat, 0, 1, &BaseLexOp::Open(OpenModality::constant(true, 0)), |dt| {
        let st = dt.site().clone();
        let g = lift(&st, &arrow_psh());
        let a = TyFam::constant(&st.cat, &g, 2);
        let rep = check_pi_two_ways(dt, &[(g, vec![a])]).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures);
    });
}

fn searches(rep: &Report) -> Vec<Outcome> {
    rep.searches.iter().map(|s| s.outcome).collect()
}

#[test]
fn modal_characterization_examples() {
    let cat = Cat::terminal();
    with_dt(&cat, 1, 1, &BaseLexOp::Identity, |dt| {
        let g = Presheaf::terminal(&dt.site().cat);
        for n in [1, 2] {
            let rep = check_modal_characterization(dt, &g, &TyFam::constant(&dt.site().cat, &g, n), LIMIT).unwrap();
            assert!(rep.pass(), "{:?}", rep.failures);
            assert_eq!(searches(&rep), vec![Outcome::Found; 3]);
        }
    });
    with_dt(&cat, 1, 1, &BaseLexOp::Open(OpenModality::constant(false, 1)), |dt| {
        let g = Presheaf::terminal(&dt.site().cat);
        let rep = check_modal_characterization(dt, &g, &TyFam::constant(&dt.site().cat, &g, 2), LIMIT).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures);
        assert_eq!(searches(&rep), vec![Outcome::Refuted, Outcome::Found, Outcome::Refuted]);
        let one = check_modal_characterization(dt, &g, &TyFam::constant(&dt.site().cat, &g, 1), LIMIT).unwrap();
        assert_eq!(searches(&one), vec![Outcome::Found; 3]);
    });
}

#[test]
fn modal_characterization_needs_a_definite_budget() {
    with_dt(&Cat::terminal(), 1, 1, &BaseLexOp::Identity, |dt| {
        let g = Presheaf::terminal(&dt.site().cat);
        let r = check_modal_characterization(dt, &g, &TyFam::constant(&dt.site().cat, &g, 2), 1);
        assert!(matches!(r, Err(Error::SearchInconclusive(_))));
    });
}

/// Whether f hits every element of B at every object, read off the values directly.
fn stagewise_surjective(cat: &Cat, g: &Presheaf, a: &TyFam, b: &TyFam, f: &Elem) -> bool {
    let ca = crate::psh::ExtCode::new(a);
    cat.objects().all(|c| {
        (0..g.sizes[c]).all(|rho| {
            (0..b.fiber(c, rho)).all(|y| (0..a.fiber(c, rho)).any(|u| f.vals[c][ca.enc(c, rho, u) as usize] == y))
        })
    })
}

fn fact<'r>(rep: &'r Report, key: &str) -> &'r str {
    &rep.facts.iter().find(|f| f.key == key).unwrap().value
}

#[test]
fn surjections_over_terminal() {
    with_dt(&Cat::terminal(), 1, 1, &BaseLexOp::Identity, |dt| {
        let cat = dt.site().cat.clone();
        let g = Presheaf::terminal(&cat);
        let (one, two) = (TyFam::constant(&cat, &g, 1), TyFam::constant(&cat, &g, 2));
        let id = Elem { vals: cat.objects().map(|_| vec![0, 1]).collect() };
        let rep = check_surjections_levelwise(dt, &g, &two, &two, &id, LIMIT).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures);
        assert_eq!((fact(&rep, "global"), fact(&rep, "levelwise")), ("true", "true"));
        assert_eq!(fact(&rep, "A.modal"), "Found");
        let incl = Elem { vals: cat.objects().map(|_| vec![0]).collect() };
        let rep = check_surjections_levelwise(dt, &g, &one, &two, &incl, LIMIT).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures);
        assert_eq!((fact(&rep, "global"), fact(&rep, "levelwise")), ("false", "false"));
        assert!(!stagewise_surjective(&cat, &g, &one, &two, &incl));
    });
}

#[test]
fn stagewise_surjection_over_walking_arrow() {
    let cat = Cat::walking_arrow();
    with_dt(&cat, 1, 1, &BaseLexOp::Identity, |dt| {
        let st = dt.site().clone();
        let g = Presheaf::terminal(&st.cat);
        let total = lift(&st, &arrow_psh());
        let a = TyFam::weaken(&st.cat, &g, &total);
        let b = TyFam::constant(&st.cat, &g, 2);
        // at a: identity; at b: 0,1,2 ↦ 0,1,1
        let f = Elem { vals: st.cat.objects().map(|c| if st.point(c) == 0 { vec![0, 1] } else { vec![0, 1, 1] }).collect() };
        f.validate(&st.cat, &a.ext(&st.cat, &g), &b.subst(&st.cat, &a.proj())).unwrap();
        assert!(stagewise_surjective(&st.cat, &g, &a, &b, &f));
        let rep = check_surjections_levelwise(dt, &g, &a, &b, &f, LIMIT).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures);
        assert_eq!((fact(&rep, "global"), fact(&rep, "levelwise")), ("true", "true"));
    });
}

#[test]
fn truncation_examples() {
    let cat = Cat::walking_arrow();
    let st = site(&cat, 1);
    let g = Presheaf::terminal(&st.cat);
    let inhabited = TyFam::weaken(&st.cat, &g, &lift(&st, &arrow_psh()));
    let rep = check_truncation_levelwise(&st, &g, &inhabited, LIMIT).unwrap();
    assert!(rep.pass());
    assert_eq!(fact(&rep, "global"), "true");
    // empty over b only
    let partial = Presheaf { sizes: vec![1, 0], restr: vec![vec![0], vec![], vec![]] };
    let ty = TyFam::weaken(&st.cat, &g, &lift(&st, &partial));
    let rep = check_truncation_levelwise(&st, &g, &ty, LIMIT).unwrap();
    assert!(rep.pass());
    assert_eq!(fact(&rep, "levelwise"), "false");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lift_commutes_with_u_on_random_presheaves(sa in 1u32..3, sb in 1u32..4, seed in 0u32..64, top in any::<bool>()) {
        let cat = Cat::walking_arrow();
        let st = site(&cat, 1);
        let r: Vec<u32> = (0..sb).map(|i| (seed >> i) % sa).collect();
        let g0 = Presheaf { sizes: vec![sa, sb], restr: vec![(0..sa).collect(), (0..sb).collect(), r] };
        let g = lift(&st, &g0);
        let global = SiteLexOp::new(st.clone(), BaseLexOp::Open(OpenModality::constant(top, 1)), LIMIT).unwrap();
        let levelwise = SiteLexOp::new(global.lvl.clone(), global.op.clone(), LIMIT).unwrap();
        let tys = vec![TyFam::constant(&st.cat, &g, 2)];
        let rep = check_u_strict(&global, &levelwise, &[(g.clone(), tys)]).unwrap();
        prop_assert!(rep.pass(), "{:?}", rep.failures);
        let theta = global.unit(&g).unwrap();
        theta.validate(&st.cat, &g, &global.obj(&g).unwrap()).unwrap();
    }

    #[test]
    fn truncation_is_levelwise(sizes in proptest::collection::vec(0u32..3, 2)) {
        let cat = Cat::walking_arrow();
        let st = site(&cat, 1);
        let g = Presheaf::terminal(&st.cat);
        // a constant-over-b presheaf restricts b into a only when a is inhabited
        let (na, nb) = (sizes[0], if sizes[0] == 0 { 0 } else { sizes[1] });
        let p = Presheaf { sizes: vec![na, nb], restr: vec![(0..na).collect(), (0..nb).collect(), vec![0; nb as usize]] };
        let ty = TyFam::weaken(&st.cat, &g, &lift(&st, &p));
        let rep = check_truncation_levelwise(&st, &g, &ty, LIMIT).unwrap();
        prop_assert!(rep.pass());
        let expected = na > 0 && nb > 0;
        prop_assert_eq!(fact(&rep, "global"), if expected { "true" } else { "false" });
    }
}
