use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::duality::builtin_stage;
use super::groebner::standard_monomials;
use super::poly::divides;
use super::*;
use crate::error::Error;
use crate::psh::TyFam;
use crate::report::Budget;

fn budget() -> Budget {
    Budget::new(1 << 22)
}

fn ring(p: u32, vars: &[&str]) -> PolyRing {
    PolyRing::new(p, vars.iter().map(|s| s.to_string()).collect()).unwrap()
}

fn poly(r: &PolyRing, s: &str) -> Poly {
    r.parse(s, 1).unwrap()
}

fn stage(name: &str) -> Arc<PresentedAlgebra> {
    Arc::new(builtin_stage(name).unwrap().unwrap())
}

fn f2() -> Arc<PresentedAlgebra> {
    stage("f2")
}

fn idem(base: &PresentedAlgebra) -> Presentation {
    Presentation::new(base, &["x"], &["x^2 = x"]).unwrap()
}

fn artin_schreier(base: &PresentedAlgebra) -> Presentation {
    Presentation::new(base, &["x"], &["x^2 = x + 1"]).unwrap()
}

fn fact(rep: &crate::report::Report, key: &str) -> String {
    rep.facts.iter().find(|f| f.key == key).map(|f| f.value.clone()).unwrap_or_else(|| panic!("no fact {key}"))
}

/// Rewrites with a randomly chosen reducible term and reducer until irreducible.
fn rewrite_randomly(r: &PolyRing, basis: &[Poly], f: &Poly, rng: &mut ChaCha8Rng) -> Poly {
    let mut f = f.clone();
    loop {
        let mut moves = Vec::new();
        for (m, c) in &f.terms {
            for g in basis {
                if divides(&g.terms[0].0, m) {
                    moves.push((m.clone(), *c, g.clone()));
                }
            }
        }
        let Some((m, c, g)) = moves.choose(rng).cloned() else { return f };
        let q: Vec<u16> = m.iter().zip(&g.terms[0].0).map(|(a, b)| a - b).collect();
        f = r.sub(&f, &r.shift(&g, &q, c * r.inv(g.terms[0].1) % r.p));
    }
}

fn random_poly(r: &PolyRing, deg: u16, rng: &mut ChaCha8Rng) -> Poly {
    let mut f = Poly::zero();
    for _ in 0..rng.gen_range(0..6) {
        let m: Vec<u16> = (0..r.nvars()).map(|_| rng.gen_range(0..=deg)).collect();
        f = r.add(&f, &r.monomial(m, rng.gen_range(1..r.p)));
    }
    f
}

#[test]
fn frobenius_squares_a_sum() {
    let r = ring(2, &["x"]);
    assert_eq!(r.pow(&poly(&r, "x + 1"), 2), poly(&r, "x^2 + 1"));
    assert_eq!(r.display(&poly(&r, "(x+1)(x+1)")), "x^2 + 1");
}

#[test]
fn single_reduction_step() {
    let r = ring(2, &["x"]);
    let basis = groebner_basis(&r, &[poly(&r, "x^2 + x")]);
    assert_eq!(normal_form(&r, &basis, &poly(&r, "x^2")), poly(&r, "x"));
    assert!(normal_form(&r, &basis, &Poly::zero()).is_zero());
}

#[test]
fn membership_with_explicit_cofactor() {
    let r = ring(2, &["x"]);
    let g = poly(&r, "x^2 + x");
    let f = poly(&r, "x^4 + x");
    assert_eq!(r.mul(&g, &poly(&r, "x^2 + x + 1")), f);
    let basis = groebner_basis(&r, &[g]);
    assert!(is_member(&r, &basis, &f));
    assert!(!is_member(&r, &basis, &poly(&r, "x^3 + 1 + x")));
}

#[test]
fn basis_of_a_non_principal_ideal() {
    let r = ring(3, &["x", "y"]);
    let gens = [poly(&r, "x*y - 1"), poly(&r, "y^2 - x")];
    let basis = groebner_basis(&r, &gens);
    for g in &gens {
        assert!(is_member(&r, &basis, g));
    }
    // y^3 = xy = 1 and x = y^2, so the quotient is F3[y]/(y^3 - 1)
    assert_eq!(standard_monomials(&r, &basis).unwrap().len(), 3);
    for (i, g) in basis.iter().enumerate() {
        for (j, h) in basis.iter().enumerate() {
            if i != j {
                assert!(h.terms.iter().all(|(m, _)| !divides(&g.terms[0].0, m)));
            }
        }
    }
}

#[test]
fn random_order_rewriting_is_confluent() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, rels) in [(2, vec!["x^2 + x", "y^2 + y", "x*y + x"]), (3, vec!["x^2 - 1", "y^2 - x*y"]), (3, vec!["x^3 - y", "y^2 + x*y - 1"])] {
        let r = ring(p, &["x", "y"]);
        let basis = groebner_basis(&r, &rels.iter().map(|s| poly(&r, s)).collect::<Vec<_>>());
        for _ in 0..200 {
            let f = random_poly(&r, 5, &mut rng);
            let nf = normal_form(&r, &basis, &f);
            for _ in 0..3 {
                assert_eq!(rewrite_randomly(&r, &basis, &f, &mut rng), nf, "f = {}", r.display(&f));
            }
        }
    }
}

#[test]
fn carrier_sizes() {
    let a = f2();
    assert_eq!(presented_algebra(&a, &idem(&a)).unwrap().size().unwrap(), 4);
    assert_eq!(stage("f4").size().unwrap(), 4);
    assert_eq!(stage("f2xy").size().unwrap(), 16);
    assert_eq!(stage("f3").size().unwrap(), 3);
    let same = presented_algebra(&a, &Presentation::empty(&a)).unwrap();
    assert_eq!(same.size().unwrap(), 2);
    assert_eq!(same.coprojection(), AlgebraHom::identity(&a));
    let free = presented_algebra(&a, &Presentation::new(&a, &["x"], &[]).unwrap()).unwrap();
    assert!(matches!(free.size(), Err(Error::InfiniteCarrier(_))));
    assert!(matches!(free.elements(), Err(Error::InfiniteCarrier(_))));
}

#[test]
fn element_indices_round_trip() {
    for name in ["f2", "f3", "f4", "f2e", "f2xy"] {
        let s = stage(name);
        let elems = s.elements().unwrap();
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(s.index(e).unwrap() as usize, i);
            assert_eq!(s.nf(e), *e);
        }
    }
}

#[test]
fn hom_counts_match_root_counts() {
    let a = f2();
    let plus_one = |s: &PresentedAlgebra, b: &Poly| s.add(b, &s.ring.constant(1));
    let rhs_of: [&dyn Fn(&PresentedAlgebra, &Poly) -> Poly; 2] = [&|_, b| b.clone(), &plus_one];
    for (u, rhs) in [idem(&a), artin_schreier(&a)].into_iter().zip(rhs_of) {
        let alg = presented_algebra(&a, &u).unwrap();
        for name in ["f2", "f3", "f4", "f2y", "f2e", "f2xy"] {
            let b = stage(name);
            let roots = if b.ring.p == 2 { b.elements().unwrap().iter().filter(|e| b.mul(e, e) == rhs(&b, e)).count() } else { 0 };
            assert_eq!(hom_enum(&alg, &b).unwrap().len(), roots, "{} -> {name}", alg.name);
        }
    }
    assert_eq!(hom_enum(&stage("f4"), &a).unwrap().len(), 0);
    for name in ["f2", "f4", "f2y", "f2xy"] {
        assert_eq!(hom_enum(&a, &stage(name)).unwrap().len(), 1);
    }
}

#[test]
fn homs_out_of_a_polynomial_ring_are_evaluations() {
    let a = f2();
    let free = presented_algebra(&a, &Presentation::new(&a, &["x"], &[]).unwrap()).unwrap();
    for name in ["f2", "f4", "f2xy"] {
        let b = stage(name);
        let images: Vec<Poly> = hom_enum(&free, &b).unwrap().into_iter().map(|h| h.images[0].clone()).collect();
        assert_eq!(images, b.elements().unwrap());
    }
}

#[test]
fn ring_equations_hold_on_full_carriers() {
    let sig = TheorySignature::commring();
    for name in ["f2", "f3", "f4", "f2e", "f2y"] {
        let s = stage(name);
        let elems = s.elements().unwrap();
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    for (l, r) in &sig.equations {
                        let env = [a.clone(), b.clone(), c.clone()];
                        assert_eq!(eval_term(&sig, &s, l, &env).unwrap(), eval_term(&sig, &s, r, &env).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn other_theories_have_no_polynomial_backend() {
    let t = parse_table_theory(POINTED).unwrap();
    let err = eval_term(&t.sig, &f2(), &Term::Var(0), &[Poly::zero()]).unwrap_err();
    assert!(matches!(err, Error::UnsupportedTheory(_)));
}

const POINTED: &str = "theory: pointed\ncarrier: 2\nop pt/0: 0\n";

const SEMILATTICE: &str = "\
theory: semilattice
carrier: 2
op join/2: 0 1 1 1
equation: join(x, x) = x
equation: join(x, y) = join(y, x)
equation: join(x, join(y, z)) = join(join(x, y), z)
";

#[test]
fn free_pointed_sets() {
    let t = parse_table_theory(POINTED).unwrap();
    assert_eq!(free_model(&t, 0).unwrap().0.size, 1);
    assert_eq!(free_model(&t, 1).unwrap().0.size, 2);
    assert_eq!(free_model(&t, 3).unwrap().0.size, 4);
}

#[test]
fn free_semilattices_are_nonempty_subsets() {
    let t = parse_table_theory(SEMILATTICE).unwrap();
    for n in 1..=4usize {
        let (m, gens) = free_model(&t, n).unwrap();
        m.validate(&t.sig).unwrap();
        // brute force: joins of nonempty sets of generators are pairwise distinct
        let mut joins = Vec::new();
        for set in 1u32..(1 << n) {
            let mut acc = None;
            for (g, &gen) in gens.iter().enumerate() {
                if set >> g & 1 == 1 {
                    acc = Some(acc.map_or(gen, |a| m.apply(0, &[a, gen]).unwrap()));
                }
            }
            joins.push(acc.unwrap());
        }
        joins.sort_unstable();
        joins.dedup();
        assert_eq!(joins.len(), (1 << n) - 1);
        assert_eq!(m.size as usize, (1 << n) - 1);
    }
}

#[test]
fn presented_table_model_identifies_generators() {
    let t = parse_table_theory(SEMILATTICE).unwrap();
    let mut vars = vec!["x".to_string(), "y".to_string()];
    let rel = (t.sig.parse_term("x", &mut vars, false, 1).unwrap(), t.sig.parse_term("join(x, y)", &mut vars, false, 1).unwrap());
    let (m, gens) = presented_table_model(&t, 2, &[rel]).unwrap();
    // y ≤ x leaves {x, y}
    assert_eq!(m.size, 2);
    assert_ne!(gens[0], gens[1]);
    assert_eq!(m.apply(0, &[gens[0], gens[1]]).unwrap(), gens[0]);
}

#[test]
fn table_model_violating_an_equation_is_rejected() {
    let bad = SEMILATTICE.replace("0 1 1 1", "0 1 0 1");
    assert!(matches!(parse_table_theory(&bad), Err(Error::Validation(_)) | Err(Error::InternalLawViolation(_))));
}

#[test]
fn pushout_along_the_unique_map() {
    let a = f2();
    let b = stage("f2y");
    let h = hom_enum(&a, &b).unwrap().pop().unwrap();
    let u = idem(&a);
    let po = pushout_extend(&h, &a, &b, &u).unwrap();
    assert_eq!(po.target.size().unwrap(), 16);
    let rep = po.check(&h, &b, &[a.clone(), b.clone(), stage("f4")]).unwrap();
    assert!(rep.pass(), "{:?}", rep.failures);
    // cocones into F2: two maps from B and two from ⟨u⟩
    assert_eq!(fact(&rep, "cocones into f2"), "4");
}

#[test]
fn pushout_along_identity_is_identity() {
    for name in ["f2", "f2y", "f4"] {
        let a = stage(name);
        let u = Presentation::new(&a, &["x"], &["x^2 = x"]).unwrap();
        let po = pushout_extend(&AlgebraHom::identity(&a), &a, &a, &u).unwrap();
        assert_eq!(po.uh, u);
        assert_eq!(po.h_plus, AlgebraHom::identity(&po.source));
    }
}

#[test]
fn pushout_renames_clashing_generators() {
    let a = f2();
    let b = stage("f2y");
    let u = Presentation::new(&a, &["y"], &["y^2 = y"]).unwrap();
    let h = hom_enum(&a, &b).unwrap().pop().unwrap();
    let po = pushout_extend(&h, &a, &b, &u).unwrap();
    assert_eq!(po.uh.generators, vec!["y'".to_string()]);
    assert_eq!(po.target.size().unwrap(), 16);
}

#[test]
fn pushouts_compose() {
    let a = stage("f2y");
    let b = Arc::new(PresentedAlgebra::over_prime("B", 2, &["z", "w"], &["z^2 = z", "w^2 = w"]).unwrap());
    let c = stage("f2y");
    let u = Presentation::new(&a, &["x"], &["x^2 = x*y"]).unwrap();
    for f in hom_enum(&a, &b).unwrap() {
        for g in hom_enum(&b, &c).unwrap() {
            let gf = g.after(&f, &b, &c);
            let po_f = pushout_extend(&f, &a, &b, &u).unwrap();
            let po_g = pushout_extend(&g, &b, &c, &po_f.uh).unwrap();
            let po_gf = pushout_extend(&gf, &a, &c, &u).unwrap();
            assert_eq!(*po_g.target, *po_gf.target);
            assert_eq!(po_g.h_plus.after(&po_f.h_plus, &po_f.target, &po_g.target), po_gf.h_plus);
        }
    }
}

/// Assignments of the generators in A satisfying every relation.
fn brute_force_retractions(a: &PresentedAlgebra, u: &Presentation) -> usize {
    let elems = a.elements().unwrap();
    let k = u.generators.len();
    let ring = u.ring();
    let mut count = 0;
    for mut i in 0..elems.len().pow(k as u32) {
        let mut images = AlgebraHom::identity(a).images;
        for _ in 0..k {
            images.push(elems[i % elems.len()].clone());
            i /= elems.len();
        }
        if u.relations.iter().all(|r| a.nf(&ring.eval_in(r, &a.ring, &images, |g| g)).is_zero()) {
            count += 1;
        }
    }
    count
}

#[test]
fn retraction_counts() {
    let a = f2();
    let two = Presentation::new(&a, &["x", "y"], &["x^2 = x", "y^2 = y"]).unwrap();
    for (u, expect) in [(idem(&a), 2), (two, 4), (artin_schreier(&a), 0), (Presentation::empty(&a), 1)] {
        let n = spec_levelwise(&a, &u).unwrap().len();
        assert_eq!(n, expect);
        assert_eq!(n, brute_force_retractions(&a, &u));
    }
    let f4 = stage("f4");
    assert_eq!(spec_levelwise(&f4, &artin_schreier(&f4)).unwrap().len(), 2);
}

#[test]
fn local_representability_of_the_idempotent() {
    let a = f2();
    let rep = check_local_representability(&a, &idem(&a), &[a.clone(), stage("f2y"), stage("f4")], &mut budget()).unwrap();
    assert!(rep.pass(), "{:?}", rep.failures);
    assert_eq!(fact(&rep, "f2: |Hom(<u>, B)|"), "2");
    assert_eq!(fact(&rep, "f2: |Σ Ret|"), "2");
}

#[test]
fn local_representability_of_the_field_extension() {
    let a = f2();
    let f4 = stage("f4");
    let rep = check_local_representability(&a, &artin_schreier(&a), &[a.clone(), f4], &mut budget()).unwrap();
    assert!(rep.pass(), "{:?}", rep.failures);
    assert_eq!(fact(&rep, "f4: |Hom(<u>, B)|"), "2");
    assert_eq!(fact(&rep, "f4: |Σ Ret|"), "2");
    assert_eq!(fact(&rep, "f2: |Hom(<u>, B)|"), "0");
}

#[test]
fn duality_sizes() {
    let a = f2();
    let roster = [a.clone(), stage("f2y")];
    for (u, size, spec) in [(idem(&a), 4, 2), (artin_schreier(&a), 4, 0), (Presentation::empty(&a), 2, 1)] {
        let (rep, out) = check_duality_axiom(&a, &u, &roster, &mut budget()).unwrap();
        assert!(rep.pass(), "{}: {:?}", u.display(), rep.failures);
        assert_eq!((out.left, out.right, out.spec_at_base), (size, size, spec));
    }
}

#[test]
fn spec_pushforward_evaluates_at_the_extended_stage() {
    let a = f2();
    let inst = spec_instance(&a, &idem(&a), &[a.clone()], &mut budget()).unwrap();
    let site = inst.site();
    let g = inst.stages.generic_model();
    let ext = inst.spec.ext(&site.cat, &inst.gamma);
    let gw = TyFam::weaken(&site.cat, &ext, &g);
    let ev = crate::repr::pushforward_eval(site, &inst.point, &inst.gamma, &inst.spec, &gw, inst.a_obj, inst.gamma_id, &mut budget()).unwrap();
    assert_eq!((ev.values.len(), ev.target), (4, 4));
    assert!(ev.is_bijective());
}

#[test]
fn nullity_on_a_segment() {
    let a = f2();
    for u in [idem(&a), Presentation::empty(&a), artin_schreier(&a)] {
        let rep = check_nullity_axiom(&a, &u, &[a.clone(), stage("f2y")], 10, &mut budget()).unwrap();
        assert!(rep.pass(), "{}: {:?}", u.display(), rep.failures);
    }
}

#[test]
fn spec_projectivity_with_two_points() {
    let a = f2();
    let inst = spec_instance(&a, &idem(&a), &[a.clone(), stage("f2y")], &mut budget()).unwrap();
    assert_eq!(inst.spec_size_at_base(), 2);
    let p = inst.support_family().unwrap();
    let rep = check_spec_projectivity(&inst, &p, &mut budget()).unwrap();
    assert!(rep.pass(), "{:?}", rep.failures);
    assert_eq!(fact(&rep, "fibers-at-base"), "[2, 3]");
}

#[test]
fn support_family_needs_a_generator() {
    let a = f2();
    let inst = spec_instance(&a, &Presentation::empty(&a), &[a.clone()], &mut budget()).unwrap();
    assert!(matches!(inst.support_family(), Err(Error::InvalidStructure(_))));
}

#[test]
fn stage_category_laws() {
    let st = StageSite::new(["f2", "f2y", "f4", "f2e", "f2"].iter().map(|n| stage(n)).collect()).unwrap();
    assert_eq!(st.stages.len(), 4);
    let rep = st.check_laws();
    assert!(rep.pass(), "{:?}", rep.failures);
    // an endomorphism of F2[y]/(y^2 - y) picks an idempotent for y
    let s = stage("f2y");
    let y = st.obj(st.stage_of(&s).unwrap());
    let idempotents = s.elements().unwrap().iter().filter(|e| s.mul(e, e) == **e).count();
    assert_eq!(st.site.cat.homs(y, y).len(), idempotents);
}

#[test]
fn presentation_file_round_trip() {
    let src = "# idempotent\ntheory: commring p=2\nname: idem\ngenerators: x y\nrelations: x^2 = x; y^2 = y\nrelations: x*y = 0\n";
    let PresentationFile::Ring { name, presentation } = parse_presentation(src, |_| unreachable!()).unwrap() else { panic!() };
    assert_eq!(name.as_deref(), Some("idem"));
    assert_eq!(presentation.relations.len(), 3);
    let alg = presented_algebra(&f2(), &presentation).unwrap();
    assert_eq!(alg.size().unwrap(), 8);
}

#[test]
fn presentation_file_errors() {
    let unscoped = "theory: commring p=2\ngenerators: x\nrelations: x^2 = z\n";
    assert!(matches!(parse_presentation(unscoped, |_| unreachable!()), Err(Error::Validation(_))));
    let missing_eq = "theory: commring p=2\ngenerators: x\n\nrelations: x^2 + x\n";
    assert!(matches!(parse_presentation(missing_eq, |_| unreachable!()), Err(Error::Parse { line: 4, .. })));
    let twice = "theory: commring p=2\ngenerators: x x\n";
    assert!(matches!(parse_presentation(twice, |_| unreachable!()), Err(Error::Parse { line: 2, .. })));
    let not_prime = "theory: commring p=4\n";
    assert!(matches!(parse_presentation(not_prime, |_| unreachable!()), Err(Error::Parse { line: 1, .. })));
    let unknown = "theory: commring p=2\nrelation: x = x\n";
    assert!(matches!(parse_presentation(unknown, |_| unreachable!()), Err(Error::Parse { line: 2, .. })));
}

#[test]
fn table_presentation_files() {
    let src = "theory: table semi.thy\ngenerators: a b\nrelations: a = join(a, b)\n";
    let load = |f: &str| {
        assert_eq!(f, "semi.thy");
        Ok(SEMILATTICE.to_string())
    };
    let PresentationFile::Table { theory, generators, relations, .. } = parse_presentation(src, load).unwrap() else { panic!() };
    let (m, _) = presented_table_model(&theory, generators.len(), &relations).unwrap();
    assert_eq!(m.size, 2);
    let unscoped = "theory: table semi.thy\ngenerators: a\nrelations: a = join(a, c)\n";
    assert!(matches!(parse_presentation(unscoped, load), Err(Error::Validation(_))));
}

#[test]
fn table_theory_errors() {
    assert!(matches!(parse_table_theory("theory: t\nop m/2: 0\n"), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(parse_table_theory("theory: t\ncarrier: 2\nop m/2: 0 1 1\n"), Err(Error::Parse { line: 3, .. })));
    assert!(matches!(parse_table_theory("theory: t\ncarrier: 2\nop m/2: 0 1 1 0\nequation: m(x) = x\n"), Err(Error::Parse { line: 4, .. })));
}

fn arb_poly(p: u32, nvars: usize, deg: u16) -> impl Strategy<Value = Poly> {
    let r = PolyRing { p, vars: (0..nvars).map(|i| format!("v{i}")).collect() };
    prop::collection::vec((prop::collection::vec(0..=deg, nvars), 1..p), 0..6)
        .prop_map(move |ts| ts.into_iter().fold(Poly::zero(), |acc, (m, c)| r.add(&acc, &r.monomial(m, c))))
}

proptest! {
    #[test]
    fn normal_form_is_a_ring_map(f in arb_poly(3, 2, 4), g in arb_poly(3, 2, 4), rels in prop::collection::vec(arb_poly(3, 2, 3), 1..3)) {
        let r = PolyRing::new(3, vec!["v0".into(), "v1".into()]).unwrap();
        let basis = groebner_basis(&r, &rels);
        let nf = |h: &Poly| normal_form(&r, &basis, h);
        prop_assert_eq!(nf(&r.add(&f, &g)), r.add(&nf(&f), &nf(&g)));
        prop_assert_eq!(nf(&r.mul(&f, &g)), nf(&r.mul(&nf(&f), &nf(&g))));
        prop_assert_eq!(nf(&nf(&f)), nf(&f));
        for h in &rels {
            prop_assert!(is_member(&r, &basis, h));
            prop_assert!(is_member(&r, &basis, &r.mul(h, &f)));
        }
    }

    #[test]
    fn basis_does_not_depend_on_generator_order(rels in prop::collection::vec(arb_poly(2, 2, 3), 1..4), seed in any::<u64>()) {
        let r = PolyRing::new(2, vec!["v0".into(), "v1".into()]).unwrap();
        let mut shuffled = rels.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(groebner_basis(&r, &rels), groebner_basis(&r, &shuffled));
    }

    #[test]
    fn homomorphisms_compose(i in 0usize..4, j in 0usize..4, k in 0usize..4) {
        let names = ["f2", "f2y", "f4", "f2e"];
        let (a, b, c) = (stage(names[i]), stage(names[j]), stage(names[k]));
        for f in hom_enum(&a, &b).unwrap() {
            for g in hom_enum(&b, &c).unwrap() {
                let gf = g.after(&f, &b, &c);
                prop_assert!(gf.check(&a, &c).is_ok());
                let (mf, mg, mgf) = (f.carrier_map(&a, &b).unwrap(), g.carrier_map(&b, &c).unwrap(), gf.carrier_map(&a, &c).unwrap());
                prop_assert_eq!(mgf, mf.iter().map(|&x| mg[x as usize]).collect::<Vec<_>>());
            }
        }
    }
}
