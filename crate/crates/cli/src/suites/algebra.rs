//! The duality roster over finite fields, the Gröbner backend, and table theories.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cwf_workbench::alg::duality::StageSite;
use cwf_workbench::alg::poly::divides;
use cwf_workbench::alg::{
    check_duality_axiom, check_local_representability, check_nullity_axiom, check_spec_projectivity, free_model,
    groebner_basis, normal_form, parse_table_theory, presented_table_model, spec_instance, Poly, PolyRing, Presentation,
    PresentationFile, PresentedAlgebra, TableTheory,
};
use cwf_workbench::{Budget, Error, Report, Result};

use super::{absorb, Inputs};

const NULLITY_SEGMENT: u32 = 10;

const SEMILATTICE: &str = "\
theory: semilattice
carrier: 2
op join/2: 0 1 1 1
equation: join(x, x) = x
equation: join(x, y) = join(y, x)
equation: join(x, join(y, z)) = join(join(x, y), z)
";

/// The ring presentations to run, with the base they are over.
fn roster(inputs: &Inputs) -> Result<Vec<(String, Presentation)>> {
    let ring: Vec<(String, Presentation)> = inputs
        .presentations
        .iter()
        .filter_map(|(name, pf)| match pf {
            PresentationFile::Ring { presentation, .. } => Some((name.clone(), presentation.clone())),
            PresentationFile::Table { .. } => None,
        })
        .collect();
    if !ring.is_empty() || !inputs.presentations.is_empty() {
        return Ok(ring);
    }
    let f2 = PresentedAlgebra::prime_field(2)?;
    Ok(vec![
        ("idempotent".into(), Presentation::new(&f2, &["x"], &["x^2 = x"])?),
        ("artin-schreier".into(), Presentation::new(&f2, &["x"], &["x^2 = x + 1"])?),
        ("empty".into(), Presentation::empty(&f2)),
    ])
}

/// The prime field of characteristic p from the stages, added in front when missing.
fn base_and_stages(p: u32, stages: &[Arc<PresentedAlgebra>]) -> Result<(Arc<PresentedAlgebra>, Vec<Arc<PresentedAlgebra>>)> {
    let fp = PresentedAlgebra::prime_field(p)?;
    if let Some(b) = stages.iter().find(|s| s.as_ref() == &fp) {
        return Ok((b.clone(), stages.to_vec()));
    }
    let b = Arc::new(fp);
    let mut all = vec![b.clone()];
    all.extend(stages.iter().cloned());
    Ok((b, all))
}

fn duality_one(name: &str, u: &Presentation, stages: &[Arc<PresentedAlgebra>], limit: u64) -> Result<Report> {
    let (base, stages) = base_and_stages(u.p, stages)?;
    if let Some(s) = stages.iter().find(|s| s.ring.p != u.p) {
        return Err(Error::Validation(format!("stage {} has characteristic {}, presentation {}", s.name, s.ring.p, u.p)));
    }
    let mut rep = Report::new(name);
    let mut tag = |mut r: Report| {
        for f in &mut r.facts {
            f.key = format!("{name}.{}", f.key);
        }
        for s in &mut r.searches {
            s.goal = format!("{name}: {}", s.goal);
        }
        r
    };
    let local = check_local_representability(&base, u, &stages, &mut Budget::new(limit)).map(&mut tag);
    absorb(&mut rep, &format!("{name}/local"), local);
    let duality = check_duality_axiom(&base, u, &stages, &mut Budget::new(limit)).map(|(mut r, out)| {
        r.fact("sizes", format!("{}/{}", out.left, out.right));
        tag(r)
    });
    absorb(&mut rep, &format!("{name}/duality"), duality);
    let nullity = check_nullity_axiom(&base, u, &stages, NULLITY_SEGMENT, &mut Budget::new(limit)).map(&mut tag);
    absorb(&mut rep, &format!("{name}/nullity"), nullity);
    let projectivity = spec_instance(&base, u, &stages, &mut Budget::new(limit)).and_then(|inst| match inst.support_family() {
        Ok(p) => check_spec_projectivity(&inst, &p, &mut Budget::new(limit)).map(&mut tag),
        // no generator to support a family on
        Err(Error::InvalidStructure(_)) => {
            let mut r = Report::new(name);
            r.fact(format!("{name}.projectivity"), "no generator");
            Ok(r)
        }
        Err(e) => Err(e),
    });
    absorb(&mut rep, &format!("{name}/projectivity"), projectivity);
    Ok(rep)
}

pub fn duality(inputs: &Inputs) -> Report {
    let mut rep = Report::new("duality");
    match StageSite::new(inputs.stages.clone()) {
        Ok(st) => rep.merge(st.check_laws()),
        Err(e) => rep.fail("error", format!("stage site: {e}")),
    }
    match roster(inputs) {
        Ok(us) => {
            for (name, u) in us {
                let r = duality_one(&name, &u, &inputs.stages, inputs.config.budget);
                absorb(&mut rep, &name, r);
            }
        }
        Err(e) => rep.fail("error", e.to_string()),
    }
    rep
}

/// Rewrites with a randomly chosen reducible term and reducer until irreducible.
fn rewrite_randomly(r: &PolyRing, basis: &[Poly], f: &Poly, rng: &mut ChaCha8Rng) -> Poly {
    let mut f = f.clone();
    loop {
        let mut moves = Vec::new();
        for (m, c) in &f.terms {
            for g in basis {
                if divides(&g.terms[0].0, m) {
                    moves.push((m.clone(), *c, g));
                }
            }
        }
        let Some((m, c, g)) = moves.choose(rng).cloned() else { return f };
        let q: Vec<u16> = m.iter().zip(&g.terms[0].0).map(|(a, b)| a - b).collect();
        let factor = (c as u64 * r.inv(g.terms[0].1) as u64 % r.p as u64) as u32;
        f = r.sub(&f, &r.shift(g, &q, factor));
    }
}

/// Monomials in x, y of total degree at most 3.
fn low_monomials() -> Vec<Vec<u16>> {
    (0..=3u16).flat_map(|a| (0..=3 - a).map(move |b| vec![a, b])).collect()
}

/// The polynomial whose coefficients are the base-p digits of `code`.
fn decode(r: &PolyRing, monos: &[Vec<u16>], mut code: u64) -> Poly {
    let mut f = Poly::zero();
    for m in monos {
        let c = (code % r.p as u64) as u32;
        code /= r.p as u64;
        if c != 0 {
            f = r.add(&f, &r.monomial(m.clone(), c));
        }
    }
    f
}

const IDEALS: &[(u32, &[&str])] = &[
    (2, &["x^2 + x"]),
    (2, &["x^2 + x + 1", "y^2 + y"]),
    (2, &["x*y + 1", "y^2 + x"]),
    (3, &["x^2 - 1"]),
    (3, &["x*y - 1", "y^2 - x"]),
    (3, &["x^3 - y", "y^2 - x"]),
];

const MAX_SAMPLES: u64 = 4096;

fn groebner_sample(p: u32, rels: &[&str], rng: &mut ChaCha8Rng) -> Result<Report> {
    let r = PolyRing::new(p, vec!["x".into(), "y".into()])?;
    let gens: Vec<Poly> = rels.iter().map(|s| r.parse(s, 1)).collect::<Result<_>>()?;
    let basis = groebner_basis(&r, &gens);
    let monos = low_monomials();
    let total = (p as u64).pow(monos.len() as u32);
    let codes: Vec<u64> = if total <= MAX_SAMPLES { (0..total).collect() } else { (0..MAX_SAMPLES).map(|_| rng.gen_range(0..total)).collect() };
    let label = format!("F{p}[x,y]/({})", rels.join(", "));
    let mut rep = Report::new(label.clone());
    for code in &codes {
        let f = decode(&r, &monos, *code);
        let nf = normal_form(&r, &basis, &f);
        let rw = rewrite_randomly(&r, &basis, &f, rng);
        rep.check("normal-form", nf == rw, || format!("{label}: {} gives {} and {}", r.display(&f), r.display(&nf), r.display(&rw)));
        let reduced = nf.terms.iter().all(|(m, _)| !basis.iter().any(|g| divides(&g.terms[0].0, m)));
        rep.check("irreducible", reduced, || format!("{label}: {}", r.display(&nf)));
    }
    for g in &gens {
        rep.check("generator-member", normal_form(&r, &basis, g).is_zero(), || format!("{label}: {}", r.display(g)));
    }
    rep.fact(format!("{label}.coverage"), format!("{}/{total}", codes.len()));
    Ok(rep)
}

pub fn groebner(inputs: &Inputs) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(inputs.config.seed);
    let mut rep = Report::new("groebner");
    for (p, rels) in IDEALS {
        let r = groebner_sample(*p, rels, &mut rng);
        absorb(&mut rep, &format!("F{p}"), r);
    }
    rep
}

fn theory_checks(name: &str, t: &TableTheory) -> Result<Report> {
    let mut rep = Report::new(name);
    for (i, m) in t.models.iter().enumerate() {
        let ok = m.validate(&t.sig);
        rep.check("model-equations", ok.is_ok(), || format!("{name}: model {i}: {:?}", ok.as_ref().err()));
    }
    for n in 0..=3 {
        let (free, gens) = free_model(t, n)?;
        let ok = free.validate(&t.sig);
        rep.check("free-equations", ok.is_ok(), || format!("{name}: free model on {n}: {:?}", ok.as_ref().err()));
        rep.check("free-generators", gens.len() == n, || format!("{name}: {} generators for {n}", gens.len()));
        rep.fact(format!("{name}.|F({n})|"), free.size);
    }
    Ok(rep)
}

pub fn theory(inputs: &Inputs) -> Report {
    let mut rep = Report::new("theory");
    match &inputs.theory {
        Some(t) => absorb(&mut rep, &t.sig.name, theory_checks(&t.sig.name, t)),
        None if !inputs.presentations.iter().any(|(_, pf)| matches!(pf, PresentationFile::Table { .. })) => {
            let r = parse_table_theory(SEMILATTICE).and_then(|t| theory_checks("semilattice", &t));
            absorb(&mut rep, "semilattice", r);
        }
        None => {}
    }
    for (name, pf) in &inputs.presentations {
        if let PresentationFile::Table { theory, generators, relations, .. } = pf {
            let r = presented_table_model(theory, generators.len(), relations).map(|(m, gens)| {
                let mut r = Report::new(name.clone());
                let ok = m.validate(&theory.sig);
                r.check("presented-equations", ok.is_ok(), || format!("{name}: {:?}", ok.as_ref().err()));
                r.fact(format!("{name}.size"), m.size);
                r.fact(format!("{name}.generators"), format!("{gens:?}"));
                r
            });
            absorb(&mut rep, name, r);
        }
    }
    rep
}
