//! Finitely presented commutative algebras over F_p, their homomorphisms, pushouts and
//! retractions, with the finite-table backend for other theories.

use std::sync::Arc;

use super::groebner::{groebner_basis, normal_form, standard_monomials};
use super::poly::{Monomial, Poly, PolyRing};
use super::theory::{free_model, free_model_eval, Algebra, FiniteModel, TableTheory, Term, TheorySignature};
use crate::error::{parse_err, Error, Result};
use crate::report::Report;

/// Carriers beyond this many elements are not enumerated.
pub const MAX_CARRIER: u64 = 1 << 16;

/// Generators and relations over a base stage whose variables the relations may mention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub p: u32,
    pub base_vars: Vec<String>,
    pub generators: Vec<String>,
    /// `s_r − t_r`, over the base variables followed by the generators.
    pub relations: Vec<Poly>,
}

impl Presentation {
    pub fn ring(&self) -> PolyRing {
        PolyRing { p: self.p, vars: self.base_vars.iter().chain(&self.generators).cloned().collect() }
    }

    pub fn empty(base: &PresentedAlgebra) -> Presentation {
        Presentation { p: base.ring.p, base_vars: base.ring.vars.clone(), generators: Vec::new(), relations: Vec::new() }
    }

    /// Relations `lhs = rhs` written over the base's variables and the generators.
    pub fn new(base: &PresentedAlgebra, generators: &[&str], relations: &[&str]) -> Result<Presentation> {
        let mut u = Presentation::empty(base);
        u.generators = generators.iter().map(|s| s.to_string()).collect();
        let ring = PolyRing::new(u.p, u.ring().vars)?;
        for (k, r) in relations.iter().enumerate() {
            u.relations.push(parse_relation(&ring, r, k + 1)?);
        }
        Ok(u)
    }

    pub fn display(&self) -> String {
        let ring = self.ring();
        let rels: Vec<String> = self.relations.iter().map(|r| format!("{} = 0", ring.display(r))).collect();
        format!("<{} | {}>", self.generators.join(" "), rels.join(", "))
    }
}

fn parse_relation(ring: &PolyRing, src: &str, line: usize) -> Result<Poly> {
    let (l, r) = src.split_once('=').ok_or(Error::Parse { line, msg: format!("relation `{}` lacks `=`", src.trim()) })?;
    if r.contains('=') {
        return parse_err(line, "relation with more than one `=`");
    }
    Ok(ring.sub(&ring.parse(l, line)?, &ring.parse(r, line)?))
}

/// `⟨u⟩` over its base stage, with equality decided by a reduced Gröbner basis.
#[derive(Clone, Debug)]
pub struct PresentedAlgebra {
    pub name: String,
    pub ring: PolyRing,
    pub base: Option<Arc<PresentedAlgebra>>,
    pub relations: Vec<Poly>,
    pub basis: Vec<Poly>,
    standard: Option<Vec<Monomial>>,
}

impl PartialEq for PresentedAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.basis == other.basis
    }
}

impl PresentedAlgebra {
    pub fn prime_field(p: u32) -> Result<PresentedAlgebra> {
        let ring = PolyRing::new(p, Vec::new())?;
        Ok(PresentedAlgebra { name: format!("F{p}"), ring, base: None, relations: Vec::new(), basis: Vec::new(), standard: Some(vec![vec![]]) })
    }

    /// `F_p[vars]/(relations)` as a presentation over the prime field.
    pub fn over_prime(name: &str, p: u32, vars: &[&str], relations: &[&str]) -> Result<PresentedAlgebra> {
        let fp = PresentedAlgebra::prime_field(p)?;
        let mut a = presented_algebra(&Arc::new(fp.clone()), &Presentation::new(&fp, vars, relations)?)?;
        a.name = name.into();
        a.base = None;
        Ok(a)
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn base_vars(&self) -> usize {
        self.base.as_ref().map_or(0, |b| b.nvars())
    }

    pub fn nf(&self, f: &Poly) -> Poly {
        normal_form(&self.ring, &self.basis, f)
    }

    pub fn is_finite(&self) -> bool {
        self.standard.is_some()
    }

    pub fn size(&self) -> Result<u64> {
        let std = self.standard.as_ref().ok_or_else(|| Error::InfiniteCarrier(format!("{} has no finiteness certificate", self.name)))?;
        (self.ring.p as u64).checked_pow(std.len() as u32).filter(|&s| s <= MAX_CARRIER).ok_or_else(|| Error::BudgetExceeded(format!("{} is too large to enumerate", self.name)))
    }

    /// The normal form with index i: coefficients of the standard monomials in base p.
    pub fn element(&self, mut i: u64) -> Result<Poly> {
        self.size()?;
        let std = self.standard.as_ref().unwrap();
        let mut terms = Vec::new();
        for m in std {
            let c = (i % self.ring.p as u64) as u32;
            i /= self.ring.p as u64;
            if c != 0 {
                terms.push(self.ring.monomial(m.clone(), c));
            }
        }
        Ok(terms.iter().fold(Poly::zero(), |acc, t| self.ring.add(&acc, t)))
    }

    pub fn elements(&self) -> Result<Vec<Poly>> {
        (0..self.size()?).map(|i| self.element(i)).collect()
    }

    /// Index of an element among [`Self::elements`].
    pub fn index(&self, f: &Poly) -> Result<u32> {
        self.size()?;
        let std = self.standard.as_ref().unwrap();
        let r = self.nf(f);
        let mut idx = 0u64;
        for m in std.iter().rev() {
            let c = r.terms.iter().find(|(n, _)| n == m).map_or(0, |t| t.1);
            idx = idx * self.ring.p as u64 + c as u64;
        }
        Ok(idx as u32)
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        self.nf(&self.ring.add(a, b))
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.nf(&self.ring.mul(a, b))
    }

    /// The coprojection `p_u : A -> ⟨u⟩`.
    pub fn coprojection(&self) -> AlgebraHom {
        AlgebraHom { images: (0..self.base_vars()).map(|i| self.nf(&self.ring.var(i))).collect() }
    }

    pub fn display(&self, f: &Poly) -> String {
        self.ring.display(f)
    }
}

impl Algebra for PresentedAlgebra {
    type Elem = Poly;
    fn apply(&self, op: usize, args: &[Poly]) -> Result<Poly> {
        Ok(match (op, args) {
            (0, []) => Poly::zero(),
            (1, []) => self.ring.constant(1),
            (2, [a, b]) => self.add(a, b),
            (3, [a, b]) => self.mul(a, b),
            (4, [a]) => self.nf(&self.ring.neg(a)),
            _ => return Err(Error::ArityMismatch(format!("commutative ring operation {op} with {} arguments", args.len()))),
        })
    }
}

/// Evaluates a term of a theory in a presented algebra; only the theory of commutative rings
/// has this backend.
pub fn eval_term(sig: &TheorySignature, alg: &PresentedAlgebra, term: &Term, assignment: &[Poly]) -> Result<Poly> {
    if sig.ops != TheorySignature::commring().ops {
        return Err(Error::UnsupportedTheory(format!("{} has no polynomial normal forms", sig.name)));
    }
    free_model_eval(sig, alg, term, assignment)
}

/// `⟨u⟩_A`: the base's variables and relations followed by those of u.
pub fn presented_algebra(base: &Arc<PresentedAlgebra>, u: &Presentation) -> Result<PresentedAlgebra> {
    if u.p != base.ring.p || u.base_vars != base.ring.vars {
        return Err(Error::Validation(format!("presentation {} is not over {}", u.display(), base.name)));
    }
    let ring = PolyRing::new(u.p, u.ring().vars)?;
    let positions: Vec<usize> = (0..base.nvars()).collect();
    let mut relations: Vec<Poly> = base.relations.iter().map(|r| ring.embed(r, &positions)).collect();
    relations.extend(u.relations.iter().cloned());
    let basis = groebner_basis(&ring, &relations);
    let standard = standard_monomials(&ring, &basis);
    Ok(PresentedAlgebra { name: format!("{}{}", base.name, u.display()), ring, base: Some(base.clone()), relations, basis, standard })
}

/// A homomorphism given by the images of the source's variables, in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraHom {
    pub images: Vec<Poly>,
}

impl AlgebraHom {
    pub fn identity(a: &PresentedAlgebra) -> AlgebraHom {
        AlgebraHom { images: (0..a.nvars()).map(|i| a.nf(&a.ring.var(i))).collect() }
    }

    pub fn apply(&self, src: &PresentedAlgebra, tgt: &PresentedAlgebra, f: &Poly) -> Poly {
        src.ring.eval_in(f, &tgt.ring, &self.images, |g| tgt.nf(&g))
    }

    /// Every relation of the source vanishes in the target.
    pub fn check(&self, src: &PresentedAlgebra, tgt: &PresentedAlgebra) -> Result<()> {
        if self.images.len() != src.nvars() {
            return Err(Error::ArityMismatch(format!("{} images for {} variables", self.images.len(), src.nvars())));
        }
        for r in &src.relations {
            if !self.apply(src, tgt, r).is_zero() {
                return Err(Error::Validation(format!("relation {} = 0 fails in {}", src.display(r), tgt.name)));
            }
        }
        Ok(())
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &AlgebraHom, mid: &PresentedAlgebra, tgt: &PresentedAlgebra) -> AlgebraHom {
        AlgebraHom { images: first.images.iter().map(|f| self.apply(mid, tgt, f)).collect() }
    }

    pub fn carrier_map(&self, src: &PresentedAlgebra, tgt: &PresentedAlgebra) -> Result<Vec<u32>> {
        src.elements()?.iter().map(|e| tgt.index(&self.apply(src, tgt, e))).collect()
    }
}

/// Every homomorphism `src -> tgt` whose first variables go to `fixed`.
pub fn hom_enum_fixing(src: &PresentedAlgebra, tgt: &PresentedAlgebra, fixed: &[Poly]) -> Result<Vec<AlgebraHom>> {
    if src.ring.p != tgt.ring.p {
        return Ok(Vec::new());
    }
    let elems = tgt.elements().map_err(|e| match e {
        Error::InfiniteCarrier(m) => Error::InfiniteCarrier(format!("homomorphisms into {m}")),
        e => e,
    })?;
    let free = src.nvars() - fixed.len();
    let total = (elems.len() as u64).checked_pow(free as u32).filter(|&t| t <= MAX_CARRIER * 16);
    let total = total.ok_or_else(|| Error::BudgetExceeded(format!("too many assignments {} -> {}", src.name, tgt.name)))?;
    let mut out = Vec::new();
    for mut i in 0..total {
        let mut images: Vec<Poly> = fixed.to_vec();
        for _ in 0..free {
            images.push(elems[(i % elems.len() as u64) as usize].clone());
            i /= elems.len() as u64;
        }
        let h = AlgebraHom { images };
        if h.check(src, tgt).is_ok() {
            out.push(h);
        }
    }
    Ok(out)
}

pub fn hom_enum(src: &PresentedAlgebra, tgt: &PresentedAlgebra) -> Result<Vec<AlgebraHom>> {
    hom_enum_fixing(src, tgt, &[])
}

/// `Ret_A(u)`: the homomorphisms `r : ⟨u⟩ -> A` with `r ∘ p_u = id`.
pub fn spec_levelwise(a: &Arc<PresentedAlgebra>, u: &Presentation) -> Result<Vec<AlgebraHom>> {
    let alg = presented_algebra(a, u)?;
    hom_enum_fixing(&alg, a, &AlgebraHom::identity(a).images)
}

/// The result of pushing a presentation along `h : A -> B`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub uh: Presentation,
    pub source: Arc<PresentedAlgebra>,
    pub target: Arc<PresentedAlgebra>,
    /// `h⁺ : ⟨u⟩ -> ⟨uh⟩`
    pub h_plus: AlgebraHom,
}

/// `uh` by substituting h into the relations, and `h⁺` as the identity on generators.
pub fn pushout_extend(h: &AlgebraHom, a: &Arc<PresentedAlgebra>, b: &Arc<PresentedAlgebra>, u: &Presentation) -> Result<Pushout> {
    h.check(a, b)?;
    let mut generators = Vec::with_capacity(u.generators.len());
    for g in &u.generators {
        let mut name = g.clone();
        while b.ring.vars.contains(&name) || generators.contains(&name) {
            name.push('\'');
        }
        generators.push(name);
    }
    let uh_ring = PolyRing { p: u.p, vars: b.ring.vars.iter().chain(&generators).cloned().collect() };
    let kb = b.nvars();
    let b_in_uh: Vec<usize> = (0..kb).collect();
    // A's variables go to h's images, the generators to themselves
    let mut images: Vec<Poly> = h.images.iter().map(|f| uh_ring.embed(f, &b_in_uh)).collect();
    images.extend((0..generators.len()).map(|j| uh_ring.var(kb + j)));
    let u_ring = u.ring();
    let relations = u.relations.iter().map(|r| u_ring.eval_in(r, &uh_ring, &images, |g| g)).collect();
    let uh = Presentation { p: u.p, base_vars: b.ring.vars.clone(), generators, relations };
    let source = Arc::new(presented_algebra(a, u)?);
    let target = Arc::new(presented_algebra(b, &uh)?);
    let h_plus = AlgebraHom { images: images.iter().map(|f| target.nf(f)).collect() };
    h_plus.check(&source, &target)?;
    Ok(Pushout { uh, source, target, h_plus })
}

impl Pushout {
    /// The square `h⁺ ∘ p_u = p_{uh} ∘ h`, and for every test stage T a bijection between
    /// homomorphisms `⟨uh⟩ -> T` and cocones `(f : B -> T, g : ⟨u⟩ -> T)` with `f h = g p_u`.
    pub fn check(&self, h: &AlgebraHom, b: &PresentedAlgebra, tests: &[Arc<PresentedAlgebra>]) -> Result<Report> {
        let mut rep = Report::new("pushout");
        let left = self.h_plus.after(&self.source.coprojection(), &self.source, &self.target);
        let right = self.target.coprojection().after(h, b, &self.target);
        rep.check("square", left == right, || format!("{:?} vs {:?}", left.images, right.images));
        for t in tests {
            let mediating = hom_enum(&self.target, t)?;
            let mut cocones = Vec::new();
            for f in hom_enum(b, t)? {
                let fh = f.after(h, b, t);
                for g in hom_enum(&self.source, t)? {
                    if g.after(&self.source.coprojection(), &self.source, t) == fh {
                        cocones.push((f.clone(), g));
                    }
                }
            }
            let mut images: Vec<(AlgebraHom, AlgebraHom)> = mediating
                .iter()
                .map(|m| (m.after(&self.target.coprojection(), &self.target, t), m.after(&self.h_plus, &self.target, t)))
                .collect();
            let n = images.len();
            images.sort_by(|x, y| format!("{x:?}").cmp(&format!("{y:?}")));
            images.dedup();
            cocones.sort_by(|x, y| format!("{x:?}").cmp(&format!("{y:?}")));
            rep.check("mediating-unique", images.len() == n, || format!("two mediating maps agree on the cocone into {}", t.name));
            rep.check("mediating-exists", images == cocones, || format!("{} cocones, {} mediating maps into {}", cocones.len(), n, t.name));
            rep.fact(format!("cocones into {}", t.name), cocones.len());
        }
        Ok(rep)
    }
}

/// The presented model `F(X)/R` of a table theory, with the images of the generators.
pub fn presented_table_model(theory: &TableTheory, generators: usize, relations: &[(Term, Term)]) -> Result<(FiniteModel, Vec<u32>)> {
    let (free, gens) = free_model(theory, generators)?;
    let pairs = relations
        .iter()
        .map(|(s, t)| Ok((free_model_eval(&theory.sig, &free, s, &gens)?, free_model_eval(&theory.sig, &free, t, &gens)?)))
        .collect::<Result<Vec<_>>>()?;
    let (q, class) = free.quotient(&theory.sig, &pairs)?;
    Ok((q, gens.iter().map(|&g| class[g as usize]).collect()))
}

/// A parsed presentation file.
#[derive(Clone, Debug)]
pub enum PresentationFile {
    Ring { name: Option<String>, presentation: Presentation },
    Table { name: Option<String>, theory: TableTheory, generators: Vec<String>, relations: Vec<(Term, Term)> },
}

/// Reads
///
/// ```text
/// theory: commring p=2
/// generators: x y
/// relations: x^2 + x = 0; y^2 = y
/// ```
///
/// or `theory: table <file>` with relations between terms; `load` resolves table files.
pub fn parse_presentation(src: &str, load: impl Fn(&str) -> Result<String>) -> Result<PresentationFile> {
    let mut theory: Option<(usize, String)> = None;
    let mut name = None;
    let mut generators: Option<Vec<String>> = None;
    let mut relations: Vec<(usize, String)> = Vec::new();
    for (k, raw) in src.lines().enumerate() {
        let n = k + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(':').ok_or(Error::Parse { line: n, msg: format!("expected `key: value`, found `{line}`") })?;
        let rest = rest.trim();
        match key.trim() {
            "theory" if theory.is_none() => theory = Some((n, rest.to_string())),
            "name" if name.is_none() => name = Some(rest.to_string()),
            "generators" if generators.is_none() => {
                let gs: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                for (i, g) in gs.iter().enumerate() {
                    if !g.chars().next().is_some_and(char::is_alphabetic) || !g.chars().all(|c| c.is_alphanumeric() || c == '_') {
                        return parse_err(n, format!("bad generator name `{g}`"));
                    }
                    if gs[..i].contains(g) {
                        return parse_err(n, format!("generator {g} listed twice"));
                    }
                }
                generators = Some(gs);
            }
            "relations" => relations.extend(rest.split(';').map(str::trim).filter(|r| !r.is_empty()).map(|r| (n, r.to_string()))),
            k @ ("theory" | "name" | "generators") => return parse_err(n, format!("`{k}` given twice")),
            k => return parse_err(n, format!("unknown key `{k}`")),
        }
    }
    let (tline, theory) = theory.ok_or(Error::Parse { line: 0, msg: "missing `theory:`".into() })?;
    let generators = generators.unwrap_or_default();
    let words: Vec<&str> = theory.split_whitespace().collect();
    match words.as_slice() {
        ["commring", char] => {
            let p = char
                .strip_prefix("p=")
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or(Error::Parse { line: tline, msg: format!("expected `p=<prime>`, found `{char}`") })?;
            let fp = PresentedAlgebra::prime_field(p).map_err(|e| Error::Parse { line: tline, msg: e.to_string() })?;
            let mut u = Presentation::empty(&fp);
            u.generators = generators;
            let ring = PolyRing::new(p, u.ring().vars)?;
            for (n, r) in relations {
                u.relations.push(parse_relation(&ring, &r, n)?);
            }
            Ok(PresentationFile::Ring { name, presentation: u })
        }
        ["table", file] => {
            let theory = super::theory::parse_table_theory(&load(file)?)?;
            let mut vars = generators.clone();
            let mut rels = Vec::new();
            for (n, r) in relations {
                let (s, t) = r.split_once('=').ok_or(Error::Parse { line: n, msg: format!("relation `{r}` lacks `=`") })?;
                rels.push((theory.sig.parse_term(s, &mut vars, false, n)?, theory.sig.parse_term(t, &mut vars, false, n)?));
            }
            Ok(PresentationFile::Table { name, theory, generators, relations: rels })
        }
        _ => parse_err(tline, format!("expected `commring p=<prime>` or `table <file>`, found `{theory}`")),
    }
}
