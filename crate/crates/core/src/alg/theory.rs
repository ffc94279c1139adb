//! Finitary algebraic theories, terms, and the finite-table backend.

use std::collections::HashMap;

use crate::error::{parse_err, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Op(usize, Vec<Term>),
}

impl Term {
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Term::Var(v) => Some(*v),
            Term::Op(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheorySignature {
    pub name: String,
    pub ops: Vec<(String, usize)>,
    pub equations: Vec<(Term, Term)>,
}

impl TheorySignature {
    pub fn new(name: impl Into<String>, ops: Vec<(String, usize)>, equations: Vec<(Term, Term)>) -> Result<Self> {
        let sig = TheorySignature { name: name.into(), ops, equations };
        for (l, r) in &sig.equations {
            sig.check_term(l)?;
            sig.check_term(r)?;
        }
        Ok(sig)
    }

    pub fn check_term(&self, t: &Term) -> Result<()> {
        if let Term::Op(o, args) = t {
            let (name, arity) = self.ops.get(*o).ok_or_else(|| Error::IndexOutOfRange(format!("operation {o}")))?;
            if args.len() != *arity {
                return Err(Error::ArityMismatch(format!("{name} takes {arity} arguments, given {}", args.len())));
            }
            for a in args {
                self.check_term(a)?;
            }
        }
        Ok(())
    }

    pub fn op(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|(n, _)| n == name)
    }

    /// Commutative rings: `0, 1, +, *, neg`.
    pub fn commring() -> TheorySignature {
        let ops = vec![("zero".into(), 0), ("one".into(), 0), ("add".into(), 2), ("mul".into(), 2), ("neg".into(), 1)];
        let v = Term::Var;
        let o = |i: usize, a: Vec<Term>| Term::Op(i, a);
        let eqs = vec![
            (o(2, vec![v(0), o(2, vec![v(1), v(2)])]), o(2, vec![o(2, vec![v(0), v(1)]), v(2)])),
            (o(2, vec![v(0), v(1)]), o(2, vec![v(1), v(0)])),
            (o(2, vec![v(0), o(0, vec![])]), v(0)),
            (o(2, vec![v(0), o(4, vec![v(0)])]), o(0, vec![])),
            (o(3, vec![v(0), o(3, vec![v(1), v(2)])]), o(3, vec![o(3, vec![v(0), v(1)]), v(2)])),
            (o(3, vec![v(0), v(1)]), o(3, vec![v(1), v(0)])),
            (o(3, vec![v(0), o(1, vec![])]), v(0)),
            (o(3, vec![v(0), o(2, vec![v(1), v(2)])]), o(2, vec![o(3, vec![v(0), v(1)]), o(3, vec![v(0), v(2)])])),
        ];
        TheorySignature { name: "commring".into(), ops, equations: eqs }
    }

    /// Parses `name(arg, …)`, constants by name, and any other identifier as a variable
    /// from `vars` (extended when `open`).
    pub fn parse_term(&self, src: &str, vars: &mut Vec<String>, open: bool, line: usize) -> Result<Term> {
        let toks = lex(src, line)?;
        let mut pos = 0;
        let t = self.term(&toks, &mut pos, vars, open, line)?;
        if pos != toks.len() {
            return parse_err(line, format!("trailing `{}` after term", toks[pos]));
        }
        Ok(t)
    }

    fn term(&self, toks: &[String], pos: &mut usize, vars: &mut Vec<String>, open: bool, line: usize) -> Result<Term> {
        let Some(name) = toks.get(*pos).cloned() else { return parse_err(line, "term ends early") };
        *pos += 1;
        if let Some(o) = self.op(&name) {
            let arity = self.ops[o].1;
            let mut args = Vec::new();
            if toks.get(*pos).map(String::as_str) == Some("(") {
                *pos += 1;
                loop {
                    args.push(self.term(toks, pos, vars, open, line)?);
                    match toks.get(*pos).map(String::as_str) {
                        Some(",") => *pos += 1,
                        Some(")") => {
                            *pos += 1;
                            break;
                        }
                        _ => return parse_err(line, format!("expected `,` or `)` in arguments of {name}")),
                    }
                }
            }
            if args.len() != arity {
                return parse_err(line, format!("{name} takes {arity} arguments, given {}", args.len()));
            }
            return Ok(Term::Op(o, args));
        }
        if !name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_') {
            return parse_err(line, format!("unexpected `{name}`"));
        }
        match vars.iter().position(|v| *v == name) {
            Some(i) => Ok(Term::Var(i)),
            None if open => {
                vars.push(name);
                Ok(Term::Var(vars.len() - 1))
            }
            None => Err(Error::Validation(format!("line {line}: generator {name} is not in scope"))),
        }
    }
}

fn lex(src: &str, line: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() || c == '_' {
            let s: String = cs[i..].iter().take_while(|c| c.is_alphanumeric() || **c == '_').collect();
            i += s.chars().count();
            out.push(s);
        } else if "(),".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else {
            return parse_err(line, format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

/// An interpretation of a signature.
pub trait Algebra {
    type Elem: Clone + PartialEq;
    fn apply(&self, op: usize, args: &[Self::Elem]) -> Result<Self::Elem>;
}

/// The value of `term` under `assignment`.
pub fn free_model_eval<M: Algebra>(sig: &TheorySignature, model: &M, term: &Term, assignment: &[M::Elem]) -> Result<M::Elem> {
    match term {
        Term::Var(v) => assignment.get(*v).cloned().ok_or_else(|| Error::IndexOutOfRange(format!("generator {v} unassigned"))),
        Term::Op(o, args) => {
            let (name, arity) = sig.ops.get(*o).ok_or_else(|| Error::IndexOutOfRange(format!("operation {o}")))?;
            if args.len() != *arity {
                return Err(Error::ArityMismatch(format!("{name} takes {arity} arguments")));
            }
            let vals = args.iter().map(|a| free_model_eval(sig, model, a, assignment)).collect::<Result<Vec<_>>>()?;
            model.apply(*o, &vals)
        }
    }
}

/// A model with an explicit carrier `0..size` and one table per operation, indexed by
/// the argument tuple read as a base-`size` numeral, first argument most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModel {
    pub size: u32,
    pub tables: Vec<Vec<u32>>,
}

pub const MAX_FREE: usize = 1 << 14;

impl Algebra for FiniteModel {
    type Elem = u32;
    fn apply(&self, op: usize, args: &[u32]) -> Result<u32> {
        let idx = args.iter().fold(0usize, |acc, &a| acc * self.size as usize + a as usize);
        self.tables.get(op).and_then(|t| t.get(idx)).copied().ok_or_else(|| Error::IndexOutOfRange(format!("operation {op} at {args:?}")))
    }
}

fn tuples(size: u32, k: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (size as usize).pow(k as u32);
    (0..total).map(move |mut i| {
        let mut t = vec![0; k];
        for j in (0..k).rev() {
            t[j] = (i % size as usize) as u32;
            i /= size as usize;
        }
        t
    })
}

impl FiniteModel {
    pub fn validate(&self, sig: &TheorySignature) -> Result<()> {
        if self.tables.len() != sig.ops.len() {
            return Err(Error::ArityMismatch(format!("{} tables for {} operations", self.tables.len(), sig.ops.len())));
        }
        for ((name, arity), t) in sig.ops.iter().zip(&self.tables) {
            if t.len() != (self.size as usize).pow(*arity as u32) {
                return Err(Error::Validation(format!("table of {name} has {} entries", t.len())));
            }
            if let Some(v) = t.iter().find(|&&v| v >= self.size) {
                return Err(Error::Validation(format!("table of {name} leaves the carrier with {v}")));
            }
        }
        for (k, (l, r)) in sig.equations.iter().enumerate() {
            let n = l.max_var().max(r.max_var()).map_or(0, |v| v + 1);
            for a in tuples(self.size, n) {
                if free_model_eval(sig, self, l, &a)? != free_model_eval(sig, self, r, &a)? {
                    return Err(Error::Validation(format!("equation {k} of {} fails at {a:?}", sig.name)));
                }
            }
        }
        Ok(())
    }

    /// Whether `map` is a homomorphism into `other`.
    pub fn is_hom(&self, sig: &TheorySignature, other: &FiniteModel, map: &[u32]) -> Result<bool> {
        for (o, (_, arity)) in sig.ops.iter().enumerate() {
            for a in tuples(self.size, *arity) {
                let img: Vec<u32> = a.iter().map(|&x| map[x as usize]).collect();
                if map[self.apply(o, &a)? as usize] != other.apply(o, &img)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The quotient by the congruence generated by `pairs`, with the quotient map.
    pub fn quotient(&self, sig: &TheorySignature, pairs: &[(u32, u32)]) -> Result<(FiniteModel, Vec<u32>)> {
        let n = self.size as usize;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in pairs {
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            parent[ra.max(rb)] = ra.min(rb);
        }
        // close under the operations until stable
        loop {
            let mut changed = false;
            for (o, (_, arity)) in sig.ops.iter().enumerate() {
                if *arity == 0 {
                    continue;
                }
                let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
                for a in tuples(self.size, *arity) {
                    let key: Vec<usize> = a.iter().map(|&x| find(&mut parent, x as usize)).collect();
                    let v = find(&mut parent, self.apply(o, &a)? as usize);
                    match seen.get(&key) {
                        Some(&w) => {
                            let (rw, rv) = (find(&mut parent, w), v);
                            if rw != rv {
                                parent[rw.max(rv)] = rw.min(rv);
                                changed = true;
                            }
                        }
                        None => {
                            seen.insert(key, v);
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut class = vec![u32::MAX; n];
        let mut reps = Vec::new();
        for x in 0..n {
            let r = find(&mut parent, x);
            if class[r] == u32::MAX {
                class[r] = reps.len() as u32;
                reps.push(r);
            }
            class[x] = class[r];
        }
        let size = reps.len() as u32;
        let tables = sig
            .ops
            .iter()
            .enumerate()
            .map(|(o, (_, arity))| {
                tuples(size, *arity)
                    .map(|a| {
                        let lifted: Vec<u32> = a.iter().map(|&c| reps[c as usize] as u32).collect();
                        self.apply(o, &lifted).map(|v| class[v as usize])
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((FiniteModel { size, tables }, class))
    }
}

/// A finite-signature theory given by the models that generate its variety.
#[derive(Clone, Debug)]
pub struct TableTheory {
    pub sig: TheorySignature,
    pub models: Vec<FiniteModel>,
}

/// The free model on `n` generators in the variety generated by the listed models: the
/// submodel of the product over all assignments generated by the projections. Returns
/// the model and the generators.
pub fn free_model(theory: &TableTheory, n: usize) -> Result<(FiniteModel, Vec<u32>)> {
    let sig = &theory.sig;
    let coords: Vec<(usize, Vec<u32>)> =
        theory.models.iter().enumerate().flat_map(|(k, m)| tuples(m.size, n).map(move |a| (k, a))).collect();
    let mut elems: Vec<Vec<u32>> = Vec::new();
    let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut push = |e: Vec<u32>, elems: &mut Vec<Vec<u32>>| -> Result<u32> {
        if let Some(&i) = index.get(&e) {
            return Ok(i);
        }
        if elems.len() >= MAX_FREE {
            return Err(Error::BudgetExceeded(format!("free model beyond {MAX_FREE} elements")));
        }
        index.insert(e.clone(), elems.len() as u32);
        elems.push(e);
        Ok(elems.len() as u32 - 1)
    };
    let gens = (0..n).map(|g| push(coords.iter().map(|(_, a)| a[g]).collect(), &mut elems)).collect::<Result<Vec<u32>>>()?;
    let apply = |o: usize, args: &[&Vec<u32>]| -> Result<Vec<u32>> {
        coords
            .iter()
            .enumerate()
            .map(|(c, (k, _))| theory.models[*k].apply(o, &args.iter().map(|e| e[c]).collect::<Vec<_>>()))
            .collect()
    };
    // saturate: apply every operation to every tuple of known elements
    let mut done = 0usize;
    loop {
        let before = elems.len();
        for (o, (_, arity)) in sig.ops.iter().enumerate() {
            for a in tuples(before as u32, *arity) {
                if *arity > 0 && a.iter().all(|&x| (x as usize) < done) {
                    continue;
                }
                let args: Vec<&Vec<u32>> = a.iter().map(|&x| &elems[x as usize]).collect();
                let v = apply(o, &args)?;
                push(v, &mut elems)?;
            }
        }
        done = before;
        if elems.len() == before {
            break;
        }
    }
    let size = elems.len() as u32;
    let tables = sig
        .ops
        .iter()
        .enumerate()
        .map(|(o, (_, arity))| {
            tuples(size, *arity)
                .map(|a| {
                    let args: Vec<&Vec<u32>> = a.iter().map(|&x| &elems[x as usize]).collect();
                    apply(o, &args).map(|v| index[&v])
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((FiniteModel { size, tables }, gens))
}

/// Reads a theory-table file:
///
/// ```text
/// theory: pointed
/// carrier: 2
/// op pt/0: 0
/// op m/2: 0 1 1 0
/// equation: m(x, pt) = x
/// ```
///
/// Several `carrier:` blocks list several generating models.
pub fn parse_table_theory(src: &str) -> Result<TableTheory> {
    let mut name = None;
    let mut ops: Vec<(String, usize)> = Vec::new();
    let mut models: Vec<(u32, Vec<Vec<u32>>)> = Vec::new();
    let mut eq_lines = Vec::new();
    for (k, raw) in src.lines().enumerate() {
        let n = k + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("theory:") {
            if name.replace(rest.trim().to_string()).is_some() {
                return parse_err(n, "theory named twice");
            }
        } else if let Some(rest) = line.strip_prefix("carrier:") {
            let size = rest.trim().parse::<u32>().map_err(|_| Error::Parse { line: n, msg: format!("bad carrier size `{}`", rest.trim()) })?;
            models.push((size, Vec::new()));
        } else if let Some(rest) = line.strip_prefix("op ") {
            let (head, table) = rest.split_once(':').ok_or(Error::Parse { line: n, msg: "expected `op name/arity: entries`".into() })?;
            let (op, arity) = head.trim().split_once('/').ok_or(Error::Parse { line: n, msg: "expected `name/arity`".into() })?;
            let arity = arity.trim().parse::<usize>().map_err(|_| Error::Parse { line: n, msg: format!("bad arity `{arity}`") })?;
            let first = models.len() == 1;
            let Some((size, tables)) = models.last_mut() else { return parse_err(n, "operation table before `carrier:`") };
            let pos = tables.len();
            match ops.get(pos) {
                Some((o, a)) if o == op.trim() && *a == arity => {}
                Some((o, _)) => return parse_err(n, format!("expected table for {o}, found {}", op.trim())),
                None if first => ops.push((op.trim().to_string(), arity)),
                None => return parse_err(n, format!("operation {} not declared by the first model", op.trim())),
            }
            let entries = table
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| Error::Parse { line: n, msg: format!("bad table entry `{t}`") }))
                .collect::<Result<Vec<u32>>>()?;
            if entries.len() != (*size as usize).pow(arity as u32) {
                return parse_err(n, format!("table of {} needs {} entries, found {}", op.trim(), (*size as usize).pow(arity as u32), entries.len()));
            }
            tables.push(entries);
        } else if let Some(rest) = line.strip_prefix("equation:") {
            eq_lines.push((n, rest.to_string()));
        } else {
            return parse_err(n, format!("unrecognized line `{line}`"));
        }
    }
    let name = name.ok_or(Error::Parse { line: 0, msg: "missing `theory:`".into() })?;
    if models.is_empty() {
        return parse_err(0, "no `carrier:` block");
    }
    let mut sig = TheorySignature { name, ops, equations: Vec::new() };
    for (n, text) in eq_lines {
        let (l, r) = text.split_once('=').ok_or(Error::Parse { line: n, msg: "expected `lhs = rhs`".into() })?;
        let mut vars = Vec::new();
        let lt = sig.parse_term(l, &mut vars, true, n)?;
        let rt = sig.parse_term(r, &mut vars, true, n)?;
        sig.equations.push((lt, rt));
    }
    let models: Vec<FiniteModel> = models.into_iter().map(|(size, tables)| FiniteModel { size, tables }).collect();
    for m in &models {
        if m.tables.len() != sig.ops.len() {
            return Err(Error::Validation(format!("a model of {} lacks operation tables", sig.name)));
        }
        m.validate(&sig)?;
    }
    Ok(TableTheory { sig, models })
}
