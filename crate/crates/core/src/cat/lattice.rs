//! The interval: free bounded distributive lattice on k generators.
//!
//! Elements are stored as the antichain of minimal true subsets of the
//! generators, i.e. as monotone Boolean functions in disjunctive normal form.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 6;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalElement {
    arity: u8,
    sets: Vec<u32>,
}

fn minimize(mut sets: Vec<u32>) -> Vec<u32> {
    sets.sort_by_key(|s| (s.count_ones(), *s));
    sets.dedup();
    let mut kept: Vec<u32> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|&k| k & !s == 0) {
            kept.push(s);
        }
    }
    kept.sort_unstable();
    kept
}

impl IntervalElement {
    pub fn zero(arity: usize) -> Self {
        IntervalElement { arity: arity as u8, sets: Vec::new() }
    }

    pub fn one(arity: usize) -> Self {
        IntervalElement { arity: arity as u8, sets: vec![0] }
    }

    pub fn generator(arity: usize, i: usize) -> Result<Self> {
        if i >= arity {
            return Err(Error::ArityMismatch(format!("generator i{i} at arity {arity}")));
        }
        Ok(IntervalElement { arity: arity as u8, sets: vec![1 << i] })
    }

    /// Builds an element from any family of true subsets; the result is minimized.
    pub fn from_sets(arity: usize, sets: Vec<u32>) -> Result<Self> {
        let bound = 1u32 << arity;
        if let Some(s) = sets.iter().find(|&&s| s >= bound) {
            return Err(Error::ArityMismatch(format!("subset {s:#b} at arity {arity}")));
        }
        Ok(IntervalElement { arity: arity as u8, sets: minimize(sets) })
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn sets(&self) -> &[u32] {
        &self.sets
    }

    pub fn is_zero(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.sets == [0]
    }

    fn same_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch(format!("arities {} and {}", self.arity, other.arity)));
        }
        Ok(())
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.same_arity(other)?;
        let mut sets = Vec::with_capacity(self.sets.len() * other.sets.len());
        for &a in &self.sets {
            for &b in &other.sets {
                sets.push(a | b);
            }
        }
        Ok(IntervalElement { arity: self.arity, sets: minimize(sets) })
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.same_arity(other)?;
        let mut sets = self.sets.clone();
        sets.extend_from_slice(&other.sets);
        Ok(IntervalElement { arity: self.arity, sets: minimize(sets) })
    }

    /// Evaluates at a vertex of the cube; bit j of `point` is the value of generator j.
    pub fn eval(&self, point: u32) -> bool {
        self.sets.iter().any(|&s| s & !point == 0)
    }

    /// Truth table over all 2^k vertices, bit p set iff true at vertex p.
    pub fn truth_table(&self) -> u64 {
        let mut tt = 0u64;
        for p in 0..(1u32 << self.arity) {
            if self.eval(p) {
                tt |= 1 << p;
            }
        }
        tt
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.truth_table() & !other.truth_table() == 0
    }

    /// Substitutes `args[j]` for generator j. All arguments share one arity, which becomes
    /// the arity of the result.
    pub fn subst(&self, args: &[IntervalElement], arity: usize) -> Result<Self> {
        if args.len() != self.arity() {
            return Err(Error::ArityMismatch(format!(
                "substituting {} arguments into arity {}",
                args.len(),
                self.arity
            )));
        }
        if let Some(a) = args.iter().find(|a| a.arity() != arity) {
            return Err(Error::ArityMismatch(format!("argument of arity {} where {arity} expected", a.arity)));
        }
        let mut acc = IntervalElement::zero(arity);
        for &s in &self.sets {
            let mut term = IntervalElement::one(arity);
            for (j, a) in args.iter().enumerate() {
                if s & (1 << j) != 0 {
                    term = term.meet(a)?;
                }
            }
            acc = acc.join(&term)?;
        }
        Ok(acc)
    }

    fn from_truth_table(arity: usize, tt: u64) -> Self {
        let pts: Vec<u32> = (0..(1u32 << arity)).filter(|p| tt & (1 << p) != 0).collect();
        IntervalElement { arity: arity as u8, sets: minimize(pts) }
    }

    /// All elements of the given arity, in a fixed order.
    pub fn enumerate(arity: usize) -> Result<Vec<Self>> {
        if arity > MAX_ARITY {
            return Err(Error::BudgetExceeded(format!("interval arity {arity} above {MAX_ARITY}")));
        }
        // monotone f on k+1 variables = (f0, f1) with f0 <= f1 on k variables
        let mut tables: Vec<u64> = vec![0, 1];
        for k in 0..arity {
            let half = 1u32 << k;
            let mut next = Vec::new();
            for &f0 in &tables {
                for &f1 in &tables {
                    if f0 & !f1 == 0 {
                        next.push(f0 | (f1 << half));
                    }
                }
            }
            tables = next;
        }
        let mut out: Vec<Self> = tables.into_iter().map(|t| Self::from_truth_table(arity, t)).collect();
        out.sort();
        Ok(out)
    }
}

impl fmt::Debug for IntervalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntervalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sets.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .sets
            .iter()
            .map(|&s| {
                if s == 0 {
                    "1".to_string()
                } else {
                    (0..32).filter(|j| s & (1 << j) != 0).map(|j| format!("i{j}")).collect::<Vec<_>>().join("&")
                }
            })
            .collect();
        write!(f, "{}", terms.join(" | "))
    }
}

/// Raw lattice expressions before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DlTerm {
    Zero,
    One,
    Gen(usize),
    Meet(Box<DlTerm>, Box<DlTerm>),
    Join(Box<DlTerm>, Box<DlTerm>),
}

impl DlTerm {
    pub fn meet(a: DlTerm, b: DlTerm) -> DlTerm {
        DlTerm::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: DlTerm, b: DlTerm) -> DlTerm {
        DlTerm::Join(Box::new(a), Box::new(b))
    }

    /// Parses `0`, `1`, `i<n>`, `&`, `|` and parentheses; `&` binds tighter.
    pub fn parse(src: &str) -> std::result::Result<DlTerm, String> {
        let toks = tokenize(src)?;
        let mut pos = 0;
        let t = parse_join(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(format!("unexpected token {:?} in lattice expression", toks[pos]));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Zero,
    One,
    Gen(usize),
    And,
    Or,
    Open,
    Close,
}

fn tokenize(src: &str) -> std::result::Result<Vec<Tok>, String> {
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' => i += 1,
            '0' => {
                out.push(Tok::Zero);
                i += 1
            }
            '1' => {
                out.push(Tok::One);
                i += 1
            }
            '&' => {
                out.push(Tok::And);
                i += 1
            }
            '|' => {
                out.push(Tok::Or);
                i += 1
            }
            '(' => {
                out.push(Tok::Open);
                i += 1
            }
            ')' => {
                out.push(Tok::Close);
                i += 1
            }
            'i' => {
                let start = i + 1;
                let mut j = start;
                while j < cs.len() && cs[j].is_ascii_digit() {
                    j += 1;
                }
                if j == start {
                    return Err("generator `i` needs an index".into());
                }
                let n: String = cs[start..j].iter().collect();
                out.push(Tok::Gen(n.parse().map_err(|_| format!("bad generator index {n}"))?));
                i = j;
            }
            other => return Err(format!("unexpected character {other:?} in lattice expression")),
        }
    }
    Ok(out)
}

fn parse_join(t: &[Tok], pos: &mut usize) -> std::result::Result<DlTerm, String> {
    let mut lhs = parse_meet(t, pos)?;
    while *pos < t.len() && t[*pos] == Tok::Or {
        *pos += 1;
        lhs = DlTerm::join(lhs, parse_meet(t, pos)?);
    }
    Ok(lhs)
}

fn parse_meet(t: &[Tok], pos: &mut usize) -> std::result::Result<DlTerm, String> {
    let mut lhs = parse_atom(t, pos)?;
    while *pos < t.len() && t[*pos] == Tok::And {
        *pos += 1;
        lhs = DlTerm::meet(lhs, parse_atom(t, pos)?);
    }
    Ok(lhs)
}

fn parse_atom(t: &[Tok], pos: &mut usize) -> std::result::Result<DlTerm, String> {
    let tok = t.get(*pos).ok_or("unexpected end of lattice expression")?.clone();
    *pos += 1;
    match tok {
        Tok::Zero => Ok(DlTerm::Zero),
        Tok::One => Ok(DlTerm::One),
        Tok::Gen(n) => Ok(DlTerm::Gen(n)),
        Tok::Open => {
            let inner = parse_join(t, pos)?;
            if t.get(*pos) != Some(&Tok::Close) {
                return Err("missing `)`".into());
            }
            *pos += 1;
            Ok(inner)
        }
        other => Err(format!("unexpected token {other:?}")),
    }
}

pub fn dl_normalize(term: &DlTerm, arity: usize) -> Result<IntervalElement> {
    match term {
        DlTerm::Zero => Ok(IntervalElement::zero(arity)),
        DlTerm::One => Ok(IntervalElement::one(arity)),
        DlTerm::Gen(i) => IntervalElement::generator(arity, *i),
        DlTerm::Meet(a, b) => dl_normalize(a, arity)?.meet(&dl_normalize(b, arity)?),
        DlTerm::Join(a, b) => dl_normalize(a, arity)?.join(&dl_normalize(b, arity)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(i: usize) -> DlTerm {
        DlTerm::Gen(i)
    }

    // every Boolean function on k inputs, keep the monotone ones
    fn brute_monotone_count(k: usize) -> usize {
        let n = 1usize << k;
        (0u64..(1u64 << n))
            .filter(|&tt| {
                (0..n).all(|p| (0..n).all(|q| !(p & q == p && tt >> p & 1 == 1 && tt >> q & 1 == 0)))
            })
            .count()
    }

    #[test]
    fn dedekind_counts_match_brute_force() {
        for k in 0..=3 {
            assert_eq!(IntervalElement::enumerate(k).unwrap().len(), brute_monotone_count(k));
        }
        assert_eq!(IntervalElement::enumerate(2).unwrap().len(), 6);
        assert_eq!(IntervalElement::enumerate(3).unwrap().len(), 20);
        assert_eq!(IntervalElement::enumerate(4).unwrap().len(), 168);
    }

    #[test]
    fn absorption_and_distributivity() {
        let t = DlTerm::meet(g(0), DlTerm::join(g(0), g(1)));
        assert_eq!(dl_normalize(&t, 2).unwrap(), IntervalElement::generator(2, 0).unwrap());
        let lhs = DlTerm::meet(DlTerm::join(g(0), g(1)), DlTerm::join(g(0), g(2)));
        let rhs = DlTerm::join(g(0), DlTerm::meet(g(1), g(2)));
        assert_eq!(dl_normalize(&lhs, 3).unwrap(), dl_normalize(&rhs, 3).unwrap());
    }

    #[test]
    fn out_of_range_generator() {
        assert!(matches!(dl_normalize(&g(2), 2), Err(Error::ArityMismatch(_))));
    }

    #[test]
    fn parse_round_trip() {
        let t = DlTerm::parse("i0 & (i0 | i1)").unwrap();
        assert_eq!(dl_normalize(&t, 2).unwrap().to_string(), "i0");
        assert!(DlTerm::parse("i0 &").is_err());
    }

    fn arb_term(k: usize) -> impl Strategy<Value = DlTerm> {
        let leaf = prop_oneof![Just(DlTerm::Zero), Just(DlTerm::One), (0..k).prop_map(DlTerm::Gen)];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| DlTerm::meet(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| DlTerm::join(a, b)),
            ]
        })
    }

    fn eval_term(t: &DlTerm, p: u32) -> bool {
        match t {
            DlTerm::Zero => false,
            DlTerm::One => true,
            DlTerm::Gen(i) => p >> i & 1 == 1,
            DlTerm::Meet(a, b) => eval_term(a, p) && eval_term(b, p),
            DlTerm::Join(a, b) => eval_term(a, p) || eval_term(b, p),
        }
    }

    proptest! {
        #[test]
        fn normal_form_agrees_with_semantics(t in arb_term(3)) {
            let n = dl_normalize(&t, 3).unwrap();
            for p in 0..8 {
                prop_assert_eq!(n.eval(p), eval_term(&t, p));
            }
            let again = IntervalElement::from_sets(3, n.sets().to_vec()).unwrap();
            prop_assert_eq!(again, n);
        }

        #[test]
        fn substitution_is_composition(a in arb_term(2), b0 in arb_term(3), b1 in arb_term(3)) {
            let a = dl_normalize(&a, 2).unwrap();
            let args = [dl_normalize(&b0, 3).unwrap(), dl_normalize(&b1, 3).unwrap()];
            let s = a.subst(&args, 3).unwrap();
            for p in 0..8u32 {
                let inner = (args[0].eval(p) as u32) | ((args[1].eval(p) as u32) << 1);
                prop_assert_eq!(s.eval(p), a.eval(inner));
            }
        }
    }
}
