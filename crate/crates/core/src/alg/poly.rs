//! Multivariate polynomials over a prime field, in graded reverse lexicographic order.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{parse_err, Error, Result};

pub type Monomial = Vec<u16>;

pub fn degree(m: &[u16]) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Graded reverse lexicographic comparison.
pub fn grevlex(a: &[u16], b: &[u16]) -> Ordering {
    degree(a).cmp(&degree(b)).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

pub fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u16], b: &[u16]) -> Monomial {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

fn quotient(a: &[u16], b: &[u16]) -> Monomial {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

fn times(a: &[u16], b: &[u16]) -> Monomial {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

/// Terms sorted by descending grevlex, coefficients in `1..p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    pub terms: Vec<(Monomial, u32)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&(Monomial, u32)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| degree(m)).max()
    }
}

/// `F_p[x_1, …, x_n]` with named variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    pub p: u32,
    pub vars: Vec<String>,
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl PolyRing {
    pub fn new(p: u32, vars: Vec<String>) -> Result<PolyRing> {
        if !is_prime(p) || p > u16::MAX as u32 {
            return Err(Error::UnsupportedTheory(format!("characteristic {p} is not a supported prime")));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::Validation(format!("variable {v} declared twice")));
            }
        }
        Ok(PolyRing { p, vars })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn one_monomial(&self) -> Monomial {
        vec![0; self.nvars()]
    }

    pub fn constant(&self, c: i64) -> Poly {
        let c = c.rem_euclid(self.p as i64) as u32;
        if c == 0 {
            Poly::zero()
        } else {
            Poly { terms: vec![(self.one_monomial(), c)] }
        }
    }

    pub fn var(&self, i: usize) -> Poly {
        let mut m = self.one_monomial();
        m[i] = 1;
        Poly { terms: vec![(m, 1)] }
    }

    pub fn monomial(&self, m: Monomial, c: u32) -> Poly {
        self.normalize(vec![(m, c)])
    }

    fn normalize(&self, mut terms: Vec<(Monomial, u32)>) -> Poly {
        terms.sort_by(|a, b| grevlex(&b.0, &a.0));
        let mut out: Vec<(Monomial, u32)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = (*lc + c) % self.p,
                _ => out.push((m, c % self.p)),
            }
            if out.last().is_some_and(|t| t.1 == 0) {
                out.pop();
            }
        }
        Poly { terms: out }
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < a.terms.len() || j < b.terms.len() {
            let ord = match (a.terms.get(i), b.terms.get(j)) {
                (Some(x), Some(y)) => grevlex(&x.0, &y.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(a.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = (a.terms[i].1 + b.terms[j].1) % self.p;
                    if c != 0 {
                        out.push((a.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Poly { terms: out }
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        self.scale(a, self.p - 1)
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Poly, c: u32) -> Poly {
        let c = c % self.p;
        if c == 0 {
            return Poly::zero();
        }
        Poly { terms: a.terms.iter().map(|(m, x)| (m.clone(), ((*x as u64 * c as u64) % self.p as u64) as u32)).collect() }
    }

    /// `c·m·a`.
    pub fn shift(&self, a: &Poly, m: &[u16], c: u32) -> Poly {
        let c = c % self.p;
        if c == 0 {
            return Poly::zero();
        }
        // multiplying by a monomial preserves the order
        Poly { terms: a.terms.iter().map(|(n, x)| (times(n, m), ((*x as u64 * c as u64) % self.p as u64) as u32)).collect() }
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut terms = Vec::with_capacity(a.terms.len() * b.terms.len());
        for (m, x) in &a.terms {
            for (n, y) in &b.terms {
                terms.push((times(m, n), ((*x as u64 * *y as u64) % self.p as u64) as u32));
            }
        }
        self.normalize(terms)
    }

    pub fn pow(&self, a: &Poly, e: u32) -> Poly {
        let mut acc = self.constant(1);
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn inv(&self, c: u32) -> u32 {
        let (mut r, mut b, mut e) = (1u64, c as u64 % self.p as u64, self.p as u64 - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p as u64;
            }
            b = b * b % self.p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        match a.lead() {
            Some(&(_, c)) => self.scale(a, self.inv(c)),
            None => Poly::zero(),
        }
    }

    /// `lcm/lt(a)·a − lcm/lt(b)·b` for monic a, b.
    pub fn s_poly(&self, a: &Poly, b: &Poly) -> Poly {
        let (la, lb) = (&a.terms[0].0, &b.terms[0].0);
        let l = lcm(la, lb);
        let fa = self.shift(a, &quotient(&l, la), self.inv(a.terms[0].1));
        let fb = self.shift(b, &quotient(&l, lb), self.inv(b.terms[0].1));
        self.sub(&fa, &fb)
    }

    /// Substitutes `images[i]` (polynomials in `target`) for variable i.
    pub fn eval_in(&self, a: &Poly, target: &PolyRing, images: &[Poly], reduce: impl Fn(Poly) -> Poly) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in &a.terms {
            let mut t = target.constant(*c as i64);
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t = reduce(target.mul(&t, &images[i]));
                }
            }
            acc = target.add(&acc, &t);
        }
        reduce(acc)
    }

    /// Re-embeds a polynomial whose variables map to `positions` of this ring.
    pub fn embed(&self, a: &Poly, positions: &[usize]) -> Poly {
        self.normalize(
            a.terms
                .iter()
                .map(|(m, c)| {
                    let mut n = self.one_monomial();
                    for (i, &e) in m.iter().enumerate() {
                        n[positions[i]] += e;
                    }
                    (n, *c)
                })
                .collect(),
        )
    }

    pub fn display(&self, a: &Poly) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in a.terms.iter().enumerate() {
            if k > 0 {
                out.push_str(" + ");
            }
            let mut factors = Vec::new();
            if *c != 1 || m.iter().all(|&e| e == 0) {
                factors.push(c.to_string());
            }
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    e => factors.push(format!("{}^{e}", self.vars[i])),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Parses `+ - * ^`, integer constants, parentheses and the ring's variables.
    pub fn parse(&self, src: &str, line: usize) -> Result<Poly> {
        let toks = tokenize(src, line)?;
        let mut p = Parser { ring: self, toks, pos: 0, line };
        let out = p.sum()?;
        if p.pos != p.toks.len() {
            return parse_err(line, format!("unexpected {} in polynomial", p.toks[p.pos]));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
        }
    }
}

fn tokenize(src: &str, line: usize) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s: String = cs[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
            i += s.len();
            out.push(Tok::Num(s.parse().map_err(|_| Error::Parse { line, msg: format!("constant {s} too large") })?));
        } else if c.is_alphabetic() || c == '_' {
            let s: String = cs[i..].iter().take_while(|c| c.is_alphanumeric() || **c == '_' || **c == '\'').collect();
            i += s.chars().count();
            out.push(Tok::Ident(s));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return parse_err(line, format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a PolyRing,
    toks: Vec<Tok>,
    pos: usize,
    line: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn sum(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                let t = self.product()?;
                self.ring.neg(&t)
            }
            _ => self.product()?,
        };
        while let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.product()?;
            acc = if c == '+' { self.ring.add(&acc, &t) } else { self.ring.sub(&acc, &t) };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('*')) => {
                    self.pos += 1;
                    let t = self.power()?;
                    acc = self.ring.mul(&acc, &t);
                }
                // juxtaposition: `2x`, `x y`, `x(y+1)`
                Some(Tok::Num(_) | Tok::Ident(_) | Tok::Sym('(')) => {
                    let t = self.power()?;
                    acc = self.ring.mul(&acc, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if let Some(Tok::Sym('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(e)) if e <= 64 => {
                    self.pos += 1;
                    Ok(self.ring.pow(&base, e as u32))
                }
                Some(Tok::Num(e)) => parse_err(self.line, format!("exponent {e} too large")),
                Some(t) => parse_err(self.line, format!("expected exponent, found {t}")),
                None => parse_err(self.line, "expected exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        let t = self.peek().cloned();
        self.pos += 1;
        match t {
            Some(Tok::Num(n)) => Ok(self.ring.constant((n % self.ring.p as u64) as i64)),
            Some(Tok::Ident(v)) => match self.ring.vars.iter().position(|x| *x == v) {
                Some(i) => Ok(self.ring.var(i)),
                None => Err(Error::Validation(format!("line {}: generator {v} is not in scope", self.line))),
            },
            Some(Tok::Sym('(')) => {
                let inner = self.sum()?;
                match self.peek() {
                    Some(Tok::Sym(')')) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => parse_err(self.line, "unbalanced parenthesis"),
                }
            }
            Some(t) => parse_err(self.line, format!("unexpected {t}")),
            None => parse_err(self.line, "polynomial ends early"),
        }
    }
}
