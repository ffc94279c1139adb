use std::collections::HashMap;

use crate::error::{parse_err, Error, Result};

pub type Obj = usize;
pub type Mor = usize;

const NONE: u32 = u32::MAX;

/// A category with finitely many objects and morphisms and a stored composition table.
/// Every category the workbench computes over is materialized into this form.
#[derive(Clone)]
pub struct Cat {
    obj_names: Vec<String>,
    mor_names: Vec<String>,
    src: Vec<Obj>,
    dst: Vec<Obj>,
    ids: Vec<Mor>,
    comp: Vec<u32>,
    homs: Vec<Vec<Vec<Mor>>>,
    into: Vec<Vec<Mor>>,
}

impl std::fmt::Debug for Cat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cat({} objects, {} morphisms)", self.obj_names.len(), self.mor_names.len())
    }
}

pub const MAX_MORPHISMS: usize = 6000;

impl Cat {
    /// Builds a category from morphism data and a composition function `(g, f) -> g ∘ f`,
    /// called for every composable pair. Laws are not checked here; see [`Cat::validate`].
    pub fn build(
        obj_names: Vec<String>,
        morphisms: Vec<(String, Obj, Obj)>,
        ids: Vec<Mor>,
        mut compose: impl FnMut(Mor, Mor) -> Result<Mor>,
    ) -> Result<Cat> {
        let n = morphisms.len();
        if n > MAX_MORPHISMS {
            return Err(Error::BudgetExceeded(format!("{n} morphisms exceed the materialization bound")));
        }
        let nobj = obj_names.len();
        let mut mor_names = Vec::with_capacity(n);
        let mut src = Vec::with_capacity(n);
        let mut dst = Vec::with_capacity(n);
        for (name, s, d) in morphisms {
            if s >= nobj || d >= nobj {
                return Err(Error::Validation(format!("morphism {name} has an unknown endpoint")));
            }
            mor_names.push(name);
            src.push(s);
            dst.push(d);
        }
        let mut homs = vec![vec![Vec::new(); nobj]; nobj];
        let mut into = vec![Vec::new(); nobj];
        for f in 0..n {
            homs[src[f]][dst[f]].push(f);
            into[dst[f]].push(f);
        }
        let mut comp = vec![NONE; n * n];
        for f in 0..n {
            for &g in homs[dst[f]].iter().flatten() {
                let h = compose(g, f)?;
                if h >= n {
                    return Err(Error::Validation(format!("composite of {} and {} out of range", mor_names[g], mor_names[f])));
                }
                comp[g * n + f] = h as u32;
            }
        }
        if ids.len() != nobj {
            return Err(Error::Validation("one identity per object required".into()));
        }
        Ok(Cat { obj_names, mor_names, src, dst, ids, comp, homs, into })
    }

    pub fn object_count(&self) -> usize {
        self.obj_names.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.mor_names.len()
    }

    pub fn object_name(&self, x: Obj) -> &str {
        &self.obj_names[x]
    }

    pub fn morphism_name(&self, f: Mor) -> &str {
        &self.mor_names[f]
    }

    pub fn object_by_name(&self, name: &str) -> Option<Obj> {
        self.obj_names.iter().position(|n| n == name)
    }

    pub fn morphism_by_name(&self, name: &str) -> Option<Mor> {
        self.mor_names.iter().position(|n| n == name)
    }

    pub fn src(&self, f: Mor) -> Obj {
        self.src[f]
    }

    pub fn dst(&self, f: Mor) -> Obj {
        self.dst[f]
    }

    pub fn id(&self, x: Obj) -> Mor {
        self.ids[x]
    }

    pub fn is_id(&self, f: Mor) -> bool {
        self.ids[self.src[f]] == f
    }

    /// `g ∘ f`; panics when `dst f != src g`.
    pub fn compose(&self, g: Mor, f: Mor) -> Mor {
        let h = self.comp[g * self.mor_names.len() + f];
        assert!(h != NONE, "composing non-composable {} . {}", self.mor_names[g], self.mor_names[f]);
        h as Mor
    }

    /// Morphisms `x -> y`.
    pub fn homs(&self, x: Obj, y: Obj) -> &[Mor] {
        &self.homs[x][y]
    }

    /// All morphisms with codomain `x`.
    pub fn incoming(&self, x: Obj) -> &[Mor] {
        &self.into[x]
    }

    pub fn objects(&self) -> std::ops::Range<Obj> {
        0..self.obj_names.len()
    }

    pub fn morphisms(&self) -> std::ops::Range<Mor> {
        0..self.mor_names.len()
    }

    /// Checks identities, unit laws and associativity on every composable pair and triple.
    pub fn validate(&self) -> Result<()> {
        for x in self.objects() {
            let i = self.ids[x];
            if self.src[i] != x || self.dst[i] != x {
                return Err(Error::Validation(format!("identity of {} has wrong endpoints", self.obj_names[x])));
            }
        }
        for f in self.morphisms() {
            let (s, d) = (self.src[f], self.dst[f]);
            if self.compose(self.ids[d], f) != f || self.compose(f, self.ids[s]) != f {
                return Err(Error::Validation(format!("unit law fails at {}", self.mor_names[f])));
            }
            for &g in self.homs[d].iter().flatten() {
                let gf = self.compose(g, f);
                if self.src[gf] != s || self.dst[gf] != self.dst[g] {
                    return Err(Error::Validation(format!(
                        "composite {} . {} has wrong endpoints",
                        self.mor_names[g], self.mor_names[f]
                    )));
                }
                for &h in self.homs[self.dst[g]].iter().flatten() {
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                        return Err(Error::Validation(format!(
                            "associativity fails at {} . {} . {}",
                            self.mor_names[h], self.mor_names[g], self.mor_names[f]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn terminal() -> Cat {
        Cat::build(vec!["*".into()], vec![("id".into(), 0, 0)], vec![0], |_, _| Ok(0)).expect("terminal")
    }

    /// Objects with identities only.
    pub fn discrete(n: usize) -> Cat {
        let names = (0..n).map(|i| format!("o{i}")).collect();
        let mors = (0..n).map(|i| (format!("id_o{i}"), i, i)).collect();
        Cat::build(names, mors, (0..n).collect(), |g, _| Ok(g)).expect("discrete")
    }

    /// `a -> b` with one non-identity arrow `f`.
    pub fn walking_arrow() -> Cat {
        let mors = vec![("id_a".into(), 0, 0), ("id_b".into(), 1, 1), ("f".into(), 0, 1)];
        Cat::build(vec!["a".into(), "b".into()], mors, vec![0, 1], |g, f| Ok(if g == 2 { 2 } else { f }))
            .expect("walking arrow")
    }

    /// The commuting square `a -> b -> d`, `a -> c -> d` with the diagonal as common composite.
    pub fn commutative_square() -> Cat {
        let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let mors: Vec<(String, Obj, Obj)> = vec![
            ("id_a".into(), 0, 0),
            ("id_b".into(), 1, 1),
            ("id_c".into(), 2, 2),
            ("id_d".into(), 3, 3),
            ("f".into(), 0, 1),
            ("g".into(), 0, 2),
            ("h".into(), 1, 3),
            ("k".into(), 2, 3),
            ("diag".into(), 0, 3),
        ];
        Cat::build(names, mors, vec![0, 1, 2, 3], |g, f| {
            Ok(match (g, f) {
                (g, f) if g < 4 => f,
                (g, f) if f < 4 => g,
                (6, 4) | (7, 5) => 8,
                _ => return Err(Error::Validation("unexpected pair".into())),
            })
        })
        .expect("square")
    }

    /// Builds a named category by lookup.
    pub fn named(name: &str) -> Option<Cat> {
        match name {
            "terminal" => Some(Cat::terminal()),
            "walking-arrow" | "arrow" => Some(Cat::walking_arrow()),
            "square" | "commutative-square" => Some(Cat::commutative_square()),
            "discrete2" => Some(Cat::discrete(2)),
            "empty" => Some(Cat::discrete(0)),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        let mut s = String::from("category\n");
        s.push_str(&format!("objects: {}\n", self.obj_names.join(" ")));
        s.push_str("homs:\n");
        for f in self.morphisms() {
            if !self.is_id(f) {
                s.push_str(&format!("  {}: {} -> {}\n", self.mor_names[f], self.obj_names[self.src[f]], self.obj_names[self.dst[f]]));
            }
        }
        s
    }
}

/// Lists `Hom(x, y)`.
pub fn enumerate_homs(cat: &Cat, x: Obj, y: Obj) -> Result<Vec<Mor>> {
    if x >= cat.object_count() || y >= cat.object_count() {
        return Err(Error::NotEnumerable(format!("object index out of range ({x}, {y})")));
    }
    Ok(cat.homs(x, y).to_vec())
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses the text category format. The first non-blank line must be `category`.
/// Sections: `objects: a b`, `homs:` with `name: src -> dst`, `id:` with `obj = name`,
/// and `compose:` with `g . f = h`. Identities default to `id_<obj>`, and composites
/// involving identities are implied; every other composable pair must be listed.
pub fn parse_category(text: &str) -> Result<Cat> {
    parse_category_lines(&text.lines().enumerate().map(|(i, l)| (i + 1, l.to_string())).collect::<Vec<_>>())
}

pub(crate) fn parse_category_lines(lines: &[(usize, String)]) -> Result<Cat> {
    #[derive(PartialEq, Clone, Copy)]
    enum Sec {
        None,
        Homs,
        Compose,
        Id,
    }
    let mut it = lines.iter().filter(|(_, l)| !strip_comment(l).trim().is_empty());
    match it.next() {
        Some((_, l)) if strip_comment(l).trim() == "category" => {}
        Some((n, _)) => return parse_err(*n, "expected header `category`"),
        None => return parse_err(1, "empty category file"),
    }
    let mut objects: Vec<String> = Vec::new();
    let mut homs: Vec<(String, String, String, usize)> = Vec::new();
    let mut ids: HashMap<String, (String, usize)> = HashMap::new();
    let mut comps: Vec<(String, String, String, usize)> = Vec::new();
    let mut sec = Sec::None;
    let mut saw_objects = false;
    for (n, raw) in it {
        let n = *n;
        let line = strip_comment(raw).trim();
        if let Some(rest) = line.strip_prefix("objects:") {
            if saw_objects {
                return parse_err(n, "duplicate `objects:` line");
            }
            saw_objects = true;
            for o in rest.split_whitespace() {
                if objects.iter().any(|x| x == o) {
                    return parse_err(n, format!("duplicate object {o}"));
                }
                objects.push(o.to_string());
            }
            sec = Sec::None;
            continue;
        }
        let (header, rest) = match line.split_once(':') {
            Some((h, r)) if ["homs", "compose", "id"].contains(&h.trim()) => (Some(h.trim()), r.trim()),
            _ => (None, line),
        };
        if let Some(h) = header {
            sec = match h {
                "homs" => Sec::Homs,
                "compose" => Sec::Compose,
                _ => Sec::Id,
            };
            if rest.is_empty() {
                continue;
            }
        }
        let entry = rest;
        match sec {
            Sec::None => return parse_err(n, format!("unexpected line {entry:?} outside a section")),
            Sec::Homs => {
                let (name, ends) = entry.split_once(':').ok_or(Error::Parse { line: n, msg: "expected `name: src -> dst`".into() })?;
                let (s, d) = ends.split_once("->").ok_or(Error::Parse { line: n, msg: "expected `src -> dst`".into() })?;
                homs.push((name.trim().to_string(), s.trim().to_string(), d.trim().to_string(), n));
            }
            Sec::Id => {
                let (o, name) = entry.split_once('=').ok_or(Error::Parse { line: n, msg: "expected `obj = name`".into() })?;
                let o = o.trim().to_string();
                if ids.insert(o.clone(), (name.trim().to_string(), n)).is_some() {
                    return parse_err(n, format!("identity of {o} given twice"));
                }
            }
            Sec::Compose => {
                let (lhs, h) = entry.split_once('=').ok_or(Error::Parse { line: n, msg: "expected `g . f = h`".into() })?;
                let (g, f) = lhs.split_once('.').ok_or(Error::Parse { line: n, msg: "expected `g . f` on the left".into() })?;
                comps.push((g.trim().to_string(), f.trim().to_string(), h.trim().to_string(), n));
            }
        }
    }
    if !saw_objects {
        return parse_err(lines.last().map(|l| l.0).unwrap_or(1), "missing `objects:` line");
    }
    let obj_index = |name: &str, line: usize| -> Result<Obj> {
        objects.iter().position(|o| o == name).ok_or(Error::Parse { line, msg: format!("unknown object {name}") })
    };
    for (o, (_, line)) in &ids {
        obj_index(o, *line)?;
    }
    let mut mors: Vec<(String, Obj, Obj)> = Vec::new();
    let mut id_mor = Vec::new();
    for (i, o) in objects.iter().enumerate() {
        let name = ids.get(o).map(|x| x.0.clone()).unwrap_or_else(|| format!("id_{o}"));
        mors.push((name, i, i));
        id_mor.push(i);
    }
    for (name, s, d, line) in &homs {
        if mors.iter().any(|m| &m.0 == name) {
            return parse_err(*line, format!("duplicate morphism name {name}"));
        }
        mors.push((name.clone(), obj_index(s, *line)?, obj_index(d, *line)?));
    }
    let mor_index = |name: &str, line: usize| -> Result<Mor> {
        mors.iter().position(|m| m.0 == name).ok_or(Error::Parse { line, msg: format!("unknown morphism {name}") })
    };
    let nobj = objects.len();
    let mut table: HashMap<(Mor, Mor), (Mor, usize)> = HashMap::new();
    for (g, f, h, line) in &comps {
        let (gi, fi, hi) = (mor_index(g, *line)?, mor_index(f, *line)?, mor_index(h, *line)?);
        if mors[fi].2 != mors[gi].1 {
            return parse_err(*line, format!("{g} . {f} is not composable"));
        }
        if mors[hi].1 != mors[fi].1 || mors[hi].2 != mors[gi].2 {
            return parse_err(*line, format!("{g} . {f} = {h} has mismatched endpoints"));
        }
        if table.insert((gi, fi), (hi, *line)).is_some() {
            return parse_err(*line, format!("composite {g} . {f} given twice"));
        }
    }
    let last_line = lines.last().map(|l| l.0).unwrap_or(1);
    let mut missing = None;
    for f in 0..mors.len() {
        for g in 0..mors.len() {
            if mors[f].2 != mors[g].1 || g < nobj || f < nobj {
                continue;
            }
            if !table.contains_key(&(g, f)) && missing.is_none() {
                missing = Some((g, f));
            }
        }
    }
    if let Some((g, f)) = missing {
        return parse_err(last_line, format!("composition table has no entry for {} . {}", mors[g].0, mors[f].0));
    }
    for ((g, f), (_, line)) in &table {
        if *g < nobj || *f < nobj {
            return parse_err(*line, "composites with identities are implied and must not be listed");
        }
    }
    let cat = Cat::build(objects, mors, id_mor, |g, f| {
        if g < nobj {
            Ok(f)
        } else if f < nobj {
            Ok(g)
        } else {
            Ok(table[&(g, f)].0)
        }
    })?;
    cat.validate()?;
    Ok(cat)
}
