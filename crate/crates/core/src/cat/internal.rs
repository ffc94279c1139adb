//! Internal categories in cubical sets, given stage by stage: a finite category C(k) for
//! each cube stage and a restriction functor C(k) -> C(l) for each cube map [l] -> [k].

use std::collections::HashMap;
use std::sync::Arc;

use super::category::{parse_category_lines, Cat, Mor, Obj};
use super::cube::{box_category, CubeCategory, CubeMap};
use super::lattice::{dl_normalize, DlTerm, IntervalElement};
use crate::error::{parse_err, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    pub obj: Vec<Obj>,
    pub mor: Vec<Mor>,
}

#[derive(Clone, Debug)]
pub struct InternalCategory {
    pub cube: Arc<CubeCategory>,
    pub stages: Vec<Cat>,
    /// Indexed by cube morphism.
    pub restrict: Vec<Functor>,
    pub constant: bool,
    pub name: String,
}

impl InternalCategory {
    pub fn dim(&self) -> usize {
        self.cube.dim()
    }

    /// The constant internal category on a finite category.
    pub fn constant(cat: &Cat, d: usize, name: &str) -> Result<InternalCategory> {
        let cube = Arc::new(box_category(d)?);
        let id = Functor { obj: cat.objects().collect(), mor: cat.morphisms().collect() };
        let restrict = vec![id; cube.maps().len()];
        Ok(InternalCategory { cube, stages: vec![cat.clone(); d + 1], restrict, constant: true, name: name.to_string() })
    }

    /// C0 = I with exactly one morphism between any two objects at each stage.
    pub fn codiscrete_interval(d: usize) -> Result<InternalCategory> {
        let cube = Arc::new(box_category(d)?);
        let elems: Vec<Vec<IntervalElement>> = (0..=d).map(IntervalElement::enumerate).collect::<Result<_>>()?;
        let mut stages = Vec::new();
        for es in &elems {
            let n = es.len();
            let names = es.iter().map(|e| e.to_string()).collect();
            let mut mors = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    mors.push((format!("{}>{}", es[x], es[y]), x, y));
                }
            }
            let ids = (0..n).map(|x| x * n + x).collect();
            stages.push(Cat::build(names, mors, ids, |g, f| Ok((f / n) * n + g % n))?);
        }
        let mut restrict = Vec::new();
        for m in cube.maps() {
            let (l, k) = (m.src, m.dst);
            let obj: Vec<Obj> = elems[k]
                .iter()
                .map(|r| {
                    let img = r.subst(&m.comps, l)?;
                    elems[l].iter().position(|e| *e == img).ok_or_else(|| Error::Validation("image missing".into()))
                })
                .collect::<Result<_>>()?;
            let (nk, nl) = (elems[k].len(), elems[l].len());
            let mor = (0..nk * nk).map(|f| obj[f / nk] * nl + obj[f % nk]).collect();
            restrict.push(Functor { obj, mor });
        }
        Ok(InternalCategory { cube, stages, restrict, constant: false, name: "codiscrete-interval".into() })
    }

    /// The discrete internal category on the same objects (C0 viewed as a category).
    pub fn objects_only(&self) -> InternalCategory {
        let stages: Vec<Cat> = self
            .stages
            .iter()
            .map(|c| {
                let names = c.objects().map(|x| c.object_name(x).to_string()).collect();
                let mors = c.objects().map(|x| (format!("id_{}", c.object_name(x)), x, x)).collect();
                Cat::build(names, mors, c.objects().collect(), |g, _| Ok(g)).expect("discrete")
            })
            .collect();
        let restrict = self.restrict.iter().map(|f| Functor { obj: f.obj.clone(), mor: f.obj.clone() }).collect();
        InternalCategory {
            cube: self.cube.clone(),
            stages,
            restrict,
            constant: self.constant,
            name: format!("{}-objects", self.name),
        }
    }

    /// Checks stage categories, functoriality of each restriction, and functoriality of
    /// restriction in the cube direction.
    pub fn validate(&self) -> Result<()> {
        let cube = &self.cube;
        if self.stages.len() != cube.dim() + 1 || self.restrict.len() != cube.maps().len() {
            return Err(Error::InternalLawViolation("stage or restriction count mismatch".into()));
        }
        for (k, c) in self.stages.iter().enumerate() {
            c.validate().map_err(|e| Error::InternalLawViolation(format!("stage {k}: {e}")))?;
        }
        for (fi, m) in cube.maps().iter().enumerate() {
            let (src, dst) = (&self.stages[m.dst], &self.stages[m.src]);
            let fun = &self.restrict[fi];
            let bad = |what: &str| Error::InternalLawViolation(format!("restriction along {}: {what}", m.name()));
            if fun.obj.len() != src.object_count() || fun.mor.len() != src.morphism_count() {
                return Err(bad("table size"));
            }
            if fun.obj.iter().any(|&x| x >= dst.object_count()) || fun.mor.iter().any(|&f| f >= dst.morphism_count()) {
                return Err(bad("index out of range"));
            }
            for a in src.morphisms() {
                let fa = fun.mor[a];
                if dst.src(fa) != fun.obj[src.src(a)] || dst.dst(fa) != fun.obj[src.dst(a)] {
                    return Err(bad("endpoints not preserved"));
                }
                for &b in src.incoming(src.src(a)) {
                    if fun.mor[src.compose(a, b)] != dst.compose(fa, fun.mor[b]) {
                        return Err(bad("composition not preserved"));
                    }
                }
            }
            for x in src.objects() {
                if fun.mor[src.id(x)] != dst.id(fun.obj[x]) {
                    return Err(bad("identity not preserved"));
                }
            }
            if *m == CubeMap::identity(m.src) && (fun.obj.iter().enumerate().any(|(i, &x)| i != x) || fun.mor.iter().enumerate().any(|(i, &x)| i != x)) {
                return Err(bad("identity cube map acts nontrivially"));
            }
        }
        for (gi, g) in cube.maps().iter().enumerate() {
            for (fi, f) in cube.maps().iter().enumerate() {
                if f.dst != g.src {
                    continue;
                }
                let gf = cube.compose(gi, fi)?;
                let (fg, ff, fgf) = (&self.restrict[gi], &self.restrict[fi], &self.restrict[gf]);
                let objs_ok = fg.obj.iter().enumerate().all(|(x, &y)| ff.obj[y] == fgf.obj[x]);
                let mors_ok = fg.mor.iter().enumerate().all(|(a, &b)| ff.mor[b] == fgf.mor[a]);
                if !objs_ok || !mors_ok {
                    return Err(Error::InternalLawViolation(format!("restriction not functorial at {} . {}", g.name(), f.name())));
                }
            }
        }
        Ok(())
    }

    pub fn named(name: &str, d: usize) -> Result<InternalCategory> {
        match name {
            "codiscrete-interval" => InternalCategory::codiscrete_interval(d),
            other => {
                let cat = Cat::named(other).ok_or_else(|| Error::Validation(format!("unknown internal category {other}")))?;
                InternalCategory::constant(&cat, d, other)
            }
        }
    }
}

/// Parses an internal-category file. After the header `internal-category`, either a
/// `constant` marker followed by a category body, or `dimension: d` followed by `stage k`
/// blocks and `restrict` lines of the form
/// `restrict [l]->[k] (e1, ..., ek) objects: x=y ... morphisms: f=g ...`.
/// `dim_override` sets the dimension of a constant internal category.
pub fn parse_internal_category(text: &str, dim_override: Option<usize>) -> Result<InternalCategory> {
    let lines: Vec<(usize, String)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    match lines.first() {
        Some((_, l)) if l == "internal-category" => {}
        Some((n, _)) => return parse_err(*n, "expected header `internal-category`"),
        None => return parse_err(1, "empty internal-category file"),
    }
    let mut pos = 1;
    let mut dim: Option<usize> = None;
    if let Some((n, l)) = lines.get(pos) {
        if let Some(rest) = l.strip_prefix("dimension:") {
            dim = Some(rest.trim().parse().map_err(|_| Error::Parse { line: *n, msg: "bad dimension".into() })?);
            pos += 1;
        }
    }
    if let Some((_, l)) = lines.get(pos) {
        if l == "constant" {
            let cat = parse_category_lines(&lines[pos + 1..])?;
            let d = dim_override.or(dim).unwrap_or(1);
            let ic = InternalCategory::constant(&cat, d, "file")?;
            return Ok(ic);
        }
    }
    let d = match dim {
        Some(d) => d,
        None => return parse_err(lines.get(pos).map(|l| l.0).unwrap_or(1), "expected `constant` or `dimension:`"),
    };
    if let Some(o) = dim_override {
        if o != d {
            return parse_err(lines[0].0, format!("file declares dimension {d} but {o} was requested"));
        }
    }
    let cube = Arc::new(box_category(d)?);
    let mut stages: Vec<Option<Cat>> = vec![None; d + 1];
    let mut restricts: Vec<(usize, String)> = Vec::new();
    while pos < lines.len() {
        let (n, l) = &lines[pos];
        if let Some(k) = l.strip_prefix("stage ") {
            let k: usize = k.trim().parse().map_err(|_| Error::Parse { line: *n, msg: "bad stage index".into() })?;
            if k > d {
                return parse_err(*n, format!("stage {k} above dimension {d}"));
            }
            let end = (pos + 1..lines.len())
                .find(|&i| lines[i].1.starts_with("stage ") || lines[i].1.starts_with("restrict "))
                .unwrap_or(lines.len());
            if stages[k].is_some() {
                return parse_err(*n, format!("stage {k} given twice"));
            }
            stages[k] = Some(parse_category_lines(&lines[pos + 1..end])?);
            pos = end;
        } else if l.starts_with("restrict ") {
            restricts.push((*n, l.clone()));
            pos += 1;
        } else {
            return parse_err(*n, format!("unexpected line {l:?}"));
        }
    }
    let stages: Vec<Cat> = stages
        .into_iter()
        .enumerate()
        .map(|(k, s)| s.ok_or(Error::Parse { line: lines.last().unwrap().0, msg: format!("missing stage {k}") }))
        .collect::<Result<_>>()?;
    let mut restrict: Vec<Option<Functor>> = vec![None; cube.maps().len()];
    for (fi, m) in cube.maps().iter().enumerate() {
        if *m == CubeMap::identity(m.src) {
            let c = &stages[m.src];
            restrict[fi] = Some(Functor { obj: c.objects().collect(), mor: c.morphisms().collect() });
        }
    }
    for (n, l) in restricts {
        let (fi, fun) = parse_restrict_line(n, &l, &cube, &stages)?;
        if restrict[fi].is_some() {
            return parse_err(n, "restriction given twice or along an identity");
        }
        restrict[fi] = Some(fun);
    }
    let last = lines.last().unwrap().0;
    let restrict: Vec<Functor> = restrict
        .into_iter()
        .enumerate()
        .map(|(fi, r)| r.ok_or(Error::Parse { line: last, msg: format!("missing restriction along {}", cube.map(fi).name()) }))
        .collect::<Result<_>>()?;
    let ic = InternalCategory { cube, stages, restrict, constant: false, name: "file".into() };
    ic.validate()?;
    Ok(ic)
}

fn parse_restrict_line(n: usize, l: &str, cube: &CubeCategory, stages: &[Cat]) -> Result<(Mor, Functor)> {
    let err = |m: &str| Error::Parse { line: n, msg: m.to_string() };
    let rest = l.strip_prefix("restrict ").unwrap().trim();
    let (shape, rest) = rest.split_once('(').ok_or_else(|| err("expected `(components)`"))?;
    let (comps, rest) = rest.split_once(')').ok_or_else(|| err("missing `)`"))?;
    let (ls, ks) = shape.trim().split_once("->").ok_or_else(|| err("expected `[l]->[k]`"))?;
    let dimnum = |s: &str| -> Result<usize> {
        s.trim().trim_start_matches('[').trim_end_matches(']').parse().map_err(|_| err("bad stage in cube map"))
    };
    let (lv, kv) = (dimnum(ls)?, dimnum(ks)?);
    if lv >= stages.len() || kv >= stages.len() {
        return Err(err("cube map outside the dimension bound"));
    }
    let comps: Vec<IntervalElement> = if comps.trim().is_empty() {
        Vec::new()
    } else {
        comps
            .split(',')
            .map(|c| {
                let t = DlTerm::parse(c).map_err(|m| err(&m))?;
                dl_normalize(&t, lv).map_err(|e| err(&e.to_string()))
            })
            .collect::<Result<_>>()?
    };
    if comps.len() != kv {
        return Err(err("component count must equal the target dimension"));
    }
    let m = CubeMap { src: lv, dst: kv, comps };
    let fi = cube.lookup(&m).ok_or_else(|| err("not a cube map"))?;
    let (from, to) = (&stages[kv], &stages[lv]);
    let (objs, mors) = match rest.split_once("morphisms:") {
        Some((o, m)) => (o, m),
        None => (rest, ""),
    };
    let objs = objs.trim().strip_prefix("objects:").ok_or_else(|| err("expected `objects:`"))?;
    let pairs = |s: &str, find_a: &dyn Fn(&str) -> Option<usize>, find_b: &dyn Fn(&str) -> Option<usize>| -> Result<HashMap<usize, usize>> {
        let mut out = HashMap::new();
        for p in s.split_whitespace() {
            let (a, b) = p.split_once('=').ok_or_else(|| err("expected `x=y`"))?;
            let ai = find_a(a).ok_or_else(|| err(&format!("unknown name {a}")))?;
            let bi = find_b(b).ok_or_else(|| err(&format!("unknown name {b}")))?;
            if out.insert(ai, bi).is_some() {
                return Err(err(&format!("{a} mapped twice")));
            }
        }
        Ok(out)
    };
    let om = pairs(objs, &|a| from.object_by_name(a), &|b| to.object_by_name(b))?;
    let mm = pairs(mors, &|a| from.morphism_by_name(a), &|b| to.morphism_by_name(b))?;
    let obj: Vec<Obj> = from
        .objects()
        .map(|x| om.get(&x).copied().ok_or_else(|| err(&format!("object {} not mapped", from.object_name(x)))))
        .collect::<Result<_>>()?;
    let mor: Vec<Mor> = from
        .morphisms()
        .map(|f| {
            if from.is_id(f) {
                Ok(mm.get(&f).copied().unwrap_or(to.id(obj[from.src(f)])))
            } else {
                mm.get(&f).copied().ok_or_else(|| err(&format!("morphism {} not mapped", from.morphism_name(f))))
            }
        })
        .collect::<Result<_>>()?;
    Ok((fi, Functor { obj, mor }))
}
