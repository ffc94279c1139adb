//! Text format for presheaves over a named category.
//!
//! ```text
//! presheaf
//! object a: a0 a1
//! object b: b0
//! restrict f: b0 -> a1
//! ```
//!
//! Every non-identity morphism needs a `restrict` line mapping each element of its codomain.

use std::collections::HashMap;

use super::Presheaf;
use crate::cat::Cat;
use crate::error::{parse_err, Error, Result};

/// A parsed presheaf together with its element names per object.
#[derive(Clone, Debug)]
pub struct NamedPresheaf {
    pub psh: Presheaf,
    pub names: Vec<Vec<String>>,
}

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_presheaf(cat: &Cat, text: &str) -> Result<NamedPresheaf> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, strip(l))).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "presheaf")) => {}
        Some((n, _)) => return parse_err(n, "expected header `presheaf`"),
        None => return parse_err(1, "empty presheaf file"),
    }
    let mut names: Vec<Option<Vec<String>>> = vec![None; cat.object_count()];
    let mut tables: Vec<Option<Vec<u32>>> = vec![None; cat.morphism_count()];
    let mut pending = Vec::new();
    for (n, line) in lines {
        if let Some(rest) = line.strip_prefix("object ") {
            let (o, elems) = rest.split_once(':').ok_or(Error::Parse { line: n, msg: "expected `object name: elements`".into() })?;
            let x = cat.object_by_name(o.trim()).ok_or(Error::Parse { line: n, msg: format!("unknown object {}", o.trim()) })?;
            if names[x].is_some() {
                return parse_err(n, format!("object {} listed twice", o.trim()));
            }
            let es: Vec<String> = elems.split_whitespace().map(str::to_string).collect();
            for (i, e) in es.iter().enumerate() {
                if es[..i].contains(e) {
                    return parse_err(n, format!("duplicate element {e}"));
                }
            }
            names[x] = Some(es);
        } else if let Some(rest) = line.strip_prefix("restrict ") {
            let (m, pairs) = rest.split_once(':').ok_or(Error::Parse { line: n, msg: "expected `restrict name: x -> y ...`".into() })?;
            let f = cat.morphism_by_name(m.trim()).ok_or(Error::Parse { line: n, msg: format!("unknown morphism {}", m.trim()) })?;
            pending.push((n, f, pairs.to_string()));
        } else {
            return parse_err(n, format!("unexpected line {line:?}"));
        }
    }
    let names: Vec<Vec<String>> = names.into_iter().map(Option::unwrap_or_default).collect();
    let lookup: Vec<HashMap<&str, u32>> =
        names.iter().map(|es| es.iter().enumerate().map(|(i, e)| (e.as_str(), i as u32)).collect()).collect();
    for (n, f, pairs) in &pending {
        let (y, x) = (cat.src(*f), cat.dst(*f));
        if tables[*f].is_some() {
            return parse_err(*n, format!("restriction along {} given twice", cat.morphism_name(*f)));
        }
        let mut t = vec![u32::MAX; names[x].len()];
        let toks: Vec<&str> = pairs.split_whitespace().collect();
        let mut i = 0;
        while i < toks.len() {
            if i + 2 >= toks.len() || toks[i + 1] != "->" {
                return parse_err(*n, "expected pairs `x -> y`");
            }
            let a = *lookup[x].get(toks[i]).ok_or(Error::Parse { line: *n, msg: format!("{} is not an element at the codomain", toks[i]) })?;
            let b = *lookup[y].get(toks[i + 2]).ok_or(Error::Parse { line: *n, msg: format!("{} is not an element at the domain", toks[i + 2]) })?;
            t[a as usize] = b;
            i += 3;
        }
        if let Some(k) = t.iter().position(|&v| v == u32::MAX) {
            return parse_err(*n, format!("no image for {}", names[x][k]));
        }
        tables[*f] = Some(t);
    }
    let mut restr = Vec::with_capacity(cat.morphism_count());
    for f in cat.morphisms() {
        if cat.is_id(f) {
            restr.push((0..names[cat.dst(f)].len() as u32).collect());
        } else {
            match tables[f].take() {
                Some(t) => restr.push(t),
                None => return parse_err(1, format!("missing restriction along {}", cat.morphism_name(f))),
            }
        }
    }
    let psh = Presheaf::new(cat, names.iter().map(|e| e.len() as u32).collect(), restr)?;
    Ok(NamedPresheaf { psh, names })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_arrow_presheaf() {
        let cat = Cat::walking_arrow();
        let p = parse_presheaf(&cat, "presheaf\nobject a: a0 a1\nobject b: b0 b1 b2\nrestrict f: b0 -> a0 b1 -> a1 b2 -> a1\n").unwrap();
        assert_eq!(p.psh.sizes, vec![2, 3]);
        assert_eq!(p.psh.restr[2], vec![0, 1, 1]);
    }

    #[test]
    fn errors_carry_lines() {
        let cat = Cat::walking_arrow();
        let e = parse_presheaf(&cat, "presheaf\nobject a: a0\nobject b: b0\nrestrict f: b0 -> zz\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 4, msg: "zz is not an element at the domain".into() });
        let e = parse_presheaf(&cat, "presheaf\nobject c: x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_presheaf(&cat, "presheaf\nobject a: a0\nobject b: b0\n").is_err());
    }
}
