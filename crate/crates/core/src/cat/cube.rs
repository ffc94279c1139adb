//! The Dedekind cube category truncated at dimension d.
//!
//! A morphism `[l] -> [k]` is a k-tuple of arity-l interval elements, read as a
//! map of cubes `I^l -> I^k`; composition is substitution.

use std::collections::HashMap;

use super::category::{Cat, Mor, Obj};
use super::lattice::IntervalElement;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubeMap {
    pub src: usize,
    pub dst: usize,
    pub comps: Vec<IntervalElement>,
}

impl CubeMap {
    pub fn identity(k: usize) -> CubeMap {
        CubeMap { src: k, dst: k, comps: (0..k).map(|i| IntervalElement::generator(k, i).unwrap()).collect() }
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &CubeMap) -> Result<CubeMap> {
        if f.dst != self.src {
            return Err(Error::ArityMismatch(format!("cube maps [{}]->[{}] and [{}]->[{}]", f.src, f.dst, self.src, self.dst)));
        }
        let comps = self.comps.iter().map(|c| c.subst(&f.comps, f.src)).collect::<Result<Vec<_>>>()?;
        Ok(CubeMap { src: f.src, dst: self.dst, comps })
    }

    /// Projection `[k+1] -> [k]` forgetting the last coordinate.
    pub fn projection(k: usize) -> CubeMap {
        CubeMap { src: k + 1, dst: k, comps: (0..k).map(|i| IntervalElement::generator(k + 1, i).unwrap()).collect() }
    }

    /// Endpoint inclusion `[k] -> [k+1]` setting the last coordinate to e.
    pub fn endpoint(k: usize, e: bool) -> CubeMap {
        let mut comps: Vec<IntervalElement> = (0..k).map(|i| IntervalElement::generator(k, i).unwrap()).collect();
        comps.push(if e { IntervalElement::one(k) } else { IntervalElement::zero(k) });
        CubeMap { src: k, dst: k + 1, comps }
    }

    /// `[k+2] -> [k+1]`, keeping the first k coordinates and sending the last two (i, j)
    /// to `i ∧ j` when e = 0 and `i ∨ j` when e = 1.
    pub fn connection(k: usize, e: bool) -> CubeMap {
        let n = k + 2;
        let mut comps: Vec<IntervalElement> = (0..k).map(|i| IntervalElement::generator(n, i).unwrap()).collect();
        let i = IntervalElement::generator(n, k).unwrap();
        let j = IntervalElement::generator(n, k + 1).unwrap();
        comps.push(if e { i.join(&j).unwrap() } else { i.meet(&j).unwrap() });
        CubeMap { src: n, dst: k + 1, comps }
    }

    /// `[k+2] -> [k+2]` exchanging the last two coordinates.
    pub fn swap_last(k: usize) -> CubeMap {
        let n = k + 2;
        let mut comps: Vec<IntervalElement> = (0..n).map(|i| IntervalElement::generator(n, i).unwrap()).collect();
        comps.swap(k, k + 1);
        CubeMap { src: n, dst: n, comps }
    }

    /// `f × I : [l+1] -> [k+1]`.
    pub fn cylinder(&self) -> CubeMap {
        let l = self.src + 1;
        let mut comps: Vec<IntervalElement> = self
            .comps
            .iter()
            .map(|c| IntervalElement::from_sets(l, c.sets().to_vec()).unwrap())
            .collect();
        comps.push(IntervalElement::generator(l, self.src).unwrap());
        CubeMap { src: l, dst: self.dst + 1, comps }
    }

    pub fn name(&self) -> String {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        format!("[{}]->[{}]({})", self.src, self.dst, parts.join(", "))
    }
}

#[derive(Clone, Debug)]
pub struct CubeCategory {
    d: usize,
    maps: Vec<CubeMap>,
    index: HashMap<CubeMap, Mor>,
    cat: Option<Cat>,
}

impl CubeCategory {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn map(&self, f: Mor) -> &CubeMap {
        &self.maps[f]
    }

    pub fn maps(&self) -> &[CubeMap] {
        &self.maps
    }

    pub fn lookup(&self, m: &CubeMap) -> Option<Mor> {
        self.index.get(m).copied()
    }

    pub fn hom_count(&self, l: usize, k: usize) -> usize {
        self.maps.iter().filter(|m| m.src == l && m.dst == k).count()
    }

    /// The materialized category, present when the morphism count is within bounds.
    pub fn cat(&self) -> Result<&Cat> {
        self.cat.as_ref().ok_or_else(|| Error::BudgetExceeded(format!("Box_{} is too large to materialize", self.d)))
    }

    pub fn compose(&self, g: Mor, f: Mor) -> Result<Mor> {
        let h = self.maps[g].after(&self.maps[f])?;
        self.index.get(&h).copied().ok_or_else(|| Error::Validation("composite not found".into()))
    }
}

/// Builds Box_d. The category table is materialized whenever it fits the bound, which holds
/// up to d = 2.
pub fn box_category(d: usize) -> Result<CubeCategory> {
    let elems: Vec<Vec<IntervalElement>> = (0..=d).map(IntervalElement::enumerate).collect::<Result<_>>()?;
    let mut maps = Vec::new();
    for k in 0..=d {
        for l in 0..=d {
            let total = elems[l].len().checked_pow(k as u32).unwrap_or(usize::MAX);
            if total > 1_000_000 {
                return Err(Error::BudgetExceeded(format!("Hom([{l}],[{k}]) has {total} maps")));
            }
            let mut idx = vec![0usize; k];
            loop {
                maps.push(CubeMap { src: l, dst: k, comps: idx.iter().map(|&i| elems[l][i].clone()).collect() });
                let mut pos = 0;
                while pos < k {
                    idx[pos] += 1;
                    if idx[pos] < elems[l].len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
        }
    }
    let index: HashMap<CubeMap, Mor> = maps.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let cat = if maps.len() <= super::category::MAX_MORPHISMS {
        let names = (0..=d).map(|k| format!("[{k}]")).collect();
        let mors = maps.iter().map(|m| (m.name(), m.src as Obj, m.dst as Obj)).collect();
        let ids = (0..=d).map(|k| index[&CubeMap::identity(k)]).collect();
        Some(Cat::build(names, mors, ids, |g, f| {
            let h = maps[g].after(&maps[f])?;
            index.get(&h).copied().ok_or_else(|| Error::Validation("composite not found".into()))
        })?)
    } else {
        None
    };
    Ok(CubeCategory { d, maps, index, cat })
}

/// Checks `y[k] × I ≅ y[k+1]` for k < d by comparing, at every stage [l], the set of pairs
/// (map into [k], interval element) with the maps into [k+1].
pub fn check_interval_representable(cube: &CubeCategory) -> Result<()> {
    let d = cube.dim();
    for k in 0..d {
        for l in 0..=d {
            let mut pairs = Vec::new();
            for m in cube.maps().iter().filter(|m| m.src == l && m.dst == k) {
                for r in IntervalElement::enumerate(l)? {
                    let mut comps = m.comps.clone();
                    comps.push(r);
                    pairs.push(CubeMap { src: l, dst: k + 1, comps });
                }
            }
            let mut direct: Vec<CubeMap> = cube.maps().iter().filter(|m| m.src == l && m.dst == k + 1).cloned().collect();
            let key = |m: &CubeMap| m.comps.clone();
            pairs.sort_by_key(key);
            direct.sort_by_key(key);
            if pairs != direct {
                return Err(Error::Validation(format!("y[{k}] × I differs from y[{}] at stage [{l}]", k + 1)));
            }
        }
    }
    Ok(())
}
