//! Weights `P_n`: (n+1)-tuples of interval elements whose join is 1.

use std::fmt;

use crate::cat::{CubeMap, IntervalElement, Site};
use crate::error::{Error, Result};
use crate::psh::formers::cube_presheaf;
use crate::psh::{Presheaf, Subst};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    comps: Vec<IntervalElement>,
}

impl Weight {
    pub fn new(comps: Vec<IntervalElement>) -> Result<Weight> {
        let Some(first) = comps.first() else {
            return Err(Error::InvalidStructure("weight with no components".into()));
        };
        let k = first.arity();
        let mut join = IntervalElement::zero(k);
        for c in &comps {
            join = join.join(c)?;
        }
        if !join.is_one() {
            return Err(Error::InvalidStructure(format!("weight {comps:?} does not join to 1")));
        }
        Ok(Weight { comps })
    }

    pub fn level(&self) -> usize {
        self.comps.len() - 1
    }

    pub fn stage(&self) -> usize {
        self.comps[0].arity()
    }

    pub fn comps(&self) -> &[IntervalElement] {
        &self.comps
    }

    /// Restriction along a cube map into this weight's stage.
    pub fn act(&self, f: &CubeMap) -> Result<Weight> {
        let comps = self.comps.iter().map(|c| c.subst(&f.comps, f.src)).collect::<Result<Vec<_>>>()?;
        Ok(Weight { comps })
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Every weight of level n at the given stage, sorted.
pub fn weights(n: usize, stage: usize, d: usize) -> Result<Vec<Weight>> {
    if stage > d {
        return Err(Error::BudgetExceeded(format!("weights at stage {stage} above dimension {d}")));
    }
    let elems = IntervalElement::enumerate(stage)?;
    let total = (elems.len() as u128).checked_pow(n as u32 + 1).unwrap_or(u128::MAX);
    if total > 1 << 20 {
        return Err(Error::BudgetExceeded(format!("{total} candidate weights of level {n} at stage {stage}")));
    }
    let one = IntervalElement::one(stage);
    let mut out = Vec::new();
    let mut idx = vec![0usize; n + 1];
    loop {
        let comps: Vec<IntervalElement> = idx.iter().map(|&i| elems[i].clone()).collect();
        let mut join = IntervalElement::zero(stage);
        for c in &comps {
            join = join.join(c)?;
        }
        if join == one {
            out.push(Weight { comps });
        }
        let mut j = n + 1;
        loop {
            if j == 0 {
                out.sort();
                return Ok(out);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < elems.len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// `∂_k`: inserts 0 at position k.
pub fn face(k: usize, w: &Weight) -> Result<Weight> {
    if k > w.level() + 1 {
        return Err(Error::IndexOutOfRange(format!("face {k} of a level {} weight", w.level())));
    }
    let mut comps = w.comps.clone();
    comps.insert(k, IntervalElement::zero(w.stage()));
    Ok(Weight { comps })
}

/// `P_n` as a presheaf on the site, with the weights at each stage in carrier order.
#[derive(Clone, Debug)]
pub struct WeightPresheaf {
    pub psh: Presheaf,
    pub stages: Vec<Vec<Weight>>,
}

impl WeightPresheaf {
    pub fn new(site: &Site, n: usize) -> Result<WeightPresheaf> {
        let d = site.dim();
        let stages = (0..=d).map(|k| weights(n, k, d)).collect::<Result<Vec<_>>>()?;
        let psh = cube_presheaf(site, &stages, |w, f| w.act(f))?;
        Ok(WeightPresheaf { psh, stages })
    }

    pub fn weight(&self, stage: usize, i: u32) -> &Weight {
        &self.stages[stage][i as usize]
    }

    pub fn index(&self, w: &Weight) -> Option<u32> {
        self.stages[w.stage()].binary_search(w).ok().map(|i| i as u32)
    }
}

/// `∂_k : P_n -> P_{n+1}` as a natural map.
pub fn face_map(site: &Site, from: &WeightPresheaf, to: &WeightPresheaf, k: usize) -> Result<Subst> {
    let maps = site
        .cat
        .objects()
        .map(|c| {
            from.stages[site.stage(c)]
                .iter()
                .map(|w| to.index(&face(k, w)?).ok_or_else(|| Error::Validation(format!("face of {w} is not a weight"))))
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Subst { maps })
}
