//! The Grothendieck construction ∫C of an internal category, materialized, together with
//! the cube-direction structure (cylinders, endpoints, connections) the cubical code needs.

use std::collections::HashMap;
use std::sync::Arc;

use super::category::{Cat, Mor, Obj};
use super::cube::{CubeCategory, CubeMap};
use super::internal::InternalCategory;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Site {
    pub internal: Arc<InternalCategory>,
    pub cat: Arc<Cat>,
    obj_stage: Vec<usize>,
    obj_point: Vec<Obj>,
    mor_cube: Vec<Mor>,
    mor_arrow: Vec<Mor>,
    obj_index: HashMap<(usize, Obj), Obj>,
    mor_index: HashMap<(Mor, Obj, Mor), Mor>,
}

impl Site {
    pub fn cube(&self) -> &CubeCategory {
        &self.internal.cube
    }

    pub fn dim(&self) -> usize {
        self.internal.dim()
    }

    pub fn stage(&self, c: Obj) -> usize {
        self.obj_stage[c]
    }

    pub fn point(&self, c: Obj) -> Obj {
        self.obj_point[c]
    }

    pub fn cube_part(&self, m: Mor) -> Mor {
        self.mor_cube[m]
    }

    pub fn arrow_part(&self, m: Mor) -> Mor {
        self.mor_arrow[m]
    }

    pub fn object(&self, k: usize, x: Obj) -> Option<Obj> {
        self.obj_index.get(&(k, x)).copied()
    }

    /// The morphism `(f, α)` into `(k, x)`, where f is a cube map into [k].
    pub fn morphism(&self, f: Mor, x: Obj, alpha: Mor) -> Option<Mor> {
        self.mor_index.get(&(f, x, alpha)).copied()
    }

    /// Whether the C-component is an identity (a morphism of ∫C0).
    pub fn is_levelwise(&self, m: Mor) -> bool {
        let l = self.cube().map(self.mor_cube[m]).src;
        self.internal.stages[l].is_id(self.mor_arrow[m])
    }

    /// `(f, id) : (l, x f) -> (k, x)` for a cube map f into the stage of c.
    pub fn lift(&self, c: Obj, f: Mor) -> Result<Mor> {
        let (k, x) = (self.stage(c), self.point(c));
        let cm = self.cube().map(f);
        if cm.dst != k {
            return Err(Error::ArityMismatch(format!("cube map into [{}] lifted to stage [{k}]", cm.dst)));
        }
        let xf = self.internal.restrict[f].obj[x];
        let id = self.internal.stages[cm.src].id(xf);
        self.morphism(f, x, id).ok_or_else(|| Error::Validation("missing lift".into()))
    }

    fn cube_index(&self, m: &CubeMap) -> Result<Mor> {
        self.cube().lookup(m).ok_or_else(|| Error::BudgetExceeded(format!("cube map {} beyond dimension {}", m.name(), self.dim())))
    }

    fn need(&self, k: usize) -> Result<()> {
        if k > self.dim() {
            return Err(Error::BudgetExceeded(format!("stage [{k}] beyond dimension bound {}", self.dim())));
        }
        Ok(())
    }

    /// `c ⊗ I = (k+1, x p)`.
    pub fn cyl(&self, c: Obj) -> Result<Obj> {
        let k = self.stage(c);
        self.need(k + 1)?;
        let p = self.cube_index(&CubeMap::projection(k))?;
        let xp = self.internal.restrict[p].obj[self.point(c)];
        self.object(k + 1, xp).ok_or_else(|| Error::Validation("missing cylinder".into()))
    }

    /// The projection `c ⊗ I -> c`.
    pub fn proj(&self, c: Obj) -> Result<Mor> {
        let k = self.stage(c);
        self.need(k + 1)?;
        self.lift(c, self.cube_index(&CubeMap::projection(k))?)
    }

    /// The endpoint `c -> c ⊗ I` at e.
    pub fn endpoint(&self, c: Obj, e: bool) -> Result<Mor> {
        let k = self.stage(c);
        let cy = self.cyl(c)?;
        self.lift(cy, self.cube_index(&CubeMap::endpoint(k, e))?)
    }

    /// `m ⊗ I : c' ⊗ I -> c ⊗ I` for `m : c' -> c`.
    pub fn cyl_mor(&self, m: Mor) -> Result<Mor> {
        let c = self.cat.dst(m);
        let cy = self.cyl(c)?;
        let cm = self.cube().map(self.mor_cube[m]);
        self.need(cm.src + 1)?;
        let f = self.cube_index(&cm.cylinder())?;
        let p = self.cube_index(&CubeMap::projection(cm.src))?;
        let alpha = self.internal.restrict[p].mor[self.mor_arrow[m]];
        self.morphism(f, self.point(cy), alpha).ok_or_else(|| Error::Validation("missing cylinder morphism".into()))
    }

    /// The connection `c ⊗ I ⊗ J -> c ⊗ I` sending (i, j) to i ∧ j (e = 0) or i ∨ j (e = 1).
    pub fn connection(&self, c: Obj, e: bool) -> Result<Mor> {
        let cy = self.cyl(c)?;
        self.cyl(cy)?;
        self.lift(cy, self.cube_index(&CubeMap::connection(self.stage(c), e))?)
    }

    /// The automorphism of `c ⊗ I ⊗ J` exchanging the last two coordinates.
    pub fn swap(&self, c: Obj) -> Result<Mor> {
        let cyy = self.cyl(self.cyl(c)?)?;
        self.lift(cyy, self.cube_index(&CubeMap::swap_last(self.stage(c)))?)
    }

    /// Objects of ∫C0 and the inclusion ∫C0 -> ∫C on morphisms. Object indices agree.
    pub fn levelwise(&self) -> Result<(Site, Vec<Mor>)> {
        let lvl = grothendieck(&self.internal.objects_only())?;
        let mut incl = Vec::with_capacity(lvl.cat.morphism_count());
        for m in lvl.cat.morphisms() {
            let c = lvl.cat.dst(m);
            incl.push(self.lift(c, lvl.mor_cube[m])?);
        }
        Ok((lvl, incl))
    }

    pub fn object_label(&self, c: Obj) -> String {
        let k = self.stage(c);
        format!("([{k}],{})", self.internal.stages[k].object_name(self.point(c)))
    }
}

pub fn grothendieck(ic: &InternalCategory) -> Result<Site> {
    ic.validate()?;
    let cube = &ic.cube;
    let d = cube.dim();
    let mut names = Vec::new();
    let mut obj_stage = Vec::new();
    let mut obj_point = Vec::new();
    let mut obj_index = HashMap::new();
    for k in 0..=d {
        for x in ic.stages[k].objects() {
            obj_index.insert((k, x), names.len());
            names.push(format!("([{k}],{})", ic.stages[k].object_name(x)));
            obj_stage.push(k);
            obj_point.push(x);
        }
    }
    let mut mors = Vec::new();
    let mut mor_cube = Vec::new();
    let mut mor_arrow = Vec::new();
    let mut mor_index = HashMap::new();
    for (fi, m) in cube.maps().iter().enumerate() {
        let (l, k) = (m.src, m.dst);
        for x in ic.stages[k].objects() {
            let xf = ic.restrict[fi].obj[x];
            for &alpha in ic.stages[l].incoming(xf) {
                let y = ic.stages[l].src(alpha);
                mor_index.insert((fi, x, alpha), mors.len());
                mors.push((
                    format!("({},{})", m.name(), ic.stages[l].morphism_name(alpha)),
                    obj_index[&(l, y)],
                    obj_index[&(k, x)],
                ));
                mor_cube.push(fi);
                mor_arrow.push(alpha);
            }
        }
    }
    let ids: Vec<Mor> = (0..names.len())
        .map(|c| {
            let (k, x) = (obj_stage[c], obj_point[c]);
            let fi = cube.lookup(&CubeMap::identity(k)).expect("identity cube map");
            mor_index[&(fi, x, ic.stages[k].id(x))]
        })
        .collect();
    let dsts: Vec<Obj> = mors.iter().map(|m| m.2).collect();
    let cat = Cat::build(names, mors, ids, |g, f| {
        // (fg, α) ∘ (ff, β) = (fg ∘ ff, (α · ff) ∘ β)
        let (gc, ga, fc, fa) = (mor_cube[g], mor_arrow[g], mor_cube[f], mor_arrow[f]);
        let h = cube.compose(gc, fc)?;
        let m = cube.map(fc).src;
        let alpha_f = ic.restrict[fc].mor[ga];
        let arrow = ic.stages[m].compose(alpha_f, fa);
        let x = obj_point[dsts[g]];
        mor_index.get(&(h, x, arrow)).copied().ok_or_else(|| Error::Validation("composite missing".into()))
    })?;
    Ok(Site { internal: Arc::new(ic.clone()), cat: Arc::new(cat), obj_stage, obj_point, mor_cube, mor_arrow, obj_index, mor_index })
}

/// ∫C for the constant internal category on `cat` over Box_0, which is `cat` itself.
pub fn plain_site(cat: &Cat, name: &str) -> Result<Site> {
    grothendieck(&InternalCategory::constant(cat, 0, name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_terminal_matches_box() {
        let ic = InternalCategory::constant(&Cat::terminal(), 1, "terminal").unwrap();
        let s = grothendieck(&ic).unwrap();
        assert_eq!(s.cat.object_count(), 2);
        assert_eq!(s.cat.homs(0, 1).len(), 2);
        assert_eq!(s.cat.homs(1, 0).len(), 1);
        s.cat.validate().unwrap();
    }

    #[test]
    fn constant_arrow_has_four_objects() {
        let ic = InternalCategory::constant(&Cat::walking_arrow(), 1, "arrow").unwrap();
        let s = grothendieck(&ic).unwrap();
        assert_eq!(s.cat.object_count(), 4);
        s.cat.validate().unwrap();
        // independent product construction: |Hom((l,y),(k,x))| = |Box(l,k)| * |C(y,x)|
        let c = Cat::walking_arrow();
        for a in s.cat.objects() {
            for b in s.cat.objects() {
                let expect = s.cube().hom_count(s.stage(a), s.stage(b)) * c.homs(s.point(a), s.point(b)).len();
                assert_eq!(s.cat.homs(a, b).len(), expect);
            }
        }
    }

    #[test]
    fn empty_internal_category() {
        let s = grothendieck(&InternalCategory::constant(&Cat::discrete(0), 1, "empty").unwrap()).unwrap();
        assert_eq!(s.cat.object_count(), 0);
    }

    #[test]
    fn codiscrete_interval_site_is_a_category() {
        let s = grothendieck(&InternalCategory::codiscrete_interval(1).unwrap()).unwrap();
        s.cat.validate().unwrap();
        let (lvl, incl) = s.levelwise().unwrap();
        lvl.cat.validate().unwrap();
        for m in lvl.cat.morphisms() {
            assert_eq!(lvl.cat.src(m), s.cat.src(incl[m]));
            assert!(s.is_levelwise(incl[m]));
        }
    }

    #[test]
    fn cylinder_structure() {
        let s = grothendieck(&InternalCategory::constant(&Cat::walking_arrow(), 2, "arrow").unwrap()).unwrap();
        for c in s.cat.objects().filter(|&c| s.stage(c) == 0) {
            let p = s.proj(c).unwrap();
            for e in [false, true] {
                assert_eq!(s.cat.compose(p, s.endpoint(c, e).unwrap()), s.cat.id(c));
            }
            for &m in s.cat.incoming(c) {
                if s.stage(s.cat.src(m)) == 0 {
                    let mi = s.cyl_mor(m).unwrap();
                    assert_eq!(s.cat.compose(p, mi), s.cat.compose(m, s.proj(s.cat.src(m)).unwrap()));
                }
            }
        }
        assert!(s.cyl(s.object(2, 0).unwrap()).is_err());
    }
}
