//! Face-lattice cofibrations: finite unions of faces, each face a conjunction of
//! endpoint equations `i_j = e`.

use std::fmt;

use super::lattice::IntervalElement;
use crate::error::{Error, Result};

/// A face of the k-cube: coordinates in `mask` are fixed to the matching bits of `vals`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Face {
    pub mask: u32,
    pub vals: u32,
}

impl Face {
    pub fn whole() -> Face {
        Face { mask: 0, vals: 0 }
    }

    /// `self` lies inside `other` as a subcube.
    pub fn within(&self, other: &Face) -> bool {
        other.mask & !self.mask == 0 && (self.vals ^ other.vals) & other.mask == 0
    }

    pub fn meet(&self, other: &Face) -> Option<Face> {
        let common = self.mask & other.mask;
        if (self.vals ^ other.vals) & common != 0 {
            return None;
        }
        Some(Face { mask: self.mask | other.mask, vals: (self.vals & self.mask) | (other.vals & other.mask) })
    }

    pub fn contains_point(&self, point: u32) -> bool {
        (point ^ self.vals) & self.mask == 0
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cofibration {
    arity: u8,
    faces: Vec<Face>,
}

fn canonical(faces: Vec<Face>) -> Vec<Face> {
    let mut faces: Vec<Face> = faces.into_iter().map(|f| Face { mask: f.mask, vals: f.vals & f.mask }).collect();
    faces.sort_by_key(|f| (f.mask.count_ones(), f.mask, f.vals));
    faces.dedup();
    let mut kept: Vec<Face> = Vec::new();
    for f in faces {
        if !kept.iter().any(|k| f.within(k)) {
            kept.push(f);
        }
    }
    kept.sort();
    kept
}

impl Cofibration {
    pub fn bottom(arity: usize) -> Self {
        Cofibration { arity: arity as u8, faces: Vec::new() }
    }

    pub fn top(arity: usize) -> Self {
        Cofibration { arity: arity as u8, faces: vec![Face::whole()] }
    }

    /// The face `i_j = e`.
    pub fn eq(arity: usize, j: usize, e: bool) -> Result<Self> {
        if j >= arity {
            return Err(Error::ArityMismatch(format!("coordinate {j} at arity {arity}")));
        }
        Ok(Cofibration { arity: arity as u8, faces: vec![Face { mask: 1 << j, vals: (e as u32) << j }] })
    }

    pub fn from_faces(arity: usize, faces: Vec<Face>) -> Result<Self> {
        if faces.iter().any(|f| f.mask >> arity != 0) {
            return Err(Error::ArityMismatch(format!("face outside arity {arity}")));
        }
        Ok(Cofibration { arity: arity as u8, faces: canonical(faces) })
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn is_bottom(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.faces.iter().any(|f| f.mask == 0)
    }

    fn same_arity(&self, o: &Self) -> Result<()> {
        if self.arity != o.arity {
            return Err(Error::ArityMismatch(format!("cofibration arities {} and {}", self.arity, o.arity)));
        }
        Ok(())
    }

    pub fn join(&self, o: &Self) -> Result<Self> {
        self.same_arity(o)?;
        let mut f = self.faces.clone();
        f.extend_from_slice(&o.faces);
        Ok(Cofibration { arity: self.arity, faces: canonical(f) })
    }

    pub fn meet(&self, o: &Self) -> Result<Self> {
        self.same_arity(o)?;
        let mut f = Vec::new();
        for a in &self.faces {
            for b in &o.faces {
                if let Some(m) = a.meet(b) {
                    f.push(m);
                }
            }
        }
        Ok(Cofibration { arity: self.arity, faces: canonical(f) })
    }

    pub fn eval(&self, point: &[bool]) -> Result<bool> {
        if point.len() != self.arity() {
            return Err(Error::ArityMismatch(format!("point of length {} for arity {}", point.len(), self.arity)));
        }
        let p = point.iter().enumerate().fold(0u32, |acc, (j, &b)| acc | ((b as u32) << j));
        Ok(self.faces.iter().any(|f| f.contains_point(p)))
    }

    /// Whether the whole subcube `face` lies in the cofibration.
    pub fn contains_face(&self, face: &Face) -> bool {
        self.faces.iter().any(|f| face.within(f))
    }

    /// `(r = e)` as a cofibration, for a lattice element r.
    pub fn equation(r: &IntervalElement, e: bool) -> Self {
        let l = r.arity();
        if e {
            // some conjunct of the DNF is 1
            let faces = r.sets().iter().map(|&s| Face { mask: s, vals: s }).collect();
            Cofibration { arity: l as u8, faces: canonical(faces) }
        } else {
            // every conjunct has some generator equal to 0
            let mut acc = Cofibration::top(l);
            for &s in r.sets() {
                let clause: Vec<Face> =
                    (0..l).filter(|j| s & (1 << j) != 0).map(|j| Face { mask: 1 << j, vals: 0 }).collect();
                acc = acc.meet(&Cofibration { arity: l as u8, faces: canonical(clause) }).expect("same arity");
            }
            acc
        }
    }

    /// Restriction along a cube map given as one arity-`l` element per coordinate.
    pub fn restrict(&self, map: &[IntervalElement], l: usize) -> Result<Self> {
        if map.len() != self.arity() {
            return Err(Error::ArityMismatch(format!("map with {} components for arity {}", map.len(), self.arity)));
        }
        let mut acc = Cofibration::bottom(l);
        for face in &self.faces {
            let mut term = Cofibration::top(l);
            for (j, r) in map.iter().enumerate() {
                if face.mask & (1 << j) != 0 {
                    if r.arity() != l {
                        return Err(Error::ArityMismatch("map component arity".into()));
                    }
                    term = term.meet(&Cofibration::equation(r, face.vals & (1 << j) != 0))?;
                }
            }
            acc = acc.join(&term)?;
        }
        Ok(acc)
    }

    /// Adds a fresh last coordinate on which the cofibration does not depend.
    pub fn weaken(&self) -> Self {
        Cofibration { arity: self.arity + 1, faces: self.faces.clone() }
    }

    /// All cofibrations of the given arity (arity at most 2).
    pub fn enumerate(arity: usize) -> Result<Vec<Self>> {
        if arity > 2 {
            return Err(Error::BudgetExceeded(format!("cofibration enumeration at arity {arity}")));
        }
        let mut all_faces = Vec::new();
        for mask in 0..(1u32 << arity) {
            for vals in 0..(1u32 << arity) {
                if vals & !mask == 0 {
                    all_faces.push(Face { mask, vals });
                }
            }
        }
        let mut out: Vec<Self> = Vec::new();
        for sel in 0u64..(1u64 << all_faces.len()) {
            let faces: Vec<Face> =
                all_faces.iter().enumerate().filter(|(i, _)| sel >> i & 1 == 1).map(|(_, f)| *f).collect();
            out.push(Cofibration { arity: arity as u8, faces: canonical(faces) });
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Debug for Cofibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cofibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.faces.is_empty() {
            return write!(f, "bot");
        }
        let parts: Vec<String> = self
            .faces
            .iter()
            .map(|fc| {
                if fc.mask == 0 {
                    "top".to_string()
                } else {
                    (0..32)
                        .filter(|j| fc.mask & (1 << j) != 0)
                        .map(|j| format!("i{j}={}", (fc.vals >> j) & 1))
                        .collect::<Vec<_>>()
                        .join("&")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" | "))
    }
}

/// Parses `top`, `bot`, or a `|`-separated union of `&`-separated equations `i<j>=<e>`.
pub fn parse_cofibration(src: &str, arity: usize) -> std::result::Result<Cofibration, String> {
    let s = src.trim();
    match s {
        "top" | "⊤" => return Ok(Cofibration::top(arity)),
        "bot" | "⊥" => return Ok(Cofibration::bottom(arity)),
        _ => {}
    }
    let mut faces = Vec::new();
    for part in s.split('|') {
        let mut face = Face::whole();
        for eqn in part.split('&') {
            let (lhs, rhs) = eqn.split_once('=').ok_or_else(|| format!("expected `i<j>=<e>` in {eqn:?}"))?;
            let j: usize = lhs
                .trim()
                .strip_prefix('i')
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| format!("bad coordinate {lhs:?}"))?;
            if j >= arity {
                return Err(format!("coordinate i{j} outside arity {arity}"));
            }
            let e = match rhs.trim() {
                "0" => 0,
                "1" => 1,
                other => return Err(format!("endpoint must be 0 or 1, got {other:?}")),
            };
            let single = Face { mask: 1 << j, vals: e << j };
            face = face.meet(&single).ok_or_else(|| format!("contradictory face {part:?}"))?;
        }
        faces.push(face);
    }
    Cofibration::from_faces(arity, faces).map_err(|e| e.to_string())
}
