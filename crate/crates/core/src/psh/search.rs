//! Enumeration of natural families.
//!
//! Nearly every carrier in the workbench (substitutions, elements, Π types, right Kan
//! extensions, exponentials, cobar components, homotopies) is a set of assignments
//! `e ↦ v(e) ∈ [0, size(e))` subject to link constraints `v(e') = table[v(e)]`, where a
//! link is a restriction `e' = e·f`. This module enumerates such assignments by depth-first
//! search with forced propagation along links.

use crate::error::Result;
use crate::report::Budget;

const UNSET: u32 = u32::MAX;

/// Identity table marker for [`NatProblem::link`].
pub const IDENTITY: usize = usize::MAX;

#[derive(Clone, Debug, Default)]
pub struct NatProblem {
    sizes: Vec<u32>,
    links: Vec<Vec<(u32, usize)>>,
    incoming: Vec<u32>,
    tables: Vec<Vec<u32>>,
    pins: Vec<(usize, u32)>,
}

impl NatProblem {
    pub fn new(sizes: Vec<u32>) -> Self {
        let n = sizes.len();
        NatProblem { sizes, links: vec![Vec::new(); n], incoming: vec![0; n], tables: Vec::new(), pins: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn add_element(&mut self, size: u32) -> usize {
        self.sizes.push(size);
        self.links.push(Vec::new());
        self.incoming.push(0);
        self.sizes.len() - 1
    }

    pub fn add_table(&mut self, table: Vec<u32>) -> usize {
        self.tables.push(table);
        self.tables.len() - 1
    }

    /// Requires `v(to) = table[v(from)]`.
    pub fn link(&mut self, from: usize, to: usize, table: usize) {
        if from == to && table == IDENTITY {
            return;
        }
        self.links[from].push((to as u32, table));
        self.incoming[to] += 1;
    }

    pub fn pin(&mut self, e: usize, v: u32) {
        self.pins.push((e, v));
    }

    fn image(&self, table: usize, v: u32) -> u32 {
        if table == IDENTITY {
            v
        } else {
            self.tables[table][v as usize]
        }
    }

    fn assign(&self, vals: &mut [u32], trail: &mut Vec<usize>, e: usize, v: u32, stack: &mut Vec<usize>) -> bool {
        if v >= self.sizes[e] {
            return false;
        }
        if vals[e] != UNSET {
            return vals[e] == v;
        }
        vals[e] = v;
        trail.push(e);
        stack.clear();
        stack.push(e);
        while let Some(x) = stack.pop() {
            let vx = vals[x];
            for &(t, tab) in &self.links[x] {
                let t = t as usize;
                let w = self.image(tab, vx);
                if vals[t] == UNSET {
                    if w >= self.sizes[t] {
                        return false;
                    }
                    vals[t] = w;
                    trail.push(t);
                    stack.push(t);
                } else if vals[t] != w {
                    return false;
                }
            }
        }
        true
    }

    /// Whether a complete assignment satisfies every link and pin.
    pub fn satisfied(&self, vals: &[u32]) -> bool {
        if vals.len() != self.sizes.len() {
            return false;
        }
        for (e, &v) in vals.iter().enumerate() {
            if v >= self.sizes[e] {
                return false;
            }
            for &(t, tab) in &self.links[e] {
                if vals[t as usize] != self.image(tab, v) {
                    return false;
                }
            }
        }
        self.pins.iter().all(|&(e, v)| vals[e] == v)
    }

    /// Visits every solution in lexicographic order of the search. `visit` returns false to
    /// stop early; the result is false when stopped.
    pub fn solve(&self, budget: &mut Budget, visit: &mut dyn FnMut(&[u32]) -> bool) -> Result<bool> {
        let n = self.sizes.len();
        let mut vals = vec![UNSET; n];
        let mut trail = Vec::new();
        let mut stack = Vec::new();
        for &(e, v) in &self.pins {
            if !self.assign(&mut vals, &mut trail, e, v, &mut stack) {
                return Ok(true);
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&e| (self.incoming[e], e));
        let next_unset = |vals: &[u32], mut p: usize| {
            while p < n && vals[order[p]] != UNSET {
                p += 1;
            }
            p
        };
        let start = next_unset(&vals, 0);
        if start == n {
            budget.charge(1, "natural family search")?;
            return Ok(visit(&vals));
        }
        // (position in order, next value to try, trail length on entry)
        let mut frames: Vec<(usize, u32, usize)> = vec![(start, 0, trail.len())];
        while let Some(top) = frames.last_mut() {
            let (pos, next, mark) = *top;
            for &e in &trail[mark..] {
                vals[e] = UNSET;
            }
            trail.truncate(mark);
            let e = order[pos];
            if next >= self.sizes[e] {
                frames.pop();
                continue;
            }
            top.1 += 1;
            budget.charge(1, "natural family search")?;
            if self.assign(&mut vals, &mut trail, e, next, &mut stack) {
                let np = next_unset(&vals, pos + 1);
                if np == n {
                    if !visit(&vals) {
                        return Ok(false);
                    }
                } else {
                    frames.push((np, 0, trail.len()));
                }
            }
        }
        Ok(true)
    }

    pub fn all(&self, budget: &mut Budget) -> Result<Vec<Vec<u32>>> {
        let mut out = Vec::new();
        self.solve(budget, &mut |v| {
            out.push(v.to_vec());
            true
        })?;
        Ok(out)
    }

    pub fn first(&self, budget: &mut Budget) -> Result<Option<Vec<u32>>> {
        let mut out = None;
        self.solve(budget, &mut |v| {
            out = Some(v.to_vec());
            false
        })?;
        Ok(out)
    }

    pub fn count(&self, budget: &mut Budget) -> Result<u64> {
        let mut k = 0;
        self.solve(budget, &mut |_| {
            k += 1;
            true
        })?;
        Ok(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(p: &NatProblem) -> Vec<Vec<u32>> {
        let n = p.len();
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        if p.sizes.iter().any(|&s| s == 0) {
            return out;
        }
        loop {
            if p.satisfied(&cur) {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                cur[i] += 1;
                if cur[i] < p.sizes[i] {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn empty_domain_has_one_solution() {
        let p = NatProblem::new(vec![]);
        assert_eq!(p.all(&mut Budget::unlimited()).unwrap(), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn empty_value_set_has_none() {
        let p = NatProblem::new(vec![2, 0]);
        assert!(p.all(&mut Budget::unlimited()).unwrap().is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let p = NatProblem::new(vec![3; 8]);
        assert!(p.count(&mut Budget::new(100)).is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            sizes in prop::collection::vec(1u32..4, 1..6),
            raw_links in prop::collection::vec((0usize..6, 0usize..6, prop::collection::vec(0u32..4, 4)), 0..6),
            pin in prop::option::of((0usize..6, 0u32..3)),
        ) {
            let n = sizes.len();
            let mut p = NatProblem::new(sizes.clone());
            for (a, b, t) in raw_links {
                let (a, b) = (a % n, b % n);
                let table: Vec<u32> = (0..sizes[a] as usize).map(|i| t[i] % sizes[b]).collect();
                let id = p.add_table(table);
                p.link(a, b, id);
            }
            if let Some((e, v)) = pin {
                p.pin(e % n, v % sizes[e % n]);
            }
            let mut got = p.all(&mut Budget::unlimited()).unwrap();
            got.sort();
            let mut want = brute(&p);
            want.sort();
            prop_assert_eq!(got, want);
        }
    }
}
