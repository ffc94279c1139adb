//! Buchberger's algorithm and normal forms.

use super::poly::{divides, grevlex, Poly, PolyRing};

/// Full reduction of `f` by `basis`; every remaining monomial is standard.
pub fn normal_form(ring: &PolyRing, basis: &[Poly], f: &Poly) -> Poly {
    let mut f = f.clone();
    let mut rest = Vec::new();
    while let Some((m, c)) = f.lead().cloned() {
        match basis.iter().find(|g| g.lead().is_some_and(|(lm, _)| divides(lm, &m))) {
            Some(g) => {
                let (lm, lc) = g.lead().unwrap();
                let q: Vec<u16> = m.iter().zip(lm).map(|(a, b)| a - b).collect();
                let factor = (c as u64 * ring.inv(*lc) as u64 % ring.p as u64) as u32;
                f = ring.sub(&f, &ring.shift(g, &q, factor));
            }
            None => {
                rest.push((m, c));
                f.terms.remove(0);
            }
        }
    }
    Poly { terms: rest }
}

fn coprime(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || y == 0)
}

/// The reduced Gröbner basis of the ideal generated by `gens`, monic and sorted.
pub fn groebner_basis(ring: &PolyRing, gens: &[Poly]) -> Vec<Poly> {
    let mut basis: Vec<Poly> = gens.iter().filter(|g| !g.is_zero()).map(|g| ring.monic(g)).collect();
    let mut pairs: Vec<(usize, usize)> = (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop() {
        let (li, lj) = (&basis[i].terms[0].0, &basis[j].terms[0].0);
        if coprime(li, lj) {
            continue;
        }
        let s = ring.s_poly(&basis[i], &basis[j]);
        let r = normal_form(ring, &basis, &s);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(ring.monic(&r));
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    reduce_basis(ring, basis)
}

fn reduce_basis(ring: &PolyRing, mut basis: Vec<Poly>) -> Vec<Poly> {
    // drop elements whose leading monomial is divisible by another's
    basis.sort_by(|a, b| grevlex(&a.terms[0].0, &b.terms[0].0));
    let mut minimal: Vec<Poly> = Vec::new();
    for g in basis {
        if !minimal.iter().any(|h| divides(&h.terms[0].0, &g.terms[0].0)) {
            minimal.push(g);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Poly> = minimal.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, g)| g.clone()).collect();
        let g = &minimal[k];
        let tail = Poly { terms: g.terms[1..].to_vec() };
        let mut r = normal_form(ring, &others, &tail);
        r.terms.insert(0, g.terms[0].clone());
        out.push(ring.monic(&r));
    }
    out.sort_by(|a, b| grevlex(&a.terms[0].0, &b.terms[0].0));
    out
}

pub fn is_member(ring: &PolyRing, basis: &[Poly], f: &Poly) -> bool {
    normal_form(ring, basis, f).is_zero()
}

/// Whether the quotient is finite: every variable has a pure power among the leading monomials.
pub fn zero_dimensional(ring: &PolyRing, basis: &[Poly]) -> bool {
    (0..ring.nvars()).all(|i| {
        basis.iter().any(|g| {
            let m = &g.terms[0].0;
            m[i] > 0 && m.iter().enumerate().all(|(j, &e)| j == i || e == 0)
        })
    })
}

/// Monomials not divisible by any leading monomial, ascending. `None` when infinitely many.
pub fn standard_monomials(ring: &PolyRing, basis: &[Poly]) -> Option<Vec<Vec<u16>>> {
    if basis.iter().any(|g| g.terms[0].0.iter().all(|&e| e == 0)) {
        return Some(Vec::new());
    }
    if !zero_dimensional(ring, basis) {
        return None;
    }
    let n = ring.nvars();
    let bound: Vec<u16> = (0..n)
        .map(|i| {
            basis
                .iter()
                .filter_map(|g| {
                    let m = &g.terms[0].0;
                    (m.iter().enumerate().all(|(j, &e)| j == i || e == 0)).then_some(m[i])
                })
                .min()
                .unwrap()
        })
        .collect();
    let mut out = Vec::new();
    let mut m = vec![0u16; n];
    loop {
        if !basis.iter().any(|g| divides(&g.terms[0].0, &m)) {
            out.push(m.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort_by(|a, b| grevlex(a, b));
                return Some(out);
            }
            m[i] += 1;
            if m[i] < bound[i] {
                break;
            }
            m[i] = 0;
            i += 1;
        }
    }
}
