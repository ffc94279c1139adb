//! Ideal membership and normal forms by linear algebra on a Macaulay matrix: the span of
//! `m·g` for every generator g and monomial m up to a degree bound, row-reduced with
//! columns in descending grevlex order.

use cwf_workbench::alg::Poly;

pub struct Macaulay {
    p: u32,
    monomials: Vec<Vec<u16>>,
    rows: Vec<(usize, Vec<u32>)>,
}

fn deg(m: &[u16]) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Larger first: total degree, then the smaller exponent in the last variable that differs.
fn before(a: &[u16], b: &[u16]) -> std::cmp::Ordering {
    deg(b).cmp(&deg(a)).then_with(|| {
        let k = (0..a.len()).rev().find(|&i| a[i] != b[i]);
        k.map_or(std::cmp::Ordering::Equal, |i| a[i].cmp(&b[i]))
    })
}

fn all_monomials(n: usize, d: u32) -> Vec<Vec<u16>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for e in 0..=d {
        for mut rest in all_monomials(n - 1, d - e) {
            rest.push(e as u16);
            out.push(rest);
        }
    }
    out
}

fn inv(c: u32, p: u32) -> u32 {
    (1..p).find(|&x| x * c % p == 1).unwrap()
}

impl Macaulay {
    pub fn new(p: u32, nvars: usize, gens: &[Poly], bound: u32) -> Macaulay {
        let mut monomials = all_monomials(nvars, bound);
        monomials.sort_by(|a, b| before(a, b));
        let col = |m: &[u16]| monomials.iter().position(|n| n == m).unwrap();
        let mut raw: Vec<Vec<u32>> = Vec::new();
        for g in gens {
            let gd = g.terms.iter().map(|(m, _)| deg(m)).max().unwrap_or(0);
            for shift in monomials.iter().filter(|m| deg(m) + gd <= bound) {
                let mut row = vec![0u32; monomials.len()];
                for (m, c) in &g.terms {
                    let prod: Vec<u16> = m.iter().zip(shift).map(|(a, b)| a + b).collect();
                    let k = col(&prod);
                    row[k] = (row[k] + c) % p;
                }
                raw.push(row);
            }
        }
        // reduced row echelon form
        let mut rows: Vec<(usize, Vec<u32>)> = Vec::new();
        for mut r in raw {
            for (piv, row) in &rows {
                let c = r[*piv];
                if c != 0 {
                    for (x, y) in r.iter_mut().zip(row) {
                        *x = (*x + (p - c) * y) % p;
                    }
                }
            }
            let Some(piv) = r.iter().position(|&c| c != 0) else { continue };
            let s = inv(r[piv], p);
            r.iter_mut().for_each(|x| *x = *x * s % p);
            for (_, row) in rows.iter_mut() {
                let c = row[piv];
                if c != 0 {
                    for (x, y) in row.iter_mut().zip(&r) {
                        *x = (*x + (p - c) * y) % p;
                    }
                }
            }
            rows.push((piv, r));
        }
        Macaulay { p, monomials, rows }
    }

    pub fn dense(&self, f: &Poly) -> Vec<u32> {
        let mut v = vec![0u32; self.monomials.len()];
        for (m, c) in &f.terms {
            let k = self.monomials.iter().position(|n| n == m).expect("monomial beyond the degree bound");
            v[k] = (v[k] + c) % self.p;
        }
        v
    }

    /// The remainder of f against the row space: zero exactly on the pivot columns.
    pub fn reduce(&self, f: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut v = f.to_vec();
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = (*x + (p - c) * y) % p;
                }
            }
        }
        v
    }

    pub fn monomials(&self) -> &[Vec<u16>] {
        &self.monomials
    }
}

/// Every polynomial of total degree at most `d` in `nvars` variables over F_p, as
/// coefficient vectors over `monomials(nvars, d)`.
pub fn low_degree_monomials(nvars: usize, d: u32) -> Vec<Vec<u16>> {
    let mut ms = all_monomials(nvars, d);
    ms.sort_by(|a, b| before(a, b));
    ms
}

/// Compares the Gröbner backend with the Macaulay oracle on every polynomial of total
/// degree ≤ 3 in x, y over F_p. Returns the number of polynomials and the mismatches.
pub fn exhaustive_check(p: u32, relations: &[&str]) -> (u64, Vec<String>) {
    use cwf_workbench::alg::{groebner_basis, is_member, normal_form, PolyRing};
    let ring = PolyRing::new(p, vec!["x".into(), "y".into()]).unwrap();
    let gens: Vec<Poly> = relations.iter().map(|s| ring.parse(s, 1).unwrap()).collect();
    let basis = groebner_basis(&ring, &gens);
    let mac = Macaulay::new(p, 2, &gens, 10);
    let low = low_degree_monomials(2, 3);
    let residues: Vec<Vec<u32>> = low.iter().map(|m| mac.reduce(&mac.dense(&ring.monomial(m.clone(), 1)))).collect();
    let total = (p as u64).pow(low.len() as u32);
    let mut bad = Vec::new();
    for mut i in 0..total {
        let mut f = Poly::zero();
        let mut oracle = vec![0u32; mac.monomials().len()];
        for (m, r) in low.iter().zip(&residues) {
            let c = (i % p as u64) as u32;
            i /= p as u64;
            if c != 0 {
                f = ring.add(&f, &ring.monomial(m.clone(), c));
                for (o, x) in oracle.iter_mut().zip(r) {
                    *o = (*o + c * x) % p;
                }
            }
        }
        let nf = mac.dense(&normal_form(&ring, &basis, &f));
        let member = oracle.iter().all(|&c| c == 0);
        if nf != oracle || is_member(&ring, &basis, &f) != member {
            bad.push(format!("{} mod ({})", ring.display(&f), relations.join(", ")));
        }
    }
    (total, bad)
}

pub const IDEALS: &[(u32, &[&str])] = &[
    (2, &[]),
    (2, &["x^2 + x"]),
    (2, &["x^2 + x", "y^2 + y"]),
    (2, &["x*y + 1", "x^2 + y"]),
    (2, &["x^3 + y^2", "x*y"]),
    (2, &["x + 1", "x"]),
    (3, &["x^2 - 1", "y^2 + 1"]),
    (3, &["x*y - 1", "y^2 - x"]),
    (3, &["x^3 - y", "y^2 + x*y - 1"]),
    (3, &["x^2*y - y"]),
];
