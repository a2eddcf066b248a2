//! Brute-force linear algebra over F_p, independent of the Gröbner machinery.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use lechkit::{FieldSpec, Monomial, PolyRing, Polynomial};

/// Integer coefficients with exponent vectors.
pub type Terms = Vec<(i64, Vec<u16>)>;

pub fn ring(p: u32, vars: &[&str]) -> Arc<PolyRing> {
    PolyRing::grevlex(FieldSpec::prime(p).unwrap(), vars).unwrap()
}

pub fn poly(r: &Arc<PolyRing>, terms: &[(i64, &[u16])]) -> Polynomial {
    let f = r.field();
    let ts = terms.iter().map(|(c, e)| (Monomial::new(e), f.from_i64(*c))).collect();
    Polynomial::from_terms(r, ts)
}

pub fn to_lib(r: &Arc<PolyRing>, t: &Terms) -> Polynomial {
    let refs: Vec<(i64, &[u16])> = t.iter().map(|(c, e)| (*c, e.as_slice())).collect();
    poly(r, &refs)
}

/// Exponent vectors of total degree below `t`, sorted by degree.
pub fn monomials_below(n: usize, t: u32) -> Vec<Vec<u16>> {
    let mut out = vec![vec![0u16; n]];
    let mut frontier = out.clone();
    for _ in 1..t {
        let mut next = Vec::new();
        for m in &frontier {
            let last = m.iter().rposition(|&e| e > 0).unwrap_or(0);
            for i in last..n {
                let mut m2 = m.clone();
                m2[i] += 1;
                next.push(m2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Exponent vectors in the box `0 <= e_i < bounds[i]`.
pub fn box_monomials(bounds: &[u16]) -> Vec<Vec<u16>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|m: Vec<u16>| {
                (0..b).map(move |e| {
                    let mut m2 = m.clone();
                    m2.push(e);
                    m2
                })
            })
            .collect();
    }
    out
}

/// Number of monomials in the box not divisible by any generator.
pub fn staircase(gens: &[Vec<u16>], bounds: &[u16]) -> u64 {
    box_monomials(bounds)
        .iter()
        .filter(|m| !gens.iter().any(|g| g.iter().zip(m.iter()).all(|(a, b)| a <= b)))
        .count() as u64
}

struct Echelon {
    p: u64,
    ncols: usize,
    pivots: Vec<Option<Vec<u64>>>,
    rank: usize,
}

impl Echelon {
    fn new(p: u64, ncols: usize) -> Self {
        Echelon { p, ncols, pivots: vec![None; ncols], rank: 0 }
    }

    fn insert(&mut self, mut row: Vec<u64>) {
        let p = self.p;
        for c in 0..self.ncols {
            if row[c] == 0 {
                continue;
            }
            match &self.pivots[c] {
                Some(piv) => {
                    let f = row[c];
                    for (x, y) in row.iter_mut().zip(piv).skip(c) {
                        *x = (*x + p - f * y % p) % p;
                    }
                }
                None => {
                    let inv = pow_mod(row[c], p - 2, p);
                    for x in row.iter_mut().skip(c) {
                        *x = *x * inv % p;
                    }
                    self.pivots[c] = Some(row);
                    self.rank += 1;
                    return;
                }
            }
        }
    }
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn add_exps(a: &[u16], b: &[u16]) -> Vec<u16> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn quotient_dim(p: u32, cols: &[Vec<u16>], gens: &[Terms]) -> u64 {
    let index: HashMap<&[u16], usize> = cols.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    let p64 = p as u64;
    let mut ech = Echelon::new(p64, cols.len());
    for g in gens {
        for m in cols {
            let mut row = vec![0u64; cols.len()];
            let mut any = false;
            for (c, e) in g {
                if let Some(&i) = index.get(add_exps(m, e).as_slice()) {
                    row[i] = (row[i] + c.rem_euclid(p as i64) as u64) % p64;
                    any = true;
                }
            }
            if any {
                ech.insert(row);
            }
            if ech.rank == cols.len() {
                return 0;
            }
        }
    }
    (cols.len() - ech.rank) as u64
}

/// `dim_K K[x]/I` for an ideal containing `x_i^{bounds[i]}` for every `i`.
pub fn box_colength(p: u32, bounds: &[u16], gens: &[Terms]) -> u64 {
    quotient_dim(p, &box_monomials(bounds), gens)
}

/// `dim_K K[x]/(I + m^t)`.
pub fn truncated_length(p: u32, n: usize, gens: &[Terms], t: u32) -> u64 {
    quotient_dim(p, &monomials_below(n, t), gens)
}

/// Length of `K[x]_m / I` for `I` primary to the origin locally: the first
/// `t` where `dim K[x]/(I + m^t)` stops growing.
pub fn local_length(p: u32, n: usize, gens: &[Terms], t_max: u32) -> Option<u64> {
    let mut prev = truncated_length(p, n, gens, 1);
    for t in 2..=t_max {
        let cur = truncated_length(p, n, gens, t);
        if cur == prev {
            return Some(cur);
        }
        prev = cur;
    }
    None
}

/// Hilbert–Samuel multiplicity of `K[x]_m/J` read off `l(R/m^t)` by taking
/// the `d`-th difference at `t` and `t+1`..: exact once the function is a
/// polynomial.
pub fn hs_multiplicity(p: u32, n: usize, rels: &[Terms], d: u32, t: u32) -> u64 {
    let vals: Vec<i64> = (0..=d).map(|k| truncated_length(p, n, rels, t + k) as i64).collect();
    let mut diffs = vals;
    for _ in 0..d {
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    }
    diffs[0] as u64
}
