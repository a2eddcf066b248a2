//! Buchberger's algorithm with the normal selection strategy and the
//! Gebauer–Möller criteria, plus the queries that only need a Gröbner basis:
//! normal forms, standard monomials and Krull dimension.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Elem;
use crate::monomial::Monomial;
use crate::poly::{axpy, same_ring, PolyRing, Polynomial, Term};

/// Dimension of a quotient as a vector space over the ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Length {
    Finite(u64),
    Infinite,
}

impl Length {
    pub fn finite(self) -> Option<u64> {
        match self {
            Length::Finite(n) => Some(n),
            Length::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Length::Finite(_))
    }
}

impl std::fmt::Display for Length {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Length::Finite(n) => write!(f, "{n}"),
            Length::Infinite => write!(f, "infinite"),
        }
    }
}

/// Result of enumerating the monomials outside a leading-term ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardMonomials {
    Finite(Vec<Monomial>),
    Infinite,
}

/// A Gröbner basis with respect to the order of its ring.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    gens: Vec<Polynomial>,
    masks: Vec<u64>,
    reduced: bool,
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

fn coprime_lms(a: &Polynomial, b: &Polynomial) -> bool {
    a.lm().is_coprime(b.lm())
}

/// Reduces `f` fully against `basis`, using `masks` (the supports of the
/// leading monomials) as a cheap divisibility filter.
fn reduce_full(f: &Polynomial, basis: &[&Polynomial], masks: &[u64]) -> Polynomial {
    let ring = f.ring().clone();
    let field = ring.field().clone();
    let mut work: Vec<Term> = f.terms().to_vec();
    let mut start = 0;
    let mut rem: Vec<Term> = Vec::new();
    while start < work.len() {
        let (m, c) = &work[start];
        let ms = m.support();
        let divisor = basis
            .iter()
            .zip(masks)
            .find(|(g, &mask)| mask & !ms == 0 && g.lm().divides(m));
        match divisor {
            None => {
                rem.push(work[start].clone());
                start += 1;
            }
            Some((g, _)) => {
                let shift = g.lm().divide_into(m).unwrap();
                let coeff = field.neg(field.mul(*c, field.inv(g.lc())));
                work = axpy(&ring, &work[start..], g.terms(), coeff, &shift);
                start = 0;
            }
        }
    }
    Polynomial::from_sorted(&ring, rem)
}

fn s_polynomial(f: &Polynomial, g: &Polynomial, lcm: &Monomial) -> Polynomial {
    let field = f.field();
    let uf = f.lm().divide_into(lcm).unwrap();
    let ug = g.lm().divide_into(lcm).unwrap();
    let a = f.mul_term(&uf, field.inv(f.lc()));
    let minus = field.neg(field.inv(g.lc()));
    a.add_scaled(g, minus, &ug)
}

struct Engine {
    polys: Vec<Polynomial>,
    masks: Vec<u64>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
}

impl Engine {
    fn active_basis(&self) -> (Vec<&Polynomial>, Vec<u64>) {
        let mut basis = Vec::new();
        let mut masks = Vec::new();
        for (k, p) in self.polys.iter().enumerate() {
            if self.active[k] {
                basis.push(p);
                masks.push(self.masks[k]);
            }
        }
        (basis, masks)
    }

    /// Gebauer–Möller update after appending `h`.
    fn insert(&mut self, h: Polynomial) {
        let r = self.polys.len();
        let hm = h.lm().clone();
        let mut candidates: Vec<Pair> = (0..r)
            .filter(|&i| self.active[i])
            .map(|i| Pair { i, j: r, lcm: self.polys[i].lm().lcm(&hm) })
            .collect();
        let mut kept: Vec<Pair> = Vec::new();
        while let Some(pair) = (!candidates.is_empty()).then(|| candidates.remove(0)) {
            let coprime = self.polys[pair.i].lm().is_coprime(&hm);
            let dominated = candidates
                .iter()
                .chain(kept.iter())
                .any(|other| other.lcm.divides(&pair.lcm));
            if coprime || !dominated {
                kept.push(pair);
            }
        }
        kept.retain(|pair| {
            let g = &self.polys[pair.i];
            !g.lm().is_coprime(&hm) && !(g.is_monomial() && h.is_monomial())
        });
        let polys = &self.polys;
        self.pairs.retain(|pair| {
            if !hm.divides(&pair.lcm) {
                return true;
            }
            let li = polys[pair.i].lm().lcm(&hm);
            let lj = polys[pair.j].lm().lcm(&hm);
            li == pair.lcm || lj == pair.lcm
        });
        self.pairs.extend(kept);
        for k in 0..r {
            if self.active[k] && hm.divides(self.polys[k].lm()) {
                self.active[k] = false;
            }
        }
        self.masks.push(hm.support());
        self.polys.push(h);
        self.active.push(true);
    }

    fn next_pair(&mut self) -> Option<Pair> {
        let best = self
            .pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| (p.lcm.degree(), p.i, p.j))
            .map(|(k, _)| k)?;
        Some(self.pairs.swap_remove(best))
    }
}

fn unit_basis(ring: &Arc<PolyRing>) -> GroebnerBasis {
    let one = Polynomial::one(ring);
    GroebnerBasis { ring: ring.clone(), masks: vec![0], gens: vec![one], reduced: true }
}

/// Computes the reduced Gröbner basis of the ideal generated by `gens` in
/// `ring`, with respect to the ring's order.
///
/// Pairs are selected by minimal lcm degree with ties broken by the index
/// pair, so the computation is deterministic for a fixed input order; the
/// reduced basis itself does not depend on the input order.
pub fn groebner_basis(ring: &Arc<PolyRing>, gens: &[Polynomial]) -> Result<GroebnerBasis> {
    for g in gens {
        if !same_ring(g.ring(), ring) {
            return Err(Error::Structural(format!(
                "generator {g} does not belong to the ring of the ideal"
            )));
        }
    }
    let mut engine = Engine {
        polys: Vec::new(),
        masks: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
    };
    for g in gens {
        if g.is_zero() {
            continue;
        }
        ring.check_degree(g.total_degree().unwrap())?;
        if g.is_constant() {
            return Ok(unit_basis(ring));
        }
        engine.insert(g.monic());
    }
    while let Some(pair) = engine.next_pair() {
        ring.check_degree(pair.lcm.degree())?;
        let s = s_polynomial(&engine.polys[pair.i], &engine.polys[pair.j], &pair.lcm);
        let h = {
            let (basis, masks) = engine.active_basis();
            reduce_full(&s, &basis, &masks)
        };
        if h.is_zero() {
            continue;
        }
        ring.check_degree(h.total_degree().unwrap())?;
        if h.is_constant() {
            return Ok(unit_basis(ring));
        }
        engine.insert(h.monic());
    }
    let order = ring.order();
    let mut minimal: Vec<Polynomial> = engine
        .polys
        .into_iter()
        .zip(engine.active)
        .filter(|(_, a)| *a)
        .map(|(p, _)| p)
        .collect();
    minimal.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    let mut kept: Vec<Polynomial> = Vec::new();
    for p in minimal {
        if !kept.iter().any(|k| k.lm().divides(p.lm())) {
            kept.push(p);
        }
    }
    let masks: Vec<u64> = kept.iter().map(|p| p.lm().support()).collect();
    let mut reduced = Vec::with_capacity(kept.len());
    for (k, p) in kept.iter().enumerate() {
        let others: Vec<&Polynomial> =
            kept.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, q)| q).collect();
        let other_masks: Vec<u64> =
            masks.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &m)| m).collect();
        let head = Polynomial::monomial(ring, p.lm().clone(), p.lc());
        let tail = p.sub(&head);
        let tail = reduce_full(&tail, &others, &other_masks);
        reduced.push(head.add(&tail).monic());
    }
    Ok(GroebnerBasis { ring: ring.clone(), gens: reduced, masks, reduced: true })
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn is_unit(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].is_constant()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.gens.iter().map(|g| g.lm())
    }

    /// The unique remainder of `f` modulo the basis.
    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial> {
        if !same_ring(f.ring(), &self.ring) {
            return Err(Error::Structural(format!("{f} does not belong to the ring of the basis")));
        }
        let basis: Vec<&Polynomial> = self.gens.iter().collect();
        Ok(reduce_full(f, &basis, &self.masks))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Normal form of a single term, without building a polynomial first.
    pub fn reduce_term(&self, m: Monomial, c: Elem) -> Polynomial {
        let f = Polynomial::monomial(&self.ring, m, c);
        let basis: Vec<&Polynomial> = self.gens.iter().collect();
        reduce_full(&f, &basis, &self.masks)
    }

    /// Whether every S-polynomial of the basis reduces to zero.
    pub fn satisfies_buchberger_criterion(&self) -> bool {
        let basis: Vec<&Polynomial> = self.gens.iter().collect();
        for i in 0..self.gens.len() {
            for j in i + 1..self.gens.len() {
                let (f, g) = (&self.gens[i], &self.gens[j]);
                if coprime_lms(f, g) {
                    continue;
                }
                let lcm = f.lm().lcm(g.lm());
                let s = s_polynomial(f, g, &lcm);
                if !reduce_full(&s, &basis, &self.masks).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Upper bounds `b_i` with `x_i^{b_i}` a leading monomial, if every
    /// variable has one (the finite-colength criterion).
    fn pure_power_bounds(&self) -> Option<Vec<u16>> {
        let n = self.ring.nvars();
        let mut bounds = vec![u16::MAX; n];
        for m in self.leading_monomials() {
            if let Some((i, e)) = m.pure_power() {
                bounds[i] = bounds[i].min(e);
            }
        }
        if bounds.contains(&u16::MAX) {
            None
        } else {
            Some(bounds)
        }
    }

    fn walk_staircase(&self, mut visit: impl FnMut(&[u16])) -> bool {
        if self.is_unit() {
            return true;
        }
        let n = self.ring.nvars();
        let Some(bounds) = self.pure_power_bounds() else {
            return false;
        };
        let lms: Vec<&Monomial> = self.leading_monomials().collect();
        let mut exps = vec![0u16; n];
        fn divisible(lms: &[&Monomial], exps: &[u16]) -> bool {
            lms.iter().any(|m| m.exps().iter().zip(exps).all(|(a, b)| a <= b))
        }
        fn rec(
            i: usize,
            exps: &mut Vec<u16>,
            bounds: &[u16],
            lms: &[&Monomial],
            visit: &mut dyn FnMut(&[u16]),
        ) {
            if i == exps.len() {
                visit(exps);
                return;
            }
            for e in 0..bounds[i] {
                exps[i] = e;
                if divisible(lms, exps) {
                    break;
                }
                rec(i + 1, exps, bounds, lms, visit);
            }
            exps[i] = 0;
        }
        rec(0, &mut exps, &bounds, &lms, &mut visit);
        true
    }

    /// Monomials outside the leading-term ideal, in increasing order.
    pub fn standard_monomials(&self) -> StandardMonomials {
        let mut out = Vec::new();
        if !self.walk_staircase(|e| out.push(Monomial::new(e))) {
            return StandardMonomials::Infinite;
        }
        let order = self.ring.order();
        out.sort_by(|a, b| order.cmp(a, b));
        StandardMonomials::Finite(out)
    }

    /// `dim_K K[x]/I`.
    pub fn colength(&self) -> Length {
        let mut count = 0u64;
        if self.walk_staircase(|_| count += 1) {
            Length::Finite(count)
        } else {
            Length::Infinite
        }
    }

    /// Krull dimension of `K[x]/I`: the largest set of variables containing
    /// the support of no leading monomial. The unit ideal gives `-1`.
    pub fn krull_dimension(&self) -> i64 {
        if self.is_unit() {
            return -1;
        }
        let n = self.ring.nvars();
        let masks: Vec<u64> = self.masks.clone();
        fn rec(i: usize, n: usize, set: u64, size: usize, masks: &[u64], best: &mut usize) {
            if size + (n - i) <= *best {
                return;
            }
            if i == n {
                *best = size;
                return;
            }
            let with = set | 1 << i;
            if !masks.iter().any(|&m| m & 1 << i != 0 && m & !with == 0) {
                rec(i + 1, n, with, size + 1, masks, best);
            }
            rec(i + 1, n, set, size, masks, best);
        }
        let mut best = 0;
        rec(0, n, 0, 0, &masks, &mut best);
        best as i64
    }
}
