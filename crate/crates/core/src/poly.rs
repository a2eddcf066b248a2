use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::monomial::{Monomial, MonomialOrder, MAX_VARS};

/// Default bound on monomial degrees appearing during a computation.
pub const DEFAULT_DEGREE_CAP: u32 = 64;

/// An ambient polynomial ring `F[x_1..x_n]` together with its monomial order
/// and the degree cap applied to computations inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    field: FieldSpec,
    vars: Vec<String>,
    order: MonomialOrder,
    degree_cap: u32,
}

impl PolyRing {
    pub fn new(field: FieldSpec, vars: Vec<String>, order: MonomialOrder) -> Result<Arc<Self>> {
        if vars.len() > MAX_VARS {
            return Err(Error::Argument(format!("at most {MAX_VARS} variables are supported")));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::Argument(format!("variable {v} declared twice")));
            }
        }
        Ok(Arc::new(PolyRing { field, vars, order, degree_cap: DEFAULT_DEGREE_CAP }))
    }

    /// Grevlex ring over the given variable names.
    pub fn grevlex(field: FieldSpec, vars: &[&str]) -> Result<Arc<Self>> {
        Self::new(field, vars.iter().map(|s| s.to_string()).collect(), MonomialOrder::Grevlex)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn with_order(&self, order: MonomialOrder) -> Arc<Self> {
        Arc::new(PolyRing { order, ..self.clone() })
    }

    pub fn with_field(&self, field: FieldSpec) -> Arc<Self> {
        Arc::new(PolyRing { field, ..self.clone() })
    }

    pub fn with_degree_cap(&self, degree_cap: u32) -> Arc<Self> {
        Arc::new(PolyRing { degree_cap, ..self.clone() })
    }

    /// Same field, order and cap, different variables.
    pub fn with_vars(&self, vars: Vec<String>) -> Result<Arc<Self>> {
        let mut r = Self::new(self.field.clone(), vars, self.order)?;
        Arc::get_mut(&mut r).unwrap().degree_cap = self.degree_cap;
        Ok(r)
    }

    /// A variable name not already used in this ring, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        if self.var_index(base).is_none() {
            return base.to_string();
        }
        (0..)
            .map(|i| format!("{base}{i}"))
            .find(|n| self.var_index(n).is_none())
            .unwrap()
    }

    pub fn check_degree(&self, deg: u32) -> Result<()> {
        if deg > self.degree_cap {
            Err(Error::Resource(format!(
                "monomial degree {deg} exceeds the degree cap {}",
                self.degree_cap
            )))
        } else {
            Ok(())
        }
    }
}

pub fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub type Term = (Monomial, Elem);

/// A polynomial with terms sorted strictly decreasing in the ring's order and
/// no zero coefficients.
#[derive(Clone)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: Vec<Term>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Polynomial { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Elem) -> Self {
        let terms = if c == 0 { Vec::new() } else { vec![(Monomial::one(ring.nvars()), c)] };
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::constant(ring, 1)
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        Self::monomial(ring, Monomial::var(ring.nvars(), i), 1)
    }

    pub fn monomial(ring: &Arc<PolyRing>, m: Monomial, c: Elem) -> Self {
        let terms = if c == 0 { Vec::new() } else { vec![(m, c)] };
        Polynomial { ring: ring.clone(), terms }
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates.
    pub fn from_terms(ring: &Arc<PolyRing>, terms: Vec<Term>) -> Self {
        let f = ring.field();
        let mut acc: HashMap<Monomial, Elem> = HashMap::with_capacity(terms.len());
        for (m, c) in terms {
            let e = acc.entry(m).or_insert(0);
            *e = f.add(*e, c);
        }
        let mut terms: Vec<Term> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        let order = ring.order();
        terms.sort_unstable_by(|a, b| order.cmp(&b.0, &a.0));
        Polynomial { ring: ring.clone(), terms }
    }

    /// Trusts that `terms` are already sorted and nonzero.
    pub(crate) fn from_sorted(ring: &Arc<PolyRing>, terms: Vec<Term>) -> Self {
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn field(&self) -> &FieldSpec {
        self.ring.field()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coefficient(&self) -> Option<Elem> {
        self.terms.first().map(|t| t.1)
    }

    pub fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    pub fn lc(&self) -> Elem {
        self.terms[0].1
    }

    /// Maximum total degree; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Minimum total degree of a term (the order at the origin).
    pub fn order_at_origin(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).min()
    }

    pub fn constant_term(&self) -> Elem {
        self.terms.last().filter(|(m, _)| m.is_one()).map(|t| t.1).unwrap_or(0)
    }

    /// Sum of the terms of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        let terms = self.terms.iter().filter(|(m, _)| m.degree() == d).cloned().collect();
        Polynomial::from_sorted(&self.ring, terms)
    }

    pub fn linear_part(&self) -> Polynomial {
        self.homogeneous_part(1)
    }

    /// Bitmask of variables occurring in some term.
    pub fn support(&self) -> u64 {
        self.terms.iter().fold(0, |acc, (m, _)| acc | m.support())
    }

    pub fn coefficient(&self, m: &Monomial) -> Elem {
        let order = self.ring.order();
        self.terms
            .binary_search_by(|(t, _)| order.cmp(m, t))
            .map(|i| self.terms[i].1)
            .unwrap_or(0)
    }

    fn assert_ring(&self, other: &Polynomial) {
        assert!(same_ring(&self.ring, &other.ring), "polynomials from different rings");
    }

    pub fn neg(&self) -> Polynomial {
        let f = self.field();
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), f.neg(*c))).collect();
        Polynomial::from_sorted(&self.ring, terms)
    }

    pub fn scale(&self, c: Elem) -> Polynomial {
        if c == 0 {
            return Polynomial::zero(&self.ring);
        }
        let f = self.field();
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), f.mul(*a, c))).collect();
        Polynomial::from_sorted(&self.ring, terms)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coefficient() {
            None | Some(1) => self.clone(),
            Some(c) => self.scale(self.field().inv(c)),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: Elem) -> Polynomial {
        if c == 0 {
            return Polynomial::zero(&self.ring);
        }
        let f = self.field();
        let terms = self.terms.iter().map(|(t, a)| (t.mul(m), f.mul(*a, c))).collect();
        Polynomial::from_sorted(&self.ring, terms)
    }

    /// `self + c * m * other`.
    pub fn add_scaled(&self, other: &Polynomial, c: Elem, m: &Monomial) -> Polynomial {
        self.assert_ring(other);
        let terms = axpy(&self.ring, &self.terms, &other.terms, c, m);
        Polynomial::from_sorted(&self.ring, terms)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.add_scaled(other, 1, &Monomial::one(self.ring.nvars()))
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let minus_one = self.field().neg(1);
        self.add_scaled(other, minus_one, &Monomial::one(self.ring.nvars()))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.assert_ring(other);
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        if other.is_monomial() {
            return self.mul_term(&other.terms[0].0, other.terms[0].1);
        }
        if self.is_monomial() {
            return other.mul_term(&self.terms[0].0, self.terms[0].1);
        }
        let f = self.field();
        let mut acc: HashMap<Monomial, Elem> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = acc.entry(a.mul(b)).or_insert(0);
                *e = f.add(*e, f.mul(*ca, *cb));
            }
        }
        let mut terms: Vec<Term> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        let order = self.ring.order();
        terms.sort_unstable_by(|a, b| order.cmp(&b.0, &a.0));
        Polynomial::from_sorted(&self.ring, terms)
    }

    /// `self^n`, failing if the result would exceed the ring's degree cap.
    pub fn pow(&self, n: u32) -> Result<Polynomial> {
        if let Some(d) = self.total_degree() {
            self.ring.check_degree(d.saturating_mul(n))?;
        }
        let mut acc = Polynomial::one(&self.ring);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// `self^q` for `q` a power of the characteristic, computed termwise.
    pub fn frobenius(&self, q: u32) -> Result<Polynomial> {
        if let Some(d) = self.total_degree() {
            self.ring.check_degree(d.saturating_mul(q))?;
        }
        let f = self.field();
        let terms = self.terms.iter().map(|(m, c)| (m.pow(q), f.pow(*c, q as u64))).collect();
        Ok(Polynomial::from_sorted(&self.ring, terms))
    }

    /// Exact quotient `self / g`, or `None` if `g` does not divide `self`.
    pub fn div_exact(&self, g: &Polynomial) -> Option<Polynomial> {
        self.assert_ring(g);
        assert!(!g.is_zero(), "division by zero polynomial");
        let f = self.field();
        let lc_inv = f.inv(g.lc());
        let mut r = self.clone();
        let mut q = Vec::new();
        while !r.is_zero() {
            let m = g.lm().divide_into(r.lm())?;
            let c = f.mul(r.lc(), lc_inv);
            r = r.add_scaled(g, f.neg(c), &m);
            q.push((m, c));
        }
        Some(Polynomial::from_sorted(&self.ring, q))
    }

    /// Moves the polynomial to `target`, sending variable `i` to `idx[i]`.
    pub fn remap(&self, target: &Arc<PolyRing>, idx: &[usize]) -> Polynomial {
        let n = target.nvars();
        let terms = self.terms.iter().map(|(m, c)| (m.remap(n, idx), *c)).collect();
        Polynomial::from_terms(target, terms)
    }

    /// Same variables, re-sorted for the order (and field) of `target`.
    /// Coefficients must be representable in the target field.
    pub fn reinterpret(&self, target: &Arc<PolyRing>) -> Result<Polynomial> {
        if target.nvars() != self.ring.nvars() {
            return Err(Error::Structural("variable counts differ".into()));
        }
        let tf = target.field();
        if tf.characteristic() != self.field().characteristic() {
            return Err(Error::Structural("characteristics differ".into()));
        }
        if tf != self.field() && self.terms.iter().any(|(_, c)| *c >= tf.size()) {
            return Err(Error::Structural("coefficient outside the target field".into()));
        }
        let mut terms = self.terms.clone();
        let order = target.order();
        terms.sort_unstable_by(|a, b| order.cmp(&b.0, &a.0));
        Ok(Polynomial::from_sorted(target, terms))
    }

    /// Substitutes `images[i]` (polynomials in a common ring) for variable `i`.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        assert_eq!(images.len(), self.ring.nvars(), "one image per variable");
        let target = images
            .first()
            .map(|p| p.ring.clone())
            .ok_or_else(|| Error::Argument("substitution into a ring without variables".into()))?;
        let mut cache: Vec<Vec<Polynomial>> = vec![vec![Polynomial::one(&target)]; images.len()];
        let mut acc: HashMap<Monomial, Elem> = HashMap::new();
        let f = target.field();
        for (m, c) in &self.terms {
            let mut prod = Polynomial::constant(&target, *c);
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().mul(&images[i]);
                    if let Some(d) = next.total_degree() {
                        target.check_degree(d)?;
                    }
                    cache[i].push(next);
                }
                prod = prod.mul(&cache[i][e as usize]);
            }
            for (tm, tc) in prod.terms {
                let slot = acc.entry(tm).or_insert(0);
                *slot = f.add(*slot, tc);
            }
        }
        Ok(Polynomial::from_terms(&target, acc.into_iter().collect()))
    }
}

/// Merge `a + c * m * b` for term lists sorted decreasingly.
pub(crate) fn axpy(ring: &PolyRing, a: &[Term], b: &[Term], c: Elem, m: &Monomial) -> Vec<Term> {
    let f = ring.field();
    let order = ring.order();
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut j = 0;
    let mut shifted = b.first().map(|t| t.0.mul(m));
    while let Some(bm) = &shifted {
        if i < a.len() {
            match order.cmp(&a[i].0, bm) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                    continue;
                }
                Ordering::Equal => {
                    let s = f.add(a[i].1, f.mul(b[j].1, c));
                    if s != 0 {
                        out.push((a[i].0.clone(), s));
                    }
                    i += 1;
                }
                Ordering::Less => out.push((bm.clone(), f.mul(b[j].1, c))),
            }
        } else {
            out.push((bm.clone(), f.mul(b[j].1, c)));
        }
        j += 1;
        shifted = b.get(j).map(|t| t.0.mul(m));
    }
    out.extend_from_slice(&a[i..]);
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = self.field();
        let names = self.ring.vars();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mut coeff = field.format_elem(*c);
            let negative = coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            if m.is_one() {
                write!(f, "{coeff}")?;
            } else if coeff == "1" {
                write!(f, "{}", m.format_with(names))?;
            } else {
                write!(f, "{}*{}", coeff, m.format_with(names))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u32, vars: &[&str]) -> Arc<PolyRing> {
        PolyRing::grevlex(FieldSpec::prime(p).unwrap(), vars).unwrap()
    }

    #[test]
    fn arithmetic() {
        let r = ring(5, &["x", "y"]);
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(format!("{sq}"), "x^2 + 2*x*y + y^2");
        assert_eq!(sq.sub(&sq), Polynomial::zero(&r));
        let cube = s.pow(3).unwrap();
        assert_eq!(cube.len(), 4);
        assert_eq!(format!("{}", x.sub(&y.scale(2))), "x - 2*y");
    }

    #[test]
    fn frobenius_matches_power() {
        let r = ring(3, &["x", "y", "z"]);
        let f = Polynomial::var(&r, 0)
            .add(&Polynomial::var(&r, 1).scale(2))
            .mul(&Polynomial::var(&r, 2).add(&Polynomial::one(&r)));
        assert_eq!(f.frobenius(9).unwrap(), f.pow(9).unwrap());
    }

    #[test]
    fn exact_division() {
        let r = ring(7, &["x", "y"]);
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let g = x.sub(&y);
        let h = x.mul(&x).add(&y);
        let prod = g.mul(&h);
        assert_eq!(prod.div_exact(&g), Some(h.clone()));
        assert_eq!(prod.add(&Polynomial::one(&r)).div_exact(&g), None);
    }

    #[test]
    fn substitution() {
        let r = ring(5, &["x", "y"]);
        let s = ring(5, &["t"]);
        let t = Polynomial::var(&s, 0);
        let f = Polynomial::var(&r, 1).pow(2).unwrap().sub(&Polynomial::var(&r, 0).pow(3).unwrap());
        let img = f.substitute(&[t.pow(2).unwrap(), t.pow(3).unwrap()]).unwrap();
        assert!(img.is_zero());
    }

    #[test]
    fn degree_cap_is_enforced() {
        let r = ring(2, &["x"]);
        assert!(Polynomial::var(&r, 0).pow(65).unwrap_err().is_resource());
        assert!(Polynomial::var(&r, 0).frobenius(64).is_ok());
    }
}
