use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::groebner::{groebner_basis, GroebnerBasis, Length, StandardMonomials};
use crate::field::is_prime;
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::{same_ring, PolyRing, Polynomial};

/// An ideal given by generators, with its reduced Gröbner basis computed on
/// first use and shared between clones.
#[derive(Clone)]
pub struct Ideal {
    ring: Arc<PolyRing>,
    gens: Vec<Polynomial>,
    gb: Arc<OnceLock<Result<Arc<GroebnerBasis>>>>,
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn dedup(gens: Vec<Polynomial>) -> Vec<Polynomial> {
    let mut seen: HashSet<Vec<(Monomial, u32)>> = HashSet::new();
    gens.into_iter()
        .filter(|g| !g.is_zero())
        .filter(|g| seen.insert(g.monic().into_terms()))
        .collect()
}

impl Ideal {
    pub fn new(ring: &Arc<PolyRing>, gens: Vec<Polynomial>) -> Result<Self> {
        for g in &gens {
            if !same_ring(g.ring(), ring) {
                return Err(Error::Structural(format!("{g} does not belong to the ring")));
            }
        }
        Ok(Self::from_gens(ring, gens))
    }

    fn from_gens(ring: &Arc<PolyRing>, gens: Vec<Polynomial>) -> Self {
        Ideal { ring: ring.clone(), gens, gb: Arc::new(OnceLock::new()) }
    }

    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Self::from_gens(ring, Vec::new())
    }

    pub fn unit(ring: &Arc<PolyRing>) -> Self {
        Self::from_gens(ring, vec![Polynomial::one(ring)])
    }

    /// The ideal of the origin, `(x_1, .., x_n)`.
    pub fn maximal(ring: &Arc<PolyRing>) -> Self {
        Self::from_gens(ring, (0..ring.nvars()).map(|i| Polynomial::var(ring, i)).collect())
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    /// The reduced Gröbner basis, computed at most once.
    pub fn groebner(&self) -> Result<Arc<GroebnerBasis>> {
        self.gb
            .get_or_init(|| groebner_basis(&self.ring, &self.gens).map(Arc::new))
            .clone()
    }

    fn same(&self, other: &Ideal) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::Structural("ideals live in different rings".into()))
        }
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        self.groebner()?.contains(f)
    }

    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool> {
        self.same(other)?;
        let gb = self.groebner()?;
        for g in &other.gens {
            if !gb.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equality of ideals, decided by comparing reduced Gröbner bases.
    pub fn equals(&self, other: &Ideal) -> Result<bool> {
        self.same(other)?;
        let a = self.groebner()?;
        let b = other.groebner()?;
        Ok(a.generators() == b.generators())
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.groebner()?.is_unit())
    }

    pub fn krull_dimension(&self) -> Result<i64> {
        Ok(self.groebner()?.krull_dimension())
    }

    pub fn standard_monomials(&self) -> Result<StandardMonomials> {
        Ok(self.groebner()?.standard_monomials())
    }

    /// `dim_K K[x]/I`.
    pub fn colength(&self) -> Result<Length> {
        Ok(self.groebner()?.colength())
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial> {
        self.groebner()?.normal_form(f)
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        self.same(other)?;
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ok(Self::from_gens(&self.ring, dedup(gens)))
    }

    /// Adds generators to the ideal.
    pub fn extend(&self, more: &[Polynomial]) -> Result<Ideal> {
        self.sum(&Ideal::new(&self.ring, more.to_vec())?)
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        self.same(other)?;
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for f in &self.gens {
            for g in &other.gens {
                if let Some(d) = f.total_degree().zip(g.total_degree()).map(|(a, b)| a + b) {
                    self.ring.check_degree(d)?;
                }
                gens.push(f.mul(g));
            }
        }
        Ok(Self::from_gens(&self.ring, dedup(gens)))
    }

    /// `I^t`, generated by all `t`-fold products of generators. By convention
    /// `I^0` is the unit ideal.
    pub fn power(&self, t: u32) -> Result<Ideal> {
        if t == 0 {
            return Ok(Ideal::unit(&self.ring));
        }
        let mut acc = self.clone();
        for _ in 1..t {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// `I^[q]`, generated by the `q`-th powers of the generators; `q` must be a
    /// power of the characteristic.
    pub fn frobenius_power(&self, q: u32) -> Result<Ideal> {
        let p = self.ring.field().characteristic();
        if !is_power_of(q, p) {
            return Err(Error::Argument(format!("{q} is not a power of the characteristic {p}")));
        }
        let gens = self.gens.iter().map(|g| g.frobenius(q)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_gens(&self.ring, gens))
    }

    /// Moves the ideal into `target`, sending variable `i` to `idx[i]`.
    pub fn remap(&self, target: &Arc<PolyRing>, idx: &[usize]) -> Ideal {
        Self::from_gens(target, self.gens.iter().map(|g| g.remap(target, idx)).collect())
    }

    /// Same generators in a ring with the same variables but another order or field.
    pub fn reinterpret(&self, target: &Arc<PolyRing>) -> Result<Ideal> {
        let gens = self.gens.iter().map(|g| g.reinterpret(target)).collect::<Result<_>>()?;
        Ok(Self::from_gens(target, gens))
    }

    /// Ring with one extra variable appended, ordered to eliminate it first.
    fn with_extra_var(&self, base: &str) -> Result<(Arc<PolyRing>, usize)> {
        let n = self.ring.nvars();
        let mut vars = self.ring.vars().to_vec();
        vars.push(self.ring.fresh_name(base));
        let big = self.ring.with_vars(vars)?;
        let big = big.with_order(MonomialOrder::Block { elim: 1 << n });
        Ok((big, n))
    }

    fn lift(&self, big: &Arc<PolyRing>) -> Vec<Polynomial> {
        let idx: Vec<usize> = (0..self.ring.nvars()).collect();
        self.gens.iter().map(|g| g.remap(big, &idx)).collect()
    }

    /// Elimination in a ring whose extra variables sit after the original ones.
    fn contract(&self, big: &Arc<PolyRing>, gens: Vec<Polynomial>) -> Result<Ideal> {
        let n = self.ring.nvars();
        let gb = groebner_basis(big, &gens)?;
        let mut out = Vec::new();
        for g in gb.generators() {
            if g.support() >> n == 0 {
                let terms = g
                    .terms()
                    .iter()
                    .map(|(m, c)| (Monomial::new(&m.exps()[..n]), *c))
                    .collect();
                out.push(Polynomial::from_terms(&self.ring, terms));
            }
        }
        Ok(Self::from_gens(&self.ring, out))
    }

    pub fn intersection(&self, other: &Ideal) -> Result<Ideal> {
        self.same(other)?;
        let (big, t) = self.with_extra_var("t")?;
        let tv = Polynomial::var(&big, t);
        let one_minus_t = Polynomial::one(&big).sub(&tv);
        let mut gens: Vec<Polynomial> = self.lift(&big).iter().map(|g| g.mul(&tv)).collect();
        gens.extend(other.lift(&big).iter().map(|g| g.mul(&one_minus_t)));
        self.contract(&big, gens)
    }

    /// `I : (f)`, computed as `(I ∩ (f)) / f`.
    pub fn quotient_by(&self, f: &Polynomial) -> Result<Ideal> {
        if f.is_zero() {
            return Ok(Ideal::unit(&self.ring));
        }
        let inter = self.intersection(&Ideal::new(&self.ring, vec![f.clone()])?)?;
        let gens = inter
            .gens
            .iter()
            .map(|g| {
                g.div_exact(f).ok_or_else(|| {
                    Error::Validation(format!("{g} in the intersection is not divisible by {f}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_gens(&self.ring, gens))
    }

    /// `I : J = {f : fJ ⊆ I}`.
    pub fn colon(&self, other: &Ideal) -> Result<Ideal> {
        self.same(other)?;
        let mut acc: Option<Ideal> = None;
        for g in other.gens.iter().filter(|g| !g.is_zero()) {
            let q = self.quotient_by(g)?;
            acc = Some(match acc {
                None => q,
                Some(a) => a.intersection(&q)?,
            });
        }
        Ok(acc.unwrap_or_else(|| Ideal::unit(&self.ring)))
    }

    /// `I : f^∞`, by eliminating `y` from `I + (1 - y f)`.
    pub fn saturate_by(&self, f: &Polynomial) -> Result<Ideal> {
        let (big, y) = self.with_extra_var("y")?;
        let idx: Vec<usize> = (0..self.ring.nvars()).collect();
        let fy = f.remap(&big, &idx).mul(&Polynomial::var(&big, y));
        let mut gens = self.lift(&big);
        gens.push(Polynomial::one(&big).sub(&fy));
        let sat = self.contract(&big, gens)?;
        let check = sat.quotient_by(f)?;
        if !check.equals(&sat)? {
            return Err(Error::Validation(format!("saturation by {f} did not stabilize")));
        }
        Ok(sat)
    }

    /// `I : J^∞`, the intersection of the saturations by the generators of `J`.
    pub fn saturation(&self, other: &Ideal) -> Result<Ideal> {
        self.same(other)?;
        let mut acc: Option<Ideal> = None;
        for g in other.gens.iter().filter(|g| !g.is_zero()) {
            let s = self.saturate_by(g)?;
            acc = Some(match acc {
                None => s,
                Some(a) => a.intersection(&s)?,
            });
        }
        Ok(acc.unwrap_or_else(|| Ideal::unit(&self.ring)))
    }

    /// `I ∩ K[remaining variables]`, kept in the same ambient ring.
    pub fn eliminate(&self, drop: u64) -> Result<Ideal> {
        let order = MonomialOrder::Block { elim: drop };
        let elim_ring = self.ring.with_order(order);
        let gb = groebner_basis(&elim_ring, &self.reinterpret(&elim_ring)?.gens)?;
        let gens = gb
            .generators()
            .iter()
            .filter(|g| g.support() & drop == 0)
            .map(|g| g.reinterpret(&self.ring))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_gens(&self.ring, gens))
    }

    /// Whether every generator vanishes at the origin.
    pub fn is_local(&self) -> bool {
        self.gens.iter().all(|g| g.constant_term() == 0)
    }
}

pub(crate) fn is_power_of(q: u32, p: u32) -> bool {
    if q == 0 || !is_prime(p as u64) {
        return false;
    }
    let mut v = q;
    while v.is_multiple_of(p) {
        v /= p;
    }
    v == 1
}

/// Bitmask of the variables of `ring` with the given names.
pub fn var_mask(ring: &PolyRing, names: &[&str]) -> Result<u64> {
    names.iter().try_fold(0u64, |acc, n| {
        ring.var_index(n)
            .map(|i| acc | 1 << i)
            .ok_or_else(|| Error::Argument(format!("unknown variable {n}")))
    })
}
