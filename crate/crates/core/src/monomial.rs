use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// Most variables a single ambient ring may have; supports are tracked in a `u64`.
pub const MAX_VARS: usize = 64;

/// A monomial `x^a`, stored as its exponent vector with the total degree cached.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: SmallVec<[u16; 8]>,
    deg: u32,
}

impl Monomial {
    pub fn new(exps: &[u16]) -> Self {
        let deg = exps.iter().map(|&e| e as u32).sum();
        Monomial { exps: SmallVec::from_slice(exps), deg }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial { exps: SmallVec::from_elem(0, nvars), deg: 0 }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::var_pow(nvars, i, 1)
    }

    pub fn var_pow(nvars: usize, i: usize, e: u16) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = e;
        m.deg = e as u32;
        m
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    #[inline]
    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u16 {
        self.exps[i]
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    /// Bit `i` is set iff `x_i` occurs.
    pub fn support(&self) -> u64 {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u64, |acc, (i, _)| acc | (1 << i))
    }

    /// Index of the single variable if this is a pure power `x_i^a`, `a > 0`.
    pub fn pure_power(&self) -> Option<(usize, u16)> {
        let mut found = None;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, e));
            }
        }
        found
    }

    /// Degree in the variables selected by `mask`.
    pub fn degree_in(&self, mask: u64) -> u32 {
        self.exps
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e as u32)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps: SmallVec<[u16; 8]> =
            self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { exps, deg: self.deg + other.deg }
    }

    pub fn pow(&self, q: u32) -> Monomial {
        let exps: SmallVec<[u16; 8]> = self.exps.iter().map(|&a| a * q as u16).collect();
        Monomial { exps, deg: self.deg * q }
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn divide_into(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let exps: SmallVec<[u16; 8]> =
            other.exps.iter().zip(&self.exps).map(|(a, b)| a - b).collect();
        Some(Monomial { exps, deg: other.deg - self.deg })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let exps: SmallVec<[u16; 8]> =
            self.exps.iter().zip(&other.exps).map(|(&a, &b)| a.max(b)).collect();
        let deg = exps.iter().map(|&e| e as u32).sum();
        Monomial { exps, deg }
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let exps: SmallVec<[u16; 8]> =
            self.exps.iter().zip(&other.exps).map(|(&a, &b)| a.min(b)).collect();
        let deg = exps.iter().map(|&e| e as u32).sum();
        Monomial { exps, deg }
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(&a, &b)| a == 0 || b == 0)
    }

    /// Re-index into a ring with `nvars` variables, sending `x_i` to `x_{idx[i]}`.
    pub fn remap(&self, nvars: usize, idx: &[usize]) -> Monomial {
        let mut exps: SmallVec<[u16; 8]> = SmallVec::from_elem(0, nvars);
        for (i, &e) in self.exps.iter().enumerate() {
            exps[idx[i]] += e;
        }
        Monomial { exps, deg: self.deg }
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
            .collect();
        parts.join("*")
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps.as_slice())
    }
}

/// Monomial orders. All refine divisibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    #[default]
    Grevlex,
    Lex,
    /// Elimination order: the variables in `elim` form the first block, and
    /// each block is compared by grevlex.
    Block { elim: u64 },
}

fn grevlex_masked(a: &Monomial, b: &Monomial, mask: u64) -> Ordering {
    let da = a.degree_in(mask);
    let db = b.degree_in(mask);
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.nvars()).rev() {
        if mask >> i & 1 == 0 {
            continue;
        }
        let (x, y) = (a.exps[i], b.exps[i]);
        if x != y {
            return y.cmp(&x);
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::Grevlex => {
                if a.deg != b.deg {
                    return a.deg.cmp(&b.deg);
                }
                for i in (0..a.exps.len()).rev() {
                    let (x, y) = (a.exps[i], b.exps[i]);
                    if x != y {
                        return y.cmp(&x);
                    }
                }
                Ordering::Equal
            }
            MonomialOrder::Lex => a.exps.cmp(&b.exps),
            MonomialOrder::Block { elim } => grevlex_masked(a, b, elim)
                .then_with(|| grevlex_masked(a, b, !elim)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u16]) -> Monomial {
        Monomial::new(e)
    }

    #[test]
    fn grevlex_basics() {
        let o = MonomialOrder::Grevlex;
        // x^3 > y^2 by degree
        assert_eq!(o.cmp(&m(&[3, 0]), &m(&[0, 2])), Ordering::Greater);
        // x > y > z
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 1, 0])), Ordering::Greater);
        // xz < y^2 in grevlex
        assert_eq!(o.cmp(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
    }

    #[test]
    fn block_eliminates() {
        let o = MonomialOrder::Block { elim: 0b001 };
        // anything with x beats any monomial free of x
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 5, 7])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 2, 0]), &m(&[0, 1, 0])), Ordering::Greater);
    }

    #[test]
    fn division_and_lcm() {
        let a = m(&[1, 2, 0]);
        let b = m(&[2, 1, 1]);
        assert_eq!(a.lcm(&b), m(&[2, 2, 1]));
        assert_eq!(a.gcd(&b), m(&[1, 1, 0]));
        assert!(a.divides(&a.lcm(&b)));
        assert_eq!(a.divide_into(&m(&[3, 2, 1])), Some(m(&[2, 0, 1])));
        assert_eq!(a.divide_into(&b), None);
        assert_eq!(m(&[0, 3, 0]).pure_power(), Some((1, 3)));
        assert_eq!(a.support(), 0b011);
    }
}
