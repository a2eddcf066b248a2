//! Finite fields `F_{p^k}`.
//!
//! Elements are encoded as integers `0..p^k`: the base-`p` digits of an
//! element are its coefficients as a polynomial in the generator `a` modulo
//! the stored modulus. The prime subfield is therefore encoded by `0..p`,
//! which makes scalar extension `F_p -> F_{p^k}` the identity on encodings.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Encoded field element.
pub type Elem = u32;

/// Largest supported field size; the modulus search and the log tables are
/// brute force.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

struct FieldData {
    p: u32,
    k: u32,
    size: u32,
    /// Monic modulus, lowest coefficient first, length `k + 1`. Empty when `k == 1`.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for a primitive element `g` (only for `k > 1`).
    exp: Vec<u32>,
    log: Vec<u32>,
    /// Inverse table for prime fields.
    inv: Vec<u32>,
}

/// A finite field `F_{p^k}` with its deterministic modulus.
///
/// Cheap to clone; instances for the same `(p, k)` share their tables.
#[derive(Clone)]
pub struct FieldSpec {
    data: Arc<FieldData>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.data.p == other.data.p && self.data.k == other.data.k
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.data.k == 1 {
            write!(f, "F_{}", self.data.p)
        } else {
            write!(f, "F_{}^{}", self.data.p, self.data.k)
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn cache() -> &'static Mutex<HashMap<(u32, u32), FieldSpec>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), FieldSpec>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl FieldSpec {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    /// `F_{p^k}`, with the modulus chosen as the lexicographically smallest
    /// monic irreducible of degree `k` (coefficients compared from `x^{k-1}`
    /// down to the constant term).
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::Argument(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::Argument("extension degree must be at least 1".into()));
        }
        let size = (p as u64).checked_pow(k).filter(|&s| s <= MAX_FIELD_SIZE);
        let Some(size) = size else {
            return Err(Error::Argument(format!(
                "field of size {p}^{k} exceeds the supported maximum {MAX_FIELD_SIZE}"
            )));
        };
        if let Some(f) = cache().lock().unwrap().get(&(p, k)) {
            return Ok(f.clone());
        }
        let data = if k == 1 {
            let mut inv = vec![0u32; p as usize];
            for a in 1..p {
                inv[a as usize] = pow_mod(a as u64, (p - 2) as u64, p as u64) as u32;
            }
            FieldData { p, k, size: p, modulus: Vec::new(), exp: Vec::new(), log: Vec::new(), inv }
        } else {
            let modulus = lowest_irreducible(p, k as usize);
            let (exp, log) = log_tables(p, &modulus, size as u32);
            FieldData { p, k, size: size as u32, modulus, exp, log, inv: Vec::new() }
        };
        let f = FieldSpec { data: Arc::new(data) };
        cache().lock().unwrap().insert((p, k), f.clone());
        Ok(f)
    }

    pub fn characteristic(&self) -> u32 {
        self.data.p
    }

    pub fn degree(&self) -> u32 {
        self.data.k
    }

    pub fn size(&self) -> u32 {
        self.data.size
    }

    /// Modulus coefficients, constant term first; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.data.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.data.k == 1
    }

    /// Whether an encoded element lies in the prime subfield.
    pub fn in_prime_subfield(&self, a: Elem) -> bool {
        a < self.data.p
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        0
    }

    #[inline]
    pub fn one(&self) -> Elem {
        1
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i64(&self, n: i64) -> Elem {
        n.rem_euclid(self.data.p as i64) as Elem
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.data.p;
        if self.data.k == 1 {
            let s = a + b;
            if s >= p {
                s - p
            } else {
                s
            }
        } else {
            self.digitwise(a, b, |x, y| (x + y) % p)
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.data.p;
        if self.data.k == 1 {
            if a == 0 {
                0
            } else {
                p - a
            }
        } else {
            self.digitwise(a, 0, |x, _| (p - x) % p)
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.data.k == 1 {
            ((a as u64 * b as u64) % self.data.p as u64) as Elem
        } else {
            let n = self.data.size - 1;
            let l = (self.data.log[a as usize] + self.data.log[b as usize]) % n;
            self.data.exp[l as usize]
        }
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero");
        if self.data.k == 1 {
            self.data.inv[a as usize]
        } else {
            let n = self.data.size - 1;
            let l = (n - self.data.log[a as usize]) % n;
            self.data.exp[l as usize]
        }
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Base-`p` digits of an encoded element, constant coefficient first.
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        let p = self.data.p;
        let mut v = Vec::with_capacity(self.data.k as usize);
        let mut a = a;
        for _ in 0..self.data.k {
            v.push(a % p);
            a /= p;
        }
        v
    }

    fn digitwise(&self, a: Elem, b: Elem, op: impl Fn(u32, u32) -> u32) -> Elem {
        let p = self.data.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.data.k {
            out += op(a % p, b % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    /// Human-readable element: symmetric residues for prime fields, a
    /// polynomial in the generator `a` otherwise.
    pub fn format_elem(&self, x: Elem) -> String {
        let p = self.data.p;
        if self.data.k == 1 || x < p {
            let x = x as i64;
            let p = p as i64;
            return if x > p / 2 { format!("{}", x - p) } else { format!("{x}") };
        }
        let digits = self.digits(x);
        let mut parts = Vec::new();
        for (i, &c) in digits.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            parts.push(match i {
                0 => format!("{c}"),
                1 => format!("{coeff}a"),
                _ => format!("{coeff}a^{i}"),
            });
        }
        format!("({})", parts.join("+"))
    }
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

// --- dense polynomials over F_p used only while building extension fields ---

fn poly_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` modulo `b` over `F_p`; `b` must be nonzero.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    let db = b.len() - 1;
    let lead_inv = pow_mod(b[db] as u64, (p - 2) as u64, p as u64) as u32;
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = dr - db;
        for (i, &c) in b.iter().enumerate() {
            let sub = (factor as u64 * c as u64 % p as u64) as u32;
            r[i + shift] = (r[i + shift] + p - sub) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    poly_rem(&prod, modulus, p)
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-`p`
/// digits of `code`, read with the `x^{deg-1}` coefficient most significant.
fn monic_from_code(code: u64, deg: usize, p: u32) -> Vec<u32> {
    let mut coeffs = vec![0u32; deg + 1];
    coeffs[deg] = 1;
    let mut c = code;
    for i in 0..deg {
        coeffs[i] = (c % p as u64) as u32;
        c /= p as u64;
    }
    coeffs
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        for code in 0..(p as u64).pow(d as u32) {
            let g = monic_from_code(code, d, p);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn lowest_irreducible(p: u32, k: usize) -> Vec<u32> {
    (0..(p as u64).pow(k as u32))
        .map(|code| monic_from_code(code, k, p))
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

fn encode(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn decode(mut x: u32, p: u32, k: usize) -> Vec<u32> {
    let mut v = Vec::with_capacity(k);
    for _ in 0..k {
        v.push(x % p);
        x /= p;
    }
    poly_trim(&mut v);
    v
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn log_tables(p: u32, modulus: &[u32], size: u32) -> (Vec<u32>, Vec<u32>) {
    let k = modulus.len() - 1;
    let order = (size - 1) as u64;
    let factors = prime_factors(order);
    let pow_elem = |g: &[u32], mut e: u64| -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut base = g.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, modulus, p);
            }
            base = poly_mulmod(&base, &base, modulus, p);
            e >>= 1;
        }
        acc
    };
    let generator = (2..size)
        .map(|c| decode(c, p, k))
        .find(|g| factors.iter().all(|&r| pow_elem(g, order / r) != vec![1u32]))
        .expect("the multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; order as usize];
    let mut log = vec![0u32; size as usize];
    let mut cur = vec![1u32];
    for (i, slot) in exp.iter_mut().enumerate() {
        let code = encode(&cur, p);
        *slot = code;
        log[code as usize] = i as u32;
        cur = poly_mulmod(&cur, &generator, modulus, p);
    }
    (exp, log)
}
