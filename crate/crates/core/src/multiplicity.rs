//! Hilbert–Samuel and Hilbert–Kunz multiplicities from tables of local lengths.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU32, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::groebner::Length;
use crate::ideal::Ideal;
use crate::poly::Polynomial;
use crate::ring::QuotientRing;
use crate::Rational;

/// Largest `t` tried when waiting for a Hilbert–Samuel function to settle.
pub const DEFAULT_T_CAP: u32 = 24;

static T_CAP: AtomicU32 = AtomicU32::new(DEFAULT_T_CAP);

/// The `t` cap used by [`hilbert_samuel`] and its callers.
pub fn t_cap() -> u32 {
    T_CAP.load(Ordering::Relaxed)
}

/// Sets the process-wide `t` cap.
pub fn set_t_cap(cap: u32) {
    T_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// Consecutive equal finite differences required before reading off `e`.
pub const STABILIZATION_WINDOW: usize = 3;

/// Default Frobenius exponent bound for Hilbert–Kunz estimates.
pub fn default_e_max(p: u32) -> u32 {
    match p {
        2 | 3 => 3,
        5 => 2,
        _ => 1,
    }
}

/// `e(I)` together with the length table it was read from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityReport {
    pub e: u64,
    pub length_table: BTreeMap<u32, u64>,
    pub stabilization_t: u32,
    pub dim_used: u32,
}

/// Hilbert–Kunz estimates `l(R/I^[p^e]) / p^{ed}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HkSequence {
    pub p: u32,
    pub d: u32,
    pub e_max: u32,
    pub lengths: BTreeMap<u32, u64>,
    #[serde(serialize_with = "crate::rational_serde::serialize_map")]
    pub estimates: BTreeMap<u32, Rational>,
    /// Set when a resource cap stopped the sequence before `e_max`.
    pub truncated: bool,
}

impl HkSequence {
    pub fn last(&self) -> Option<(u32, Rational)> {
        self.estimates.iter().next_back().map(|(e, r)| (*e, *r))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chi1Report {
    pub h0: u64,
    pub e: u64,
    pub chi1: u64,
}

/// A minimal reduction of the maximal ideal found by random search.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// The ring the forms live in; it is the input ring over `F_{p^k}`.
    pub ring: QuotientRing,
    pub forms: Vec<Polynomial>,
    pub field_degree: u32,
    pub tries: u32,
    pub e: u64,
}

fn binomial(n: u32, k: u32) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `Δ^d l(t) = Σ_k (-1)^k C(d,k) l(t-k)`, with `l(0) = 0`.
fn finite_difference(table: &BTreeMap<u32, u64>, t: u32, d: u32) -> Option<i128> {
    if t < d {
        return None;
    }
    let mut acc = 0i128;
    for k in 0..=d {
        let s = t - k;
        let v = if s == 0 { 0 } else { *table.get(&s)? as i128 };
        let term = binomial(d, k) * v;
        acc += if k % 2 == 0 { term } else { -term };
    }
    Some(acc)
}

fn ensure_in_maximal(i: &Ideal) -> Result<()> {
    if i.is_local() {
        Ok(())
    } else {
        Err(Error::Argument(format!("{i} is not contained in the maximal ideal")))
    }
}

fn ring_dim(q: &QuotientRing) -> Result<u32> {
    let d = q.dim()?;
    u32::try_from(d).map_err(|_| Error::Argument("the ring is zero".into()))
}

/// `e(I, Q)` as the stabilized `d`-th finite difference of `t ↦ l(Q/I^t)`
/// with `d = dim Q`.
pub fn hilbert_samuel(q: &QuotientRing, i: &Ideal) -> Result<MultiplicityReport> {
    hilbert_samuel_with(q, i, ring_dim(q)?, t_cap())
}

/// Hilbert–Samuel multiplicity taking the `d`-th difference for an explicit
/// `d`, which may exceed `dim Q` (then `e = 0`), as for `e(x, N)` with `N` a
/// cyclic module of a larger ring.
pub fn hilbert_samuel_with(
    q: &QuotientRing,
    i: &Ideal,
    d: u32,
    t_cap: u32,
) -> Result<MultiplicityReport> {
    ensure_in_maximal(i)?;
    let base = q.extend_ideal(i)?;
    let first = q.local_length_of_sum(&base)?;
    if !first.local_length.is_finite() {
        return Err(Error::Argument(format!("{i} is not primary to the maximal ideal")));
    }
    let origin_only = first.away_colength == Length::Finite(0);
    let mut table = BTreeMap::new();
    let mut diffs: Vec<i128> = Vec::new();
    let mut current = base;
    for t in 1..=t_cap {
        if t > 1 {
            let gb = current.groebner()?;
            let prev = Ideal::new(q.ring(), gb.generators().to_vec())?;
            current = prev.product(i)?.sum(q.defining())?;
        }
        let len = if origin_only {
            current.colength()?.finite().expect("primary ideal has finite colength")
        } else {
            q.local_length_of_sum(&current)?.local_length.finite().expect("finite")
        };
        table.insert(t, len);
        if let Some(delta) = finite_difference(&table, t, d) {
            diffs.push(delta);
            let n = diffs.len();
            if n >= STABILIZATION_WINDOW && diffs[n - STABILIZATION_WINDOW..].iter().all(|&v| v == delta)
            {
                if delta < 0 {
                    return Err(Error::Validation(format!(
                        "negative multiplicity {delta} read from {table:?}"
                    )));
                }
                return Ok(MultiplicityReport {
                    e: delta as u64,
                    length_table: table,
                    stabilization_t: t,
                    dim_used: d,
                });
            }
        }
    }
    Err(Error::Resource(format!(
        "Hilbert-Samuel function of {i} did not stabilize by t = {t_cap}; lengths {table:?}"
    )))
}

/// `e(m, Q)`.
pub fn multiplicity(q: &QuotientRing) -> Result<MultiplicityReport> {
    hilbert_samuel(q, &q.maximal_ideal())
}

fn check_sop(q: &QuotientRing, x: &[Polynomial]) -> Result<u32> {
    let d = ring_dim(q)?;
    if x.len() != d as usize {
        return Err(Error::Argument(format!(
            "not a system of parameters: {} elements in a ring of dimension {d}",
            x.len()
        )));
    }
    Ok(d)
}

/// `e((x), Q)` for a system of parameters `x`.
pub fn multiplicity_of_sop(q: &QuotientRing, x: &[Polynomial]) -> Result<MultiplicityReport> {
    check_sop(q, x)?;
    hilbert_samuel(q, &q.ideal(x.to_vec())?)
}

/// `χ₁(x, Q) = l(Q/(x)) - e(x, Q)`.
pub fn chi1(q: &QuotientRing, x: &[Polynomial]) -> Result<Chi1Report> {
    let rep = multiplicity_of_sop(q, x)?;
    let h0 = q.length(&q.ideal(x.to_vec())?)?;
    chi1_from(h0, rep.e)
}

pub(crate) fn chi1_from(h0: u64, e: u64) -> Result<Chi1Report> {
    if h0 < e {
        return Err(Error::Validation(format!("negative chi_1: l = {h0} < e = {e}")));
    }
    Ok(Chi1Report { h0, e, chi1: h0 - e })
}

/// `l(Q/I^[q])` for `q = p^e`.
pub fn frobenius_length(q: &QuotientRing, i: &Ideal, e: u32) -> Result<u64> {
    let p = q.field().characteristic();
    let pe = p
        .checked_pow(e)
        .ok_or_else(|| Error::Resource(format!("{p}^{e} overflows")))?;
    q.length(&i.frobenius_power(pe)?)
}

/// Hilbert–Kunz estimates for `1 ≤ e ≤ e_max`. A resource cap ends the
/// sequence early with `truncated` set.
pub fn hk_sequence(q: &QuotientRing, i: &Ideal, e_max: u32) -> Result<HkSequence> {
    hk_sequence_range(q, i, 1, e_max)
}

/// Hilbert–Kunz estimates for `e_min ≤ e ≤ e_max`.
pub fn hk_sequence_range(q: &QuotientRing, i: &Ideal, e_min: u32, e_max: u32) -> Result<HkSequence> {
    ensure_in_maximal(i)?;
    let d = ring_dim(q)?;
    let p = q.field().characteristic();
    if !q.local_length(i)?.local_length.is_finite() {
        return Err(Error::Argument(format!("{i} is not primary to the maximal ideal")));
    }
    let mut seq = HkSequence {
        p,
        d,
        e_max,
        lengths: BTreeMap::new(),
        estimates: BTreeMap::new(),
        truncated: false,
    };
    for e in e_min..=e_max {
        match frobenius_length(q, i, e) {
            Ok(len) => {
                let denom = (p as i128).pow(e * d);
                seq.lengths.insert(e, len);
                seq.estimates.insert(e, Rational::new(len as i128, denom));
            }
            Err(err) if err.is_resource() => {
                seq.truncated = true;
                break;
            }
            Err(err) => return Err(err),
        }
    }
    Ok(seq)
}

fn random_elem(rng: &mut ChaCha8Rng, field: &FieldSpec) -> u32 {
    rng.gen_range(0..field.size())
}

fn random_linear_forms(rng: &mut ChaCha8Rng, q: &QuotientRing, count: usize) -> Vec<Polynomial> {
    let field = q.field().clone();
    (0..count)
        .map(|_| {
            let terms = (0..q.nvars())
                .map(|v| (crate::Monomial::var(q.nvars(), v), random_elem(rng, &field)))
                .collect();
            Polynomial::from_terms(q.ring(), terms)
        })
        .collect()
}

/// Searches for `d` linear forms generating a minimal reduction of the
/// maximal ideal: `(x)` must have finite colength and `e(x) = e(m)`.
/// Scalars are extended to `F_{p^k}`, `k = 1..4`, when a field runs out of
/// luck; each field gets `max_tries` attempts.
pub fn find_minimal_reduction(q: &QuotientRing, seed: u64, max_tries: u32) -> Result<Reduction> {
    let d = ring_dim(q)?;
    if d == 0 {
        return Err(Error::Argument("minimal reductions need a ring of positive dimension".into()));
    }
    let target = multiplicity(q)?.e;
    let p = q.field().characteristic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0;
    for k in 1..=4u32 {
        let Ok(field) = FieldSpec::new(p, q.field().degree() * k) else {
            break;
        };
        let ring = if k == 1 { q.clone() } else { q.over_field(field)? };
        for _ in 0..max_tries {
            total += 1;
            let forms = random_linear_forms(&mut rng, &ring, d as usize);
            if forms.iter().any(|f| f.is_zero()) {
                continue;
            }
            let ideal = ring.ideal(forms.clone())?;
            if !ring.local_length(&ideal)?.local_length.is_finite() {
                continue;
            }
            let e = hilbert_samuel(&ring, &ideal)?.e;
            if e == target {
                return Ok(Reduction { ring, forms, field_degree: k, tries: total, e });
            }
        }
    }
    Err(Error::Resource(format!(
        "no minimal reduction found in {total} random tries; a larger residue field is needed"
    )))
}

/// `e(x, T^(e) ⊗ S) / p^{e·dim T}` for `S = T/J`, read from the lengths
/// `l(T/(J + (x)^t)^[p^e])`, i.e. the Hilbert–Samuel function of `(x)^[p^e]`
/// on `T/J^[p^e]`.
pub fn frobenius_twisted_multiplicity(
    t_ring: &QuotientRing,
    j: &Ideal,
    x: &[Polynomial],
    e: u32,
) -> Result<(Rational, MultiplicityReport)> {
    let d = x.len() as u32;
    let p = t_ring.field().characteristic();
    let pe = p.checked_pow(e).ok_or_else(|| Error::Resource(format!("{p}^{e} overflows")))?;
    let jq = j.frobenius_power(pe)?;
    let twisted = t_ring.quotient(jq.gens())?;
    let xq = t_ring.ideal(x.to_vec())?.frobenius_power(pe)?;
    let rep = hilbert_samuel_with(&twisted, &xq, d, t_cap())?;
    let dim_t = ring_dim(t_ring)?;
    let denom = (p as i128).pow(e * dim_t);
    Ok((Rational::new(rep.e as i128, denom), rep))
}
