//! Local maps `(R, m) → (S, n)` between presented rings, their closed fibres,
//! flatness evidence, scalar extension, reduction of integer presentations
//! modulo primes, and Cohen factorizations `R → T → S = T/J`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::ideal::Ideal;
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::{same_ring, PolyRing, Polynomial};
use crate::ring::{kernel_of_map, QuotientRing};

/// Default number of powers checked by the freeness probe.
pub const DEFAULT_PROBE_T_MAX: u32 = 4;

/// Prime used as the stand-in for characteristic zero when judging whether
/// a prime is good for an integer presentation.
pub const REFERENCE_PRIME: u32 = 32003;

/// How flatness of a map is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlatTag {
    /// Flat for a structural reason named by the pattern.
    ByConstruction(String),
    /// Passed the freeness probe's necessary conditions.
    Probed,
    Unknown,
}

impl fmt::Display for FlatTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlatTag::ByConstruction(p) => write!(f, "by-construction({p})"),
            FlatTag::Probed => write!(f, "probed"),
            FlatTag::Unknown => write!(f, "unknown"),
        }
    }
}

impl Serialize for FlatTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `S/mS`, presented by the ideal `J_S + (images)` of the target's ambient ring.
#[derive(Clone, Debug)]
pub struct ClosedFiber {
    pub ideal: Ideal,
    pub length: u64,
    pub nu: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub rank: Option<u64>,
    /// `t ↦ (l(S/x^t S), l(R/x^t R))`.
    pub table: Vec<(u32, u64, u64)>,
    pub flat_candidate: bool,
    pub failed_at: Option<u32>,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct LocalMap {
    pub source: QuotientRing,
    pub target: QuotientRing,
    pub images: Vec<Polynomial>,
    pub fiber: ClosedFiber,
    pub flat_tag: FlatTag,
    pub probe: Option<ProbeReport>,
}

/// Builds and validates a local map sending source variable `i` to `images[i]`.
///
/// The map must be local and well defined, and its closed fibre must have
/// finite length (so `dim R = dim S`). Flatness is inferred from the shape
/// of the presentation when possible and otherwise probed.
pub fn make_local_map(
    source: &QuotientRing,
    target: &QuotientRing,
    images: Vec<Polynomial>,
) -> Result<LocalMap> {
    if images.len() != source.nvars() {
        return Err(Error::Argument(format!(
            "{} images given for {} source variables",
            images.len(),
            source.nvars()
        )));
    }
    if source.field() != target.field() {
        return Err(Error::Structural("source and target have different fields".into()));
    }
    for img in &images {
        if !same_ring(img.ring(), target.ring()) {
            return Err(Error::Structural(format!("image {img} is not in the target ring")));
        }
        if img.constant_term() != 0 {
            return Err(Error::Validation(format!(
                "the map is not local: image {img} has a nonzero constant term"
            )));
        }
    }
    let tgt_gb = target.defining_gb()?;
    for g in source.defining().gens() {
        let img = g.substitute(&images)?;
        if !tgt_gb.contains(&img)? {
            return Err(Error::Validation(format!(
                "the map is not well defined: relation {g} maps to {img}, not zero in the target"
            )));
        }
    }
    let fiber = closed_fiber(target, &images)?;
    let (dr, ds) = (source.dim()?, target.dim()?);
    if dr != ds {
        return Err(Error::Validation(format!(
            "source has dimension {dr} but target has dimension {ds}"
        )));
    }
    let mut map = LocalMap {
        source: source.clone(),
        target: target.clone(),
        images,
        fiber,
        flat_tag: FlatTag::Unknown,
        probe: None,
    };
    if let Some(pattern) = flatness_pattern(&map)? {
        map.flat_tag = FlatTag::ByConstruction(pattern);
    } else {
        let probe = freeness_probe(&map, DEFAULT_PROBE_T_MAX)?;
        if probe.flat_candidate {
            map.flat_tag = FlatTag::Probed;
        }
        map.probe = Some(probe);
    }
    Ok(map)
}

fn closed_fiber(target: &QuotientRing, images: &[Polynomial]) -> Result<ClosedFiber> {
    let ext = target.ideal(images.to_vec())?;
    let length = target.local_length(&ext)?.local_length.finite().ok_or_else(|| {
        Error::Validation("the closed fibre has infinite length (dim S > dim R)".into())
    })?;
    let ideal = target.extend_ideal(&ext)?;
    let ambient = QuotientRing::polynomial(target.ring());
    let nu = ambient.min_gens(&ideal)?;
    Ok(ClosedFiber { ideal, length, nu })
}

impl LocalMap {
    pub fn is_identity(&self) -> bool {
        same_ring(self.source.ring(), self.target.ring())
            && self.images == self.target.vars()
            && self.source.defining().gens() == self.target.defining().gens()
    }

    pub fn is_flat(&self) -> bool {
        self.flat_tag != FlatTag::Unknown
    }

    /// `edim S - edim R`.
    pub fn edim_difference(&self) -> Result<i64> {
        Ok(self.target.edim()? as i64 - self.source.edim()? as i64)
    }

    /// The same map over `F_{p^{k·k0}}`.
    pub fn scalar_extend(&self, k: u32) -> Result<LocalMap> {
        if k == 1 {
            return Ok(self.clone());
        }
        let source = scalar_extend(&self.source, k)?;
        let target = scalar_extend(&self.target, k)?;
        let images = self
            .images
            .iter()
            .map(|g| g.reinterpret(target.ring()))
            .collect::<Result<Vec<_>>>()?;
        let fiber = closed_fiber(&target, &images)?;
        Ok(LocalMap { source, target, images, fiber, ..self.clone() })
    }
}

/// Recognizes presentations that are flat for structural reasons.
fn flatness_pattern(map: &LocalMap) -> Result<Option<String>> {
    if map.is_identity() {
        return Ok(Some("identity".into()));
    }
    if free_presentation(map)? {
        return Ok(Some("free-presentation".into()));
    }
    if map.source.is_polynomial_ring()? {
        let x = map.target.ideal(map.images.clone())?;
        let d = map.target.dim()?;
        if d == map.images.len() as i64 {
            let h0 = map.target.length(&x)?;
            let e = crate::multiplicity::hilbert_samuel(&map.target, &x)?.e;
            if h0 == e {
                return Ok(Some("regular-base-cohen-macaulay".into()));
            }
        }
    }
    Ok(None)
}

/// `S = R[z]/(G)` where the images are distinct variables and, for an order
/// eliminating the other variables `z`, every basis element involving `z` has
/// a leading monomial in `z` alone while the rest generate the extension of
/// `J_R`. Then `S` is free over `R` on the standard monomials in `z`.
fn free_presentation(map: &LocalMap) -> Result<bool> {
    let s_ring = map.target.ring();
    let mut base_idx = Vec::with_capacity(map.images.len());
    for img in &map.images {
        match img.terms() {
            [(m, 1)] if m.degree() == 1 => {
                let (i, _) = m.pure_power().unwrap();
                if base_idx.contains(&i) {
                    return Ok(false);
                }
                base_idx.push(i);
            }
            _ => return Ok(false),
        }
    }
    let base_mask: u64 = base_idx.iter().fold(0, |acc, &i| acc | 1 << i);
    let z_mask = !base_mask & ((1u64 << s_ring.nvars()) - 1);
    let elim_ring = s_ring.with_order(MonomialOrder::Block { elim: z_mask });
    let gb = crate::groebner_basis(&elim_ring, map.target.defining().reinterpret(&elim_ring)?.gens())?;
    let mut base_part = Vec::new();
    for g in gb.generators() {
        if g.support() & z_mask == 0 {
            base_part.push(g.reinterpret(s_ring)?);
        } else if g.lm().support() & base_mask != 0 {
            return Ok(false);
        }
    }
    let extended = map.source.defining().remap(s_ring, &base_idx);
    let base = Ideal::new(s_ring, base_part)?;
    base.equals(&extended)
}

/// Necessary conditions for flatness: with `x` a system of parameters of `R`
/// (or `m` when none is found over the base field) and `r = l(S/xS)/l(R/xR)`,
/// require `l(S/x^t S) = r·l(R/x^t R)` for `t ≤ t_max`.
pub fn freeness_probe(map: &LocalMap, t_max: u32) -> Result<ProbeReport> {
    let (x_src, note) = probe_ideal(&map.source)?;
    let images: Vec<Polynomial> = x_src
        .gens()
        .iter()
        .map(|g| g.substitute(&map.images))
        .collect::<Result<_>>()?;
    let x_tgt = map.target.ideal(images)?;
    let mut table = Vec::new();
    let mut rank = None;
    for t in 1..=t_max {
        let lr = map.source.length(&x_src.power(t)?)?;
        let ls = map.target.length(&x_tgt.power(t)?)?;
        table.push((t, ls, lr));
        if t == 1 {
            if ls % lr != 0 {
                return Ok(ProbeReport {
                    rank: None,
                    table,
                    flat_candidate: false,
                    failed_at: Some(1),
                    note: format!("{note}; candidate rank {ls}/{lr} is not an integer"),
                });
            }
            rank = Some(ls / lr);
        } else if ls != rank.unwrap() * lr {
            return Ok(ProbeReport {
                rank,
                table,
                flat_candidate: false,
                failed_at: Some(t),
                note: format!("{note}; length of S/x^{t}S is not rank times length of R/x^{t}R"),
            });
        }
    }
    Ok(ProbeReport { rank, table, flat_candidate: true, failed_at: None, note })
}

fn probe_ideal(r: &QuotientRing) -> Result<(Ideal, String)> {
    let d = r.dim()? as usize;
    if r.is_polynomial_ring()? || d == 0 {
        let x = if d == 0 { r.maximal_ideal() } else { r.ideal(r.vars())? };
        return Ok((x, "probe ideal: the variables".into()));
    }
    match crate::multiplicity::find_minimal_reduction(r, 0, 32) {
        Ok(red) if red.field_degree == 1 => {
            Ok((r.ideal(red.forms)?, "probe ideal: a minimal reduction".into()))
        }
        _ => Ok((r.maximal_ideal(), "probe ideal: the maximal ideal".into())),
    }
}

/// The same presentation over `F_{p^{k·k0}}` where the ring is over `F_{p^{k0}}`.
pub fn scalar_extend(q: &QuotientRing, k: u32) -> Result<QuotientRing> {
    if k == 0 {
        return Err(Error::Argument("extension degree must be at least 1".into()));
    }
    if k == 1 {
        return Ok(q.clone());
    }
    let f = q.field();
    q.over_field(FieldSpec::new(f.characteristic(), f.degree() * k)?)
}

/// Whether the closed fibre is a complete intersection: `ν(A)` equals the
/// number of ambient variables of the target.
pub fn is_ci_fiber(map: &LocalMap) -> bool {
    map.fiber.nu == map.target.nvars() as u64
}

// ---------------------------------------------------------------------------
// Integer presentations

/// Polynomial with integer coefficients, as exponent vectors and coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    pub terms: Vec<(Vec<u16>, BigInt)>,
}

impl IntPoly {
    pub fn content(&self) -> BigInt {
        self.terms.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c))
    }

    fn reduce(&self, ring: &Arc<PolyRing>) -> Polynomial {
        let p = BigInt::from(ring.field().characteristic());
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let r: BigInt = c.mod_floor(&p);
                (Monomial::new(e), u32::try_from(r).unwrap())
            })
            .collect();
        Polynomial::from_terms(ring, terms)
    }
}

#[derive(Clone, Debug)]
pub struct IntegerPresentation {
    pub source_vars: Vec<String>,
    pub source_relations: Vec<IntPoly>,
    pub target_vars: Vec<String>,
    pub target_relations: Vec<IntPoly>,
    pub images: Vec<IntPoly>,
}

#[derive(Clone, Debug)]
pub enum Specialization {
    Good(Box<LocalMap>),
    BadPrime { p: u32, reason: String },
}

struct Invariants {
    dim: i64,
    fiber_length: u64,
}

fn build_mod_p(pres: &IntegerPresentation, p: u32) -> Result<LocalMap> {
    let field = FieldSpec::prime(p)?;
    let src = PolyRing::new(field.clone(), pres.source_vars.clone(), MonomialOrder::Grevlex)?;
    let tgt = PolyRing::new(field, pres.target_vars.clone(), MonomialOrder::Grevlex)?;
    let r = QuotientRing::new(&src, pres.source_relations.iter().map(|f| f.reduce(&src)).collect())?;
    let s = QuotientRing::new(&tgt, pres.target_relations.iter().map(|f| f.reduce(&tgt)).collect())?;
    let images = pres.images.iter().map(|f| f.reduce(&tgt)).collect();
    make_local_map(&r, &s, images)
}

fn invariants(map: &LocalMap) -> Result<Invariants> {
    Ok(Invariants { dim: map.source.dim()?, fiber_length: map.fiber.length })
}

/// Reduces an integer presentation modulo `p`. The prime is bad when the
/// reduction is not a valid local map, or when its dimension or fibre length
/// differs from the reduction modulo the reference prime.
pub fn specialize_mod_p(pres: &IntegerPresentation, p: u32) -> Result<Specialization> {
    for f in pres.source_relations.iter().chain(&pres.target_relations).chain(&pres.images) {
        let c = f.content();
        if !f.terms.is_empty() && c.abs() != BigInt::from(1) {
            return Err(Error::Argument(format!("integer polynomial has content {c}, expected 1")));
        }
    }
    if !crate::field::is_prime(p as u64) {
        return Err(Error::Argument(format!("{p} is not prime")));
    }
    let reference = build_mod_p(pres, REFERENCE_PRIME)?;
    let ref_inv = invariants(&reference)?;
    let map = match build_mod_p(pres, p) {
        Ok(m) => m,
        Err(e) if e.is_resource() => return Err(e),
        Err(e) => return Ok(Specialization::BadPrime { p, reason: e.to_string() }),
    };
    let inv = invariants(&map)?;
    if inv.dim != ref_inv.dim {
        return Ok(Specialization::BadPrime {
            p,
            reason: format!("dimension {} differs from {} at the reference prime", inv.dim, ref_inv.dim),
        });
    }
    if inv.fiber_length != ref_inv.fiber_length {
        return Ok(Specialization::BadPrime {
            p,
            reason: format!(
                "fibre length {} differs from {} at the reference prime",
                inv.fiber_length, ref_inv.fiber_length
            ),
        });
    }
    Ok(Specialization::Good(Box::new(map)))
}

// ---------------------------------------------------------------------------
// Cohen factorization

/// `R → T → S = T/J` with `R → T` flat with complete-intersection fibre and
/// `J ⊆ n_T²`.
#[derive(Clone, Debug)]
pub struct CohenFactorization {
    /// `T`; its first `source_vars` variables are those of `R`.
    pub t_ring: QuotientRing,
    pub source_vars: usize,
    /// `J`, as an ideal of the ambient ring of `T`.
    pub j: Ideal,
    /// Elements removed from `J'` while shrinking `T'`, as polynomials in `T'`.
    pub peeled: Vec<Polynomial>,
    /// Image in `T` of each target variable (a preimage under `T → S`).
    pub lift: Vec<Polynomial>,
    pub c: i64,
    pub edim_r: u64,
    pub edim_s: u64,
    pub edim_t: u64,
}

impl CohenFactorization {
    /// `S` presented as `T/J`.
    pub fn s_as_quotient(&self) -> Result<QuotientRing> {
        self.t_ring.quotient(self.j.gens())
    }

    /// Lifts a polynomial in the target's ambient ring to `T`.
    pub fn lift_poly(&self, f: &Polynomial) -> Result<Polynomial> {
        if self.lift.is_empty() {
            return Ok(Polynomial::zero(self.t_ring.ring()));
        }
        f.substitute(&self.lift)
    }

    /// Whether every generator of `J` lies in `n_T² + J_T`.
    pub fn j_in_square(&self) -> Result<bool> {
        let sq = self.t_ring.extend_ideal(&self.t_ring.maximal_ideal().power(2)?)?;
        for g in self.j.gens() {
            if !sq.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same factorization over `F_{p^{k·k0}}`.
    pub fn scalar_extend(&self, k: u32) -> Result<CohenFactorization> {
        let t_ring = scalar_extend(&self.t_ring, k)?;
        let r = t_ring.ring();
        let re = |g: &Polynomial| g.reinterpret(r);
        Ok(CohenFactorization {
            j: self.j.reinterpret(r)?,
            lift: self.lift.iter().map(re).collect::<Result<_>>()?,
            peeled: self.peeled.clone(),
            t_ring,
            ..self.clone()
        })
    }
}

struct PeelState {
    ambient: Arc<PolyRing>,
    defining: Vec<Polynomial>,
    j: Vec<Polynomial>,
    lift: Vec<Polynomial>,
}

impl PeelState {
    fn t_ring(&self) -> Result<QuotientRing> {
        QuotientRing::new(&self.ambient, self.defining.clone())
    }

    fn fiber_dim(&self, nr: usize, extra: Option<&Polynomial>) -> Result<i64> {
        let mut gens = self.defining.clone();
        gens.extend((0..nr).map(|i| Polynomial::var(&self.ambient, i)));
        gens.extend(extra.cloned());
        Ideal::new(&self.ambient, gens)?.krull_dimension()
    }

    /// Removes variable `v` by substituting `value` (free of `v`) for it.
    fn substitute(&mut self, v: usize, value: &Polynomial) -> Result<()> {
        let n = self.ambient.nvars();
        let mut names = self.ambient.vars().to_vec();
        names.remove(v);
        let smaller = self.ambient.with_vars(names)?;
        let images: Vec<Polynomial> = (0..n)
            .map(|i| match i.cmp(&v) {
                std::cmp::Ordering::Less => Ok(Polynomial::var(&smaller, i)),
                std::cmp::Ordering::Greater => Ok(Polynomial::var(&smaller, i - 1)),
                std::cmp::Ordering::Equal => value.substitute(
                    &(0..n)
                        .map(|k| match k.cmp(&v) {
                            std::cmp::Ordering::Less => Polynomial::var(&smaller, k),
                            std::cmp::Ordering::Greater => Polynomial::var(&smaller, k - 1),
                            std::cmp::Ordering::Equal => Polynomial::zero(&smaller),
                        })
                        .collect::<Vec<_>>(),
                ),
            })
            .collect::<Result<_>>()?;
        let sub = |fs: &[Polynomial]| -> Result<Vec<Polynomial>> {
            let out: Vec<Polynomial> =
                fs.iter().map(|f| f.substitute(&images)).collect::<Result<_>>()?;
            Ok(out.into_iter().filter(|f| !f.is_zero()).collect())
        };
        self.defining = sub(&self.defining)?;
        self.j = sub(&self.j)?;
        self.lift = self.lift.iter().map(|f| f.substitute(&images)).collect::<Result<_>>()?;
        self.ambient = smaller;
        Ok(())
    }
}

/// A variable `z` among `candidates` occurring in `y` only through a single
/// term `c·z`, with the value of `z` that makes `y` vanish.
fn solvable_variable(y: &Polynomial, candidates: u64) -> Option<(usize, Polynomial)> {
    let field = y.field().clone();
    for v in 0..y.ring().nvars() {
        if candidates >> v & 1 == 0 {
            continue;
        }
        let occurrences: Vec<_> = y.terms().iter().filter(|(m, _)| m.exp(v) > 0).collect();
        if let [(m, c)] = occurrences.as_slice() {
            if m.degree() == 1 {
                let lin = Polynomial::monomial(y.ring(), m.clone(), *c);
                let rest = y.sub(&lin);
                let value = rest.scale(field.neg(field.inv(*c)));
                return Some((v, value));
            }
        }
    }
    None
}

/// Builds a Cohen factorization of a validated map by starting from
/// `T' = R[z_1..z_s]`, `J' = ker(T' → S)`, and peeling off elements of `J'`
/// that are outside `n_{T'}²` and cut the fibre dimension by one, until
/// `edim T = edim S`.
pub fn cohen_factor(map: &LocalMap, seed: u64) -> Result<CohenFactorization> {
    let r = &map.source;
    let s = &map.target;
    let nr = r.nvars();
    let ns = s.nvars();
    let edim_r = r.edim()?;
    let edim_s = s.edim()?;
    let c = edim_s as i64 - edim_r as i64;
    if c < 0 {
        return Err(Error::Validation(format!(
            "edim S - edim R = {c} is negative; the map cannot be flat"
        )));
    }
    let mut names: Vec<String> = r.ring().vars().to_vec();
    for v in s.ring().vars() {
        let mut name = format!("z{v}");
        while names.contains(&name) {
            name.push('\'');
        }
        names.push(name);
    }
    let ambient = r.ring().with_vars(names)?;
    let mut images: Vec<Polynomial> = map.images.clone();
    images.extend(s.vars());
    let j_prime = kernel_of_map(&ambient, s, &images)?;
    let src_idx: Vec<usize> = (0..nr).collect();
    let mut state = PeelState {
        defining: r.defining().gens().iter().map(|g| g.remap(&ambient, &src_idx)).collect(),
        j: j_prime.groebner()?.generators().to_vec(),
        lift: (0..ns).map(|j| Polynomial::var(&ambient, nr + j)).collect(),
        ambient,
    };
    let mut peeled = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let t = state.t_ring()?;
        if t.edim()? <= edim_s {
            break;
        }
        let sq = t.extend_ideal(&t.maximal_ideal().power(2)?)?;
        let fiber_dim = state.fiber_dim(nr, None)?;
        let mut candidates: Vec<(usize, Polynomial)> = Vec::new();
        for (k, g) in state.j.iter().enumerate() {
            if !sq.contains(g)? {
                candidates.push((k, g.clone()));
            }
        }
        candidates.sort_by_key(|(k, g)| (g.total_degree().unwrap_or(0), *k));
        let mut chosen = None;
        for (_, y) in &candidates {
            if state.fiber_dim(nr, Some(y))? == fiber_dim - 1 {
                chosen = Some(y.clone());
                break;
            }
        }
        if chosen.is_none() && candidates.len() > 1 {
            let field = state.ambient.field().clone();
            for _ in 0..64 {
                let mut y = Polynomial::zero(&state.ambient);
                for (_, g) in &candidates {
                    y = y.add(&g.scale(rng.gen_range(0..field.size())));
                }
                if y.is_zero() || sq.contains(&y)? {
                    continue;
                }
                if state.fiber_dim(nr, Some(&y))? == fiber_dim - 1 {
                    chosen = Some(y);
                    break;
                }
            }
        }
        let Some(y) = chosen else {
            return Err(Error::Resource(format!(
                "no element of J outside n_T^2 cuts the fibre dimension (T has edim {}, S has edim {edim_s}); a larger residue field may help",
                t.edim()?
            )));
        };
        peeled.push(y.clone());
        let z_mask = (((1u64 << state.ambient.nvars()) - 1) >> nr) << nr;
        match solvable_variable(&y, z_mask) {
            Some((v, value)) => state.substitute(v, &value)?,
            None => state.defining.push(y),
        }
    }
    let t_ring = state.t_ring()?;
    let j = Ideal::new(&state.ambient, state.j.clone())?;
    let fact = CohenFactorization {
        edim_t: t_ring.edim()?,
        t_ring,
        source_vars: nr,
        j,
        peeled,
        lift: state.lift,
        c,
        edim_r,
        edim_s,
    };
    if !fact.j_in_square()? {
        return Err(Error::Validation("J is not contained in n_T^2".into()));
    }
    if fact.edim_t as i64 != edim_r as i64 + c {
        return Err(Error::Validation(format!(
            "edim T = {} but edim R + c = {}",
            fact.edim_t,
            edim_r as i64 + c
        )));
    }
    Ok(fact)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_ring(p: u32, vars: &[&str]) -> Arc<PolyRing> {
        PolyRing::grevlex(FieldSpec::prime(p).unwrap(), vars).unwrap()
    }

    fn cusp_over_line(p: u32) -> LocalMap {
        let rr = poly_ring(p, &["x"]);
        let sr = poly_ring(p, &["x", "y"]);
        let (x, y) = (Polynomial::var(&sr, 0), Polynomial::var(&sr, 1));
        let r = QuotientRing::polynomial(&rr);
        let s = QuotientRing::new(&sr, vec![y.pow(2).unwrap().sub(&x.pow(3).unwrap())]).unwrap();
        make_local_map(&r, &s, vec![x]).unwrap()
    }

    #[test]
    fn cusp_fibre_and_factorization() {
        let map = cusp_over_line(5);
        assert_eq!(map.fiber.length, 2);
        assert!(is_ci_fiber(&map));
        assert_eq!(map.flat_tag, FlatTag::ByConstruction("free-presentation".into()));
        let f = cohen_factor(&map, 1).unwrap();
        assert_eq!(f.c, 1);
        assert_eq!(f.edim_t, 2);
        assert_eq!(f.t_ring.nvars(), 2);
        assert!(f.t_ring.is_polynomial_ring().unwrap());
        assert_eq!(f.j.gens().len(), 1);
    }

    #[test]
    fn double_cover() {
        let rr = poly_ring(3, &["x"]);
        let sr = poly_ring(3, &["u"]);
        let u = Polynomial::var(&sr, 0);
        let map = make_local_map(
            &QuotientRing::polynomial(&rr),
            &QuotientRing::polynomial(&sr),
            vec![u.pow(2).unwrap()],
        )
        .unwrap();
        assert_eq!(map.fiber.length, 2);
        assert_eq!(map.flat_tag, FlatTag::ByConstruction("regular-base-cohen-macaulay".into()));
        let f = cohen_factor(&map, 1).unwrap();
        assert_eq!(f.c, 0);
        assert_eq!(f.edim_t, 1);
        assert!(f.j_in_square().unwrap());
    }

    #[test]
    fn non_local_rejected() {
        let rr = poly_ring(5, &["x"]);
        let sr = poly_ring(5, &["x"]);
        let x = Polynomial::var(&sr, 0);
        let err = make_local_map(
            &QuotientRing::polynomial(&rr),
            &QuotientRing::polynomial(&sr),
            vec![x.add(&Polynomial::one(&sr))],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn probe_rejects_embedded_point() {
        let rr = poly_ring(5, &["x"]);
        let sr = poly_ring(5, &["x", "y"]);
        let (x, y) = (Polynomial::var(&sr, 0), Polynomial::var(&sr, 1));
        let s = QuotientRing::new(&sr, vec![x.mul(&y), y.mul(&y)]).unwrap();
        let map = make_local_map(&QuotientRing::polynomial(&rr), &s, vec![x]).unwrap();
        assert_eq!(map.flat_tag, FlatTag::Unknown);
        let probe = map.probe.unwrap();
        assert_eq!(probe.rank, Some(2));
        assert_eq!(probe.failed_at, Some(2));
    }

    #[test]
    fn identity() {
        let rr = poly_ring(2, &["x", "y"]);
        let q = QuotientRing::new(&rr, vec![Polynomial::var(&rr, 0).mul(&Polynomial::var(&rr, 1))])
            .unwrap();
        let map = make_local_map(&q, &q, q.vars()).unwrap();
        assert_eq!(map.flat_tag, FlatTag::ByConstruction("identity".into()));
        let f = cohen_factor(&map, 0).unwrap();
        assert_eq!(f.c, 0);
        assert_eq!(f.t_ring.nvars(), 2);
        assert!(f.j.groebner().unwrap().generators().iter().all(|g| {
            q.defining().contains(g).unwrap()
        }));
    }

    #[test]
    fn ci_fibres() {
        let sr = poly_ring(5, &["u", "v"]);
        let (u, v) = (Polynomial::var(&sr, 0), Polynomial::var(&sr, 1));
        let rr = poly_ring(5, &[]);
        let r = QuotientRing::polynomial(&rr);
        let s1 = QuotientRing::new(&sr, vec![u.mul(&u), u.mul(&v), v.mul(&v)]).unwrap();
        assert!(!is_ci_fiber(&make_local_map(&r, &s1, vec![]).unwrap()));
        let s2 = QuotientRing::new(&sr, vec![u.mul(&u), v.pow(3).unwrap()]).unwrap();
        assert!(is_ci_fiber(&make_local_map(&r, &s2, vec![]).unwrap()));
    }
}
