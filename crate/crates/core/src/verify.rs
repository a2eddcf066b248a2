//! Executable forms of the multiplicity inequalities and identities for flat
//! local maps, each producing a [`CheckReport`] with the raw numbers behind
//! the verdict.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extensions::{CohenFactorization, FlatTag, LocalMap};
use crate::ideal::Ideal;
use crate::multiplicity::{
    find_minimal_reduction, frobenius_length, frobenius_twisted_multiplicity, hilbert_samuel,
    hilbert_samuel_with, hk_sequence, multiplicity, multiplicity_of_sop, t_cap,
};
use crate::poly::Polynomial;
use crate::rational_serde;
use crate::ring::QuotientRing;
use crate::Rational;

/// Absolute tolerance on normalized Hilbert–Kunz estimates.
pub fn estimate_tolerance() -> Rational {
    Rational::new(1, 20)
}

const DEFECT_NOTE: &str =
    "a failing comparison points to a defect in the computation, not to a counterexample";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    fn holds(self, lhs: Rational, rhs: Rational, tol: Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tol,
            Relation::Ge => lhs + tol >= rhs,
            Relation::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub label: String,
    #[serde(serialize_with = "rational_serde::serialize")]
    pub lhs: Rational,
    pub relation: Relation,
    #[serde(serialize_with = "rational_serde::serialize")]
    pub rhs: Rational,
    #[serde(serialize_with = "rational_serde::serialize")]
    pub tolerance: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub fixture_id: String,
    pub verdict: Verdict,
    /// Headline left and right sides, as `"num/den"` strings.
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    #[serde(serialize_with = "rational_serde::serialize")]
    pub tolerance: Rational,
    pub comparisons: Vec<Comparison>,
    pub tables: BTreeMap<String, Value>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn failed_comparisons(&self) -> impl Iterator<Item = &Comparison> {
        self.comparisons.iter().filter(|c| !c.holds)
    }
}

pub fn rational_json(r: Rational) -> Value {
    Value::String(rational_serde::to_string(&r))
}

fn int(n: impl Into<i128>) -> Rational {
    Rational::from_integer(n.into())
}

fn factorial(n: u32) -> Rational {
    int((1..=n as i128).product::<i128>())
}

fn pow2(n: u32) -> Rational {
    int(1i128 << n)
}

struct Builder {
    report: CheckReport,
    truncated: bool,
}

impl Builder {
    fn new(check_id: &str, fixture_id: &str, tolerance: Rational) -> Self {
        Builder {
            report: CheckReport {
                check_id: check_id.into(),
                fixture_id: fixture_id.into(),
                verdict: Verdict::Fail,
                lhs: None,
                rhs: None,
                tolerance,
                comparisons: Vec::new(),
                tables: BTreeMap::new(),
                notes: Vec::new(),
            },
            truncated: false,
        }
    }

    fn compare(
        &mut self,
        label: impl Into<String>,
        lhs: Rational,
        relation: Relation,
        rhs: Rational,
        tolerance: Rational,
    ) -> bool {
        let holds = relation.holds(lhs, rhs, tolerance);
        self.report.comparisons.push(Comparison {
            label: label.into(),
            lhs,
            relation,
            rhs,
            tolerance,
            holds,
        });
        holds
    }

    fn exact(&mut self, label: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> bool {
        self.compare(label, lhs, relation, rhs, Rational::zero())
    }

    /// Requires `seq` to be non-increasing.
    fn non_increasing(&mut self, label: &str, seq: &[(u32, Rational)]) {
        for w in seq.windows(2) {
            self.exact(format!("{label}: e={} vs e={}", w[1].0, w[0].0), w[1].1, Relation::Le, w[0].1);
        }
    }

    fn table(&mut self, key: &str, value: Value) {
        self.report.tables.insert(key.into(), value);
    }

    fn note(&mut self, note: impl Into<String>) {
        self.report.notes.push(note.into());
    }

    fn headline(&mut self, lhs: Rational, rhs: Rational) {
        self.report.lhs = Some(rational_serde::to_string(&lhs));
        self.report.rhs = Some(rational_serde::to_string(&rhs));
    }

    fn finish(mut self) -> CheckReport {
        let r = &mut self.report;
        let all_hold = r.comparisons.iter().all(|c| c.holds);
        r.verdict = if r.comparisons.is_empty() {
            if self.truncated {
                Verdict::Inconclusive
            } else {
                r.notes.push("no comparison was made".into());
                Verdict::Fail
            }
        } else if all_hold {
            Verdict::Pass
        } else if self.truncated {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
        if r.verdict == Verdict::Fail {
            r.notes.push(DEFECT_NOTE.into());
        }
        self.report
    }
}

/// Turns the errors a check may legitimately end in into verdicts: an
/// infinite length fails the check, and a resource cap makes a limit check
/// inconclusive.
fn settle(
    check_id: &str,
    fixture_id: &str,
    limit_check: bool,
    result: Result<CheckReport>,
) -> Result<CheckReport> {
    match result {
        Ok(r) => Ok(r),
        Err(Error::InfiniteLength(msg)) => {
            let mut b = Builder::new(check_id, fixture_id, Rational::zero());
            b.note(format!("an input has infinite length: {msg}"));
            let mut r = b.finish();
            r.verdict = Verdict::Fail;
            Ok(r)
        }
        Err(Error::Resource(msg)) if limit_check => {
            let mut b = Builder::new(check_id, fixture_id, estimate_tolerance());
            b.truncated = true;
            b.note(format!("resource cap reached: {msg}"));
            Ok(b.finish())
        }
        Err(e) => Err(e),
    }
}

fn require_flat(map: &LocalMap) -> Result<()> {
    if map.flat_tag == FlatTag::Unknown {
        return Err(Error::Argument(
            "the map is not known to be flat; the check needs a flat map".into(),
        ));
    }
    Ok(())
}

fn dim_u32(q: &QuotientRing) -> Result<u32> {
    u32::try_from(q.dim()?).map_err(|_| Error::Argument("the ring is zero".into()))
}

fn length_table(t: &BTreeMap<u32, u64>) -> Value {
    json!(t.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>())
}

fn rational_table(t: &BTreeMap<u32, Rational>) -> Value {
    json!(t.iter().map(|(k, v)| (k.to_string(), rational_serde::to_string(v))).collect::<BTreeMap<_, _>>())
}

/// `e(R) ≤ e(S)` and `e(R) ≤ max(1, d!/2^d)·e(S)`.
pub fn check_lech(fixture_id: &str, map: &LocalMap) -> Result<CheckReport> {
    settle("lech", fixture_id, false, lech(fixture_id, map))
}

fn lech(fixture_id: &str, map: &LocalMap) -> Result<CheckReport> {
    require_flat(map)?;
    let mut b = Builder::new("lech", fixture_id, Rational::zero());
    let er = multiplicity(&map.source)?;
    let es = multiplicity(&map.target)?;
    let d = dim_u32(&map.source)?;
    let constant = std::cmp::max(int(1), factorial(d) / pow2(d));
    let (er_q, es_q) = (int(er.e), int(es.e));
    b.exact("e(R) <= e(S)", er_q, Relation::Le, es_q);
    b.exact("e(R) <= max(1, d!/2^d) e(S)", er_q, Relation::Le, constant * es_q);
    b.headline(er_q, es_q);
    b.table("hilbert_samuel_R", length_table(&er.length_table));
    b.table("hilbert_samuel_S", length_table(&es.length_table));
    b.table("d", json!(d));
    b.table("constant", rational_json(constant));
    b.note(format!("flatness: {}", map.flat_tag));
    Ok(b.finish())
}

/// `edim R - dim R ≤ edim S - dim S`.
pub fn check_edim(fixture_id: &str, map: &LocalMap) -> Result<CheckReport> {
    settle("edim", fixture_id, false, edim(fixture_id, map))
}

fn edim(fixture_id: &str, map: &LocalMap) -> Result<CheckReport> {
    let mut b = Builder::new("edim", fixture_id, Rational::zero());
    let (er, dr) = (map.source.edim()? as i64, map.source.dim()?);
    let (es, ds) = (map.target.edim()? as i64, map.target.dim()?);
    let (lhs, rhs) = (int(er - dr), int(es - ds));
    b.exact("edim R - dim R <= edim S - dim S", lhs, Relation::Le, rhs);
    b.headline(lhs, rhs);
    b.table("edim_R", json!(er));
    b.table("dim_R", json!(dr));
    b.table("edim_S", json!(es));
    b.table("dim_S", json!(ds));
    let c = es - er;
    if c <= 1 {
        b.table("fiber_nu", json!(map.fiber.nu));
        b.table("fiber_ambient_vars", json!(map.target.nvars()));
        b.exact(
            "edim S - edim R <= 1 implies a complete-intersection closed fibre",
            int(map.fiber.nu as i64),
            Relation::Eq,
            int(map.target.nvars() as i64),
        );
    }
    Ok(b.finish())
}

/// Finite-level form of `e(R) ≤ d!·e_HK(R) ≤ d!·e_HK(S) ≤ d!·e(S)`.
pub fn check_hk_chain(fixture_id: &str, map: &LocalMap, e_max: u32) -> Result<CheckReport> {
    settle("hk_chain", fixture_id, true, hk_chain(fixture_id, map, e_max))
}

fn hk_chain(fixture_id: &str, map: &LocalMap, e_max: u32) -> Result<CheckReport> {
    require_flat(map)?;
    let d = dim_u32(&map.source)?;
    let df = factorial(d);
    let tol = estimate_tolerance() * df;
    let mut b = Builder::new("hk_chain", fixture_id, tol);
    let er = multiplicity(&map.source)?.e;
    let es = multiplicity(&map.target)?.e;
    let hr = hk_sequence(&map.source, &map.source.maximal_ideal(), e_max)?;
    let hs = hk_sequence(&map.target, &map.target.maximal_ideal(), e_max)?;
    b.truncated = hr.truncated || hs.truncated;
    b.table("hk_R", rational_table(&hr.estimates));
    b.table("hk_S", rational_table(&hs.estimates));
    b.table("e_R", json!(er));
    b.table("e_S", json!(es));
    let common = hr.estimates.keys().filter(|e| hs.estimates.contains_key(e)).max().copied();
    let Some(e) = common else {
        b.truncated = true;
        b.note("no Frobenius level was computable within the caps");
        return Ok(b.finish());
    };
    let (est_r, est_s) = (hr.estimates[&e], hs.estimates[&e]);
    b.table("level", json!(e));
    b.compare("est_HK(R) <= est_HK(S)", est_r, Relation::Le, est_s, estimate_tolerance());
    b.compare("e(R) <= d! est_HK(R)", int(er), Relation::Le, df * est_r, tol);
    b.compare("d! est_HK(S) <= d! e(S)", df * est_s, Relation::Le, df * int(es), tol);
    b.headline(est_r, est_s);
    if b.truncated {
        b.note(format!("sequences truncated by resource caps; compared at e = {e}"));
    }
    Ok(b.finish())
}

/// `e(I)/d! ≤ est_HK(I) ≤ e(I)`, exactly constant when `I` is generated by a
/// regular sequence of length `d`.
pub fn check_hk_sandwich(fixture_id: &str, q: &QuotientRing, i: &Ideal, e_max: u32) -> Result<CheckReport> {
    settle("hk_sandwich", fixture_id, true, hk_sandwich(fixture_id, q, i, e_max))
}

fn hk_sandwich(fixture_id: &str, q: &QuotientRing, i: &Ideal, e_max: u32) -> Result<CheckReport> {
    let d = dim_u32(q)?;
    let hs = hilbert_samuel(q, i)?;
    let e = int(hs.e);
    let seq = hk_sequence(q, i, e_max)?;
    let h0 = if i.gens().len() == d as usize { Some(q.length(i)?) } else { None };
    let exact = h0 == Some(hs.e);
    let tol = if exact { Rational::zero() } else { estimate_tolerance() };
    let mut b = Builder::new("hk_sandwich", fixture_id, tol);
    b.truncated = seq.truncated;
    b.table("hilbert_samuel", length_table(&hs.length_table));
    b.table("hk_lengths", length_table(&seq.lengths));
    b.table("hk_estimates", rational_table(&seq.estimates));
    if let Some(h0) = h0 {
        b.table("parameter_colength", json!(h0));
        if !exact {
            b.note("parameter ideal with positive chi_1: estimates are not exact at finite level");
        }
    }
    let Some((level, est)) = seq.last() else {
        b.truncated = true;
        b.note("no Frobenius level was computable within the caps");
        return Ok(b.finish());
    };
    b.compare("e(I)/d! <= est_HK(I)", e / factorial(d), Relation::Le, est, tol);
    b.compare("est_HK(I) <= e(I)", est, Relation::Le, e, tol);
    if exact {
        for (lvl, v) in &seq.estimates {
            b.exact(format!("est_HK(I) at e={lvl} equals e(I)"), *v, Relation::Eq, e);
        }
    }
    b.table("level", json!(level));
    b.headline(est, e);
    Ok(b.finish())
}

/// Adjoins one variable to the presentation.
pub fn adjoin_variable(q: &QuotientRing) -> Result<QuotientRing> {
    let ring = q.ring();
    let mut vars = ring.vars().to_vec();
    vars.push(ring.fresh_name("z"));
    let bigger = ring.with_vars(vars)?;
    let idx: Vec<usize> = (0..ring.nvars()).collect();
    QuotientRing::new(&bigger, q.defining().remap(&bigger, &idx).gens().to_vec())
}

/// The per-level identity
/// `l(T/((n_T)²)^[q]) = q·l(R/(m²)^[q]) + q·l(R/m^[q])` for `T = R[z]`,
/// iterated `n_extra` times, together with its normalized consequences.
pub fn check_lemma38(fixture_id: &str, r: &QuotientRing, n_extra: u32, e_max: u32) -> Result<CheckReport> {
    settle("lemma38", fixture_id, false, lemma38(fixture_id, r, n_extra, e_max))
}

fn lemma38(fixture_id: &str, r: &QuotientRing, n_extra: u32, e_max: u32) -> Result<CheckReport> {
    let mut b = Builder::new("lemma38", fixture_id, Rational::zero());
    let p = r.field().characteristic();
    let mut base = r.clone();
    let mut rows = Vec::new();
    let sq_len = |q: &QuotientRing, e: u32| -> Result<u64> {
        frobenius_length(q, &q.maximal_ideal().power(2)?, e)
    };
    if n_extra == 0 {
        for e in 1..=e_max {
            let l = sq_len(&base, e)?;
            b.exact(format!("no adjoined variable, e={e}"), int(l), Relation::Eq, int(l));
        }
        b.note("no adjoined variables: the identity is trivial");
    }
    let mut last = (Rational::zero(), Rational::zero());
    for step in 1..=n_extra {
        let t = adjoin_variable(&base)?;
        let d = dim_u32(&base)?;
        for e in 1..=e_max {
            let q = p.pow(e) as i128;
            let lhs = sq_len(&t, e)?;
            let r_sq = sq_len(&base, e)?;
            let r_m = frobenius_length(&base, &base.maximal_ideal(), e)?;
            let t_m = frobenius_length(&t, &t.maximal_ideal(), e)?;
            let rhs = q * r_sq as i128 + q * r_m as i128;
            b.exact(format!("step {step}, e={e}: l(T/(n^2)^[q]) = q l(R/(m^2)^[q]) + q l(R/m^[q])"), int(lhs), Relation::Eq, int(rhs));
            let qd = q.pow(d);
            let est = |len: u64, denom: i128| Rational::new(len as i128, denom);
            b.exact(
                format!("step {step}, e={e}: est_HK(T) = est_HK(R)"),
                est(t_m, qd * q),
                Relation::Eq,
                est(r_m, qd),
            );
            b.exact(
                format!("step {step}, e={e}: est_HK(n^2, T) = est_HK(m^2, R) + est_HK(R)"),
                est(lhs, qd * q),
                Relation::Eq,
                est(r_sq, qd) + est(r_m, qd),
            );
            rows.push(json!({
                "step": step, "e": e, "q": q as u64,
                "l_T_n2": lhs, "l_R_m2": r_sq, "l_R_m": r_m, "l_T_n": t_m,
            }));
            last = (int(lhs), int(rhs));
        }
        base = t;
    }
    b.table("levels", Value::Array(rows));
    if n_extra > 0 {
        b.headline(last.0, last.1);
    }
    Ok(b.finish())
}

/// `e(x, N) ≥ ν(nN) + (1-d)ν(N) - χ₁(x, N)` for `N = S/a` and a system of
/// parameters `x` of `S`.
pub fn check_estimate_44(fixture_id: &str, s: &QuotientRing, x: &[Polynomial], a: &Ideal) -> Result<CheckReport> {
    settle("estimate44", fixture_id, false, estimate_44(fixture_id, s, x, a))
}

fn estimate_44(fixture_id: &str, s: &QuotientRing, x: &[Polynomial], a: &Ideal) -> Result<CheckReport> {
    let mut b = Builder::new("estimate44", fixture_id, Rational::zero());
    let d = dim_u32(s)?;
    if x.len() != d as usize {
        return Err(Error::Argument(format!(
            "{} elements given as a system of parameters of a ring of dimension {d}",
            x.len()
        )));
    }
    if !s.local_length(&s.ideal(x.to_vec())?)?.local_length.is_finite() {
        return Err(Error::Argument("the given elements are not a system of parameters".into()));
    }
    let n = s.quotient(a.gens())?;
    let m = s.maximal_ideal();
    let l_n1 = n.length(&m)?;
    if l_n1 == 0 {
        return Err(Error::Argument("the module is zero".into()));
    }
    let nu_n = 1i64;
    let l_n2 = n.length(&m.power(2)?)?;
    let nu_mn = (l_n2 - l_n1) as i64;
    let xi = n.ideal(x.to_vec())?;
    let h0 = n.length(&xi)? as i64;
    let e = hilbert_samuel_with(&n, &xi, d, t_cap())?;
    let ex = e.e as i64;
    let chi1 = h0 - ex;
    let rhs = nu_mn + (1 - d as i64) * nu_n - chi1;
    b.exact("e(x,N) >= nu(nN) + (1-d) nu(N) - chi_1(x,N)", int(ex), Relation::Ge, int(rhs));
    b.exact("chi_1(x,N) >= 0", int(chi1), Relation::Ge, int(0));
    b.headline(int(ex), int(rhs));
    b.table("d", json!(d));
    b.table("nu_N", json!(nu_n));
    b.table("nu_nN", json!(nu_mn));
    b.table("l_N_xN", json!(h0));
    b.table("e_x_N", json!(ex));
    b.table("chi1", json!(chi1));
    b.table("hilbert_samuel", length_table(&e.length_table));
    Ok(b.finish())
}

/// `ν_S(nM') ≥ ν_R(mM) + (edim S - edim R)·ν_R(M)` for `M = R/a`, `M' = S/aS`.
pub fn check_hanes_45(fixture_id: &str, map: &LocalMap, a: &Ideal) -> Result<CheckReport> {
    settle("hanes45", fixture_id, false, hanes_45(fixture_id, map, a))
}

fn hanes_45(fixture_id: &str, map: &LocalMap, a: &Ideal) -> Result<CheckReport> {
    let mut b = Builder::new("hanes45", fixture_id, Rational::zero());
    let (r, s) = (&map.source, &map.target);
    let m = r.quotient(a.gens())?;
    let l1 = m.length(&r.maximal_ideal())?;
    if l1 == 0 {
        return Err(Error::Argument("the module is zero".into()));
    }
    let nu_m = 1i64;
    let nu_mm = (m.length(&r.maximal_ideal().power(2)?)? - l1) as i64;
    let a_s: Vec<Polynomial> =
        a.gens().iter().map(|g| g.substitute(&map.images)).collect::<Result<_>>()?;
    let mp = s.quotient(&a_s)?;
    let n = s.maximal_ideal();
    let nu_nmp = (mp.length(&n.power(2)?)? - mp.length(&n)?) as i64;
    let c = map.edim_difference()?;
    let rhs = nu_mm + c * nu_m;
    b.exact("nu_S(nM') >= nu_R(mM) + c nu_R(M)", int(nu_nmp), Relation::Ge, int(rhs));
    b.headline(int(nu_nmp), int(rhs));
    b.table("nu_R_M", json!(nu_m));
    b.table("nu_R_mM", json!(nu_mm));
    b.table("nu_S_nM'", json!(nu_nmp));
    b.table("c", json!(c));
    Ok(b.finish())
}

/// Interchange data: the factorization over the field where the parameters
/// live, and the parameters lifted to `T`.
#[derive(Clone, Debug)]
pub struct InterchangeInput {
    pub fact: CohenFactorization,
    pub x: Vec<Polynomial>,
    pub field_degree: u32,
    pub notes: Vec<String>,
}

/// Lifts a system of parameters of `S` (polynomials in the target's ambient
/// ring) to `T`.
pub fn interchange_input_from_sop(fact: &CohenFactorization, sop: &[Polynomial]) -> Result<InterchangeInput> {
    let x = sop.iter().map(|f| fact.lift_poly(f)).collect::<Result<Vec<_>>>()?;
    let mut notes = Vec::new();
    check_part_of_sop(fact, &x, &mut notes)?;
    Ok(InterchangeInput { fact: fact.clone(), x, field_degree: 1, notes })
}

/// Chooses a minimal reduction of the maximal ideal of `S`, extending
/// scalars when needed, and lifts it to `T`.
pub fn interchange_input(fact: &CohenFactorization, seed: u64) -> Result<InterchangeInput> {
    let s = fact.s_as_quotient()?;
    let red = find_minimal_reduction(&s, seed, 32)?;
    let fact = fact.scalar_extend(red.field_degree)?;
    let x: Vec<Polynomial> =
        red.forms.iter().map(|f| f.reinterpret(fact.t_ring.ring())).collect::<Result<_>>()?;
    let mut notes = vec![format!(
        "minimal reduction {} found after {} tries over a degree-{} extension",
        x.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", "),
        red.tries,
        red.field_degree
    )];
    check_part_of_sop(&fact, &x, &mut notes)?;
    Ok(InterchangeInput { fact, x, field_degree: red.field_degree, notes })
}

fn check_part_of_sop(fact: &CohenFactorization, x: &[Polynomial], notes: &mut Vec<String>) -> Result<()> {
    let t = &fact.t_ring;
    let cut = t.quotient(x)?;
    if cut.dim()? != t.dim()? - x.len() as i64 {
        return Err(Error::Argument("the parameters are not part of a system of parameters of T".into()));
    }
    notes.push("Cohen-Macaulayness of T at the minimal primes of (x) is assumed, not certified".into());
    Ok(())
}

struct InterchangeData {
    a: u64,
    dim_t: u32,
    exact_case: bool,
    b: BTreeMap<u32, Rational>,
    c1: BTreeMap<u32, Rational>,
    c2: BTreeMap<u32, Rational>,
    truncated: bool,
    notes: Vec<String>,
}

fn interchange_data(input: &InterchangeInput, e_max: u32) -> Result<InterchangeData> {
    let fact = &input.fact;
    let t = &fact.t_ring;
    let s = fact.s_as_quotient()?;
    let d = input.x.len() as u32;
    let a = multiplicity_of_sop(&s, &input.x)?.e;
    let dim_t = dim_u32(t)?;
    let jx = fact.j.extend(&input.x)?;
    let exact_case = t.is_polynomial_ring()? && t.min_gens(&jx)? == dim_t as u64;
    let p = t.field().characteristic() as i128;
    let mut data = InterchangeData {
        a,
        dim_t,
        exact_case,
        b: BTreeMap::new(),
        c1: BTreeMap::new(),
        c2: BTreeMap::new(),
        truncated: false,
        notes: input.notes.clone(),
    };
    for e in 1..=e_max {
        let q = p.pow(e);
        let step = (|| -> Result<(Rational, Rational, Rational)> {
            let (be, _) = frobenius_twisted_multiplicity(t, &fact.j, &input.x, e)?;
            let l1 = frobenius_length(t, &jx, e)?;
            let jq = fact.j.frobenius_power(q as u32)?;
            let l2 = t.length(&jq.extend(&input.x)?)?;
            Ok((
                be,
                Rational::new(l1 as i128, q.pow(dim_t)),
                Rational::new(l2 as i128, q.pow(dim_t - d)),
            ))
        })();
        match step {
            Ok((be, c1, c2)) => {
                data.b.insert(e, be);
                data.c1.insert(e, c1);
                data.c2.insert(e, c2);
            }
            Err(err) if err.is_resource() => {
                data.truncated = true;
                data.notes.push(format!("stopped before e = {e}: {err}"));
                break;
            }
            Err(err) => return Err(err),
        }
    }
    Ok(data)
}

fn gaps(seq: &BTreeMap<u32, Rational>, a: Rational) -> Vec<(u32, Rational)> {
    seq.iter().map(|(e, v)| (*e, (*v - a).abs())).collect()
}

/// `e(x, S) = lim e(x, T^(e)⊗S)/p^{e·dim T} = e_HK(J + (x), T) = e_HK(J, T/(x)T)`
/// as monotone convergence of the finite-level gaps, and exactly when `T`
/// is regular and `J + (x)` is a parameter ideal.
pub fn check_interchange(fixture_id: &str, input: &InterchangeInput, e_max: u32) -> Result<CheckReport> {
    settle("interchange", fixture_id, true, interchange(fixture_id, input, e_max))
}

fn interchange(fixture_id: &str, input: &InterchangeInput, e_max: u32) -> Result<CheckReport> {
    let data = interchange_data(input, e_max)?;
    let tol = if data.exact_case { Rational::zero() } else { estimate_tolerance() };
    let mut b = Builder::new("interchange", fixture_id, tol);
    b.truncated = data.truncated;
    for n in &data.notes {
        b.note(n.clone());
    }
    let a = int(data.a);
    b.table("A", json!(data.a));
    b.table("B", rational_table(&data.b));
    b.table("C_sum", rational_table(&data.c1));
    b.table("C_fibre", rational_table(&data.c2));
    b.table("dim_T", json!(data.dim_t));
    b.table("exact_case", json!(data.exact_case));
    b.table("c", json!(input.fact.c));
    for (name, seq) in [("B", &data.b), ("C_sum", &data.c1), ("C_fibre", &data.c2)] {
        let g = gaps(seq, a);
        if data.exact_case {
            for (e, v) in seq {
                b.exact(format!("{name} at e={e} equals e(x,S)"), *v, Relation::Eq, a);
            }
        } else {
            b.non_increasing(&format!("|{name} - e(x,S)|"), &g);
            if let Some((e, gap)) = g.last() {
                b.compare(format!("final gap of {name} at e={e}"), *gap, Relation::Le, Rational::zero(), tol);
            }
        }
    }
    if let Some(last) = data.b.values().last() {
        b.headline(*last, a);
    } else {
        b.truncated = true;
    }
    Ok(b.finish())
}

/// Normalized `χ₁^(e) = (l(T/(J+(x))^[q]) - e(x, T^(e)⊗S)) / q^{dim T}` is
/// non-negative and non-increasing, and zero in the regular anchors.
pub fn check_chi1_vanishing(fixture_id: &str, input: &InterchangeInput, e_max: u32) -> Result<CheckReport> {
    settle("chi1_vanishing", fixture_id, true, chi1_vanishing(fixture_id, input, e_max))
}

fn chi1_vanishing(fixture_id: &str, input: &InterchangeInput, e_max: u32) -> Result<CheckReport> {
    let data = interchange_data(input, e_max)?;
    let mut b = Builder::new("chi1_vanishing", fixture_id, Rational::zero());
    b.truncated = data.truncated;
    for n in &data.notes {
        b.note(n.clone());
    }
    let chi: BTreeMap<u32, Rational> =
        data.c1.iter().map(|(e, c)| (*e, *c - data.b[e])).collect();
    b.table("chi1_normalized", rational_table(&chi));
    b.table("exact_case", json!(data.exact_case));
    for (e, v) in &chi {
        b.exact(format!("chi_1 at e={e} is non-negative"), *v, Relation::Ge, Rational::zero());
        if data.exact_case {
            b.exact(format!("chi_1 at e={e} vanishes"), *v, Relation::Eq, Rational::zero());
        }
    }
    let seq: Vec<(u32, Rational)> = chi.iter().map(|(e, v)| (*e, *v)).collect();
    b.non_increasing("chi_1", &seq);
    if let Some((_, v)) = seq.last() {
        b.headline(*v, Rational::zero());
    }
    Ok(b.finish())
}

/// `e(R) ≤ (c!/2^c)·e(S)`, and `e(R) ≤ d!/(2^d + c - d)·e(S)` when `c ≥ d`.
pub fn check_embdim_bounds(fixture_id: &str, map: &LocalMap, fact: &CohenFactorization) -> Result<CheckReport> {
    settle("embdim_bounds", fixture_id, false, embdim_bounds(fixture_id, map, fact))
}

fn embdim_bounds(fixture_id: &str, map: &LocalMap, fact: &CohenFactorization) -> Result<CheckReport> {
    require_flat(map)?;
    let mut b = Builder::new("embdim_bounds", fixture_id, Rational::zero());
    let er = int(multiplicity(&map.source)?.e);
    let es = int(multiplicity(&map.target)?.e);
    let d = dim_u32(&map.source)?;
    let c = u32::try_from(fact.c).map_err(|_| Error::Validation("negative c".into()))?;
    let k1 = factorial(c) / pow2(c);
    b.exact("e(R) <= (c!/2^c) e(S)", er, Relation::Le, k1 * es);
    b.table("c", json!(c));
    b.table("d", json!(d));
    b.table("e_R", rational_json(er));
    b.table("e_S", rational_json(es));
    b.table("c_factor", rational_json(k1));
    if c >= d {
        let k2 = factorial(d) / int(((1i128 << d) + c as i128 - d as i128) as i64);
        b.exact("e(R) <= d!/(2^d + c - d) e(S)", er, Relation::Le, k2 * es);
        b.table("d_factor", rational_json(k2));
    }
    b.headline(er, k1 * es);
    Ok(b.finish())
}
