//! Turning a parsed fixture document into rings, ideals, maps and checks.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use lechkit::extensions::{
    cohen_factor, make_local_map, CohenFactorization, IntPoly, IntegerPresentation, LocalMap,
};
use lechkit::{FieldSpec, Ideal, MonomialOrder, PolyRing, Polynomial, QuotientRing};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::dsl::{parse_bytes, CheckOption, Diagnostic, Document, Expr, Item};

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("parse error at {0}")]
    Parse(#[from] Diagnostic),
    #[error("{0}")]
    Semantic(String),
    #[error(transparent)]
    Math(#[from] lechkit::Error),
}

pub type FResult<T> = Result<T, FixtureError>;

fn semantic<T>(msg: impl Into<String>) -> FResult<T> {
    Err(FixtureError::Semantic(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Lech,
    Edim,
    HkChain,
    HkSandwich,
    Lemma38,
    Estimate44,
    Hanes45,
    Interchange,
    Chi1Vanishing,
    EmbdimBounds,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::Lech,
        CheckKind::Edim,
        CheckKind::HkChain,
        CheckKind::HkSandwich,
        CheckKind::Lemma38,
        CheckKind::Estimate44,
        CheckKind::Hanes45,
        CheckKind::Interchange,
        CheckKind::Chi1Vanishing,
        CheckKind::EmbdimBounds,
    ];

    pub fn id(self) -> &'static str {
        match self {
            CheckKind::Lech => "lech",
            CheckKind::Edim => "edim",
            CheckKind::HkChain => "hk_chain",
            CheckKind::HkSandwich => "hk_sandwich",
            CheckKind::Lemma38 => "lemma38",
            CheckKind::Estimate44 => "estimate44",
            CheckKind::Hanes45 => "hanes45",
            CheckKind::Interchange => "interchange",
            CheckKind::Chi1Vanishing => "chi1_vanishing",
            CheckKind::EmbdimBounds => "embdim_bounds",
        }
    }

    pub fn from_id(s: &str) -> Option<CheckKind> {
        CheckKind::ALL.into_iter().find(|k| k.id() == s)
    }

    /// Whether the check's target is a map (otherwise a ring).
    pub fn targets_map(self) -> bool {
        !matches!(self, CheckKind::HkSandwich | CheckKind::Lemma38 | CheckKind::Estimate44)
    }
}

#[derive(Clone, Debug)]
pub struct CheckSpec {
    pub kind: CheckKind,
    pub target: String,
    pub sop: Option<Vec<Expr>>,
    pub emax: Option<u32>,
    pub ideal: Option<String>,
    pub module: Option<String>,
    pub adjoin: Option<u32>,
}

impl CheckSpec {
    pub fn label(&self) -> String {
        format!("{} {}", self.kind.id(), self.target)
    }
}

struct RingDecl {
    field: String,
    vars: Vec<String>,
    relations: Vec<Expr>,
    ring: QuotientRing,
}

struct MapDecl {
    source: String,
    target: String,
    sends: Vec<(String, Expr)>,
    built: OnceLock<Result<LocalMap, String>>,
    cohen: OnceLock<Result<CohenFactorization, String>>,
}

pub struct BuildOptions {
    pub degree_cap: Option<u32>,
}

/// A fixture file with its declarations built over their fields. Maps and
/// their factorizations are built on first use and cached.
pub struct Workspace {
    pub name: String,
    pub document: Document,
    fields: BTreeMap<String, FieldSpec>,
    rings: BTreeMap<String, RingDecl>,
    ideals: BTreeMap<String, (String, Ideal)>,
    maps: BTreeMap<String, MapDecl>,
    pub checks: Vec<CheckSpec>,
}

/// Evaluates an expression in a polynomial ring.
pub fn eval_poly(e: &Expr, ring: &Arc<PolyRing>) -> FResult<Polynomial> {
    Ok(match e {
        Expr::Int(n) => {
            let p = BigInt::from(ring.field().characteristic());
            let r = u32::try_from(n.mod_floor(&p)).expect("residue fits");
            Polynomial::constant(ring, ring.field().from_i64(r as i64))
        }
        Expr::Var(v) => match ring.var_index(v) {
            Some(i) => Polynomial::var(ring, i),
            None => return semantic(format!("unknown variable `{v}`")),
        },
        Expr::Add(a, b) => eval_poly(a, ring)?.add(&eval_poly(b, ring)?),
        Expr::Sub(a, b) => eval_poly(a, ring)?.sub(&eval_poly(b, ring)?),
        Expr::Mul(a, b) => {
            let (x, y) = (eval_poly(a, ring)?, eval_poly(b, ring)?);
            let deg = x.total_degree().unwrap_or(0) + y.total_degree().unwrap_or(0);
            ring.check_degree(deg)?;
            x.mul(&y)
        }
        Expr::Neg(a) => eval_poly(a, ring)?.neg(),
        Expr::Pow(a, n) => eval_poly(a, ring)?.pow(*n)?,
    })
}

type IntTerms = BTreeMap<Vec<u16>, BigInt>;

const INT_DEGREE_CAP: u32 = 256;

fn int_mul(a: &IntTerms, b: &IntTerms) -> FResult<IntTerms> {
    let mut out = IntTerms::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u16> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if e.iter().map(|&x| x as u32).sum::<u32>() > INT_DEGREE_CAP {
                return semantic(format!("integer polynomial degree exceeds {INT_DEGREE_CAP}"));
            }
            let c = out.entry(e).or_insert_with(BigInt::zero);
            *c += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn int_add(mut a: IntTerms, b: &IntTerms, sign: i32) -> IntTerms {
    for (e, c) in b {
        let entry = a.entry(e.clone()).or_insert_with(BigInt::zero);
        if sign > 0 {
            *entry += c;
        } else {
            *entry -= c;
        }
    }
    a.retain(|_, c| !c.is_zero());
    a
}

/// Evaluates an expression as a polynomial with integer coefficients.
pub fn eval_int(e: &Expr, vars: &[String]) -> FResult<IntPoly> {
    fn go(e: &Expr, vars: &[String]) -> FResult<IntTerms> {
        let n = vars.len();
        Ok(match e {
            Expr::Int(c) => {
                let mut t = IntTerms::new();
                if !c.is_zero() {
                    t.insert(vec![0; n], c.clone());
                }
                t
            }
            Expr::Var(v) => match vars.iter().position(|x| x == v) {
                Some(i) => {
                    let mut exps = vec![0; n];
                    exps[i] = 1;
                    IntTerms::from([(exps, BigInt::one())])
                }
                None => return semantic(format!("unknown variable `{v}`")),
            },
            Expr::Add(a, b) => int_add(go(a, vars)?, &go(b, vars)?, 1),
            Expr::Sub(a, b) => int_add(go(a, vars)?, &go(b, vars)?, -1),
            Expr::Mul(a, b) => int_mul(&go(a, vars)?, &go(b, vars)?)?,
            Expr::Neg(a) => int_add(IntTerms::new(), &go(a, vars)?, -1),
            Expr::Pow(a, k) => {
                let base = go(a, vars)?;
                let mut acc = IntTerms::from([(vec![0; n], BigInt::one())]);
                for _ in 0..*k {
                    acc = int_mul(&acc, &base)?;
                }
                acc
            }
        })
    }
    Ok(IntPoly { terms: go(e, vars)?.into_iter().collect() })
}

impl Workspace {
    pub fn from_bytes(name: &str, bytes: &[u8], opts: &BuildOptions) -> FResult<Workspace> {
        let document = parse_bytes(bytes)?;
        Workspace::build(name, document, opts)
    }

    pub fn from_text(name: &str, text: &str, opts: &BuildOptions) -> FResult<Workspace> {
        Workspace::from_bytes(name, text.as_bytes(), opts)
    }

    pub fn build(name: &str, document: Document, opts: &BuildOptions) -> FResult<Workspace> {
        let mut ws = Workspace {
            name: name.to_string(),
            document: document.clone(),
            fields: BTreeMap::new(),
            rings: BTreeMap::new(),
            ideals: BTreeMap::new(),
            maps: BTreeMap::new(),
            checks: Vec::new(),
        };
        let mut names = BTreeSet::new();
        for item in &document.items {
            let declared = match item {
                Item::Field { name, .. }
                | Item::Ring { name, .. }
                | Item::Ideal { name, .. }
                | Item::Map { name, .. } => Some(name),
                Item::Check { .. } => None,
            };
            if let Some(n) = declared {
                if !names.insert(n.clone()) {
                    return semantic(format!("`{n}` is declared twice"));
                }
            }
            match item {
                Item::Field { name, p, k } => {
                    let f = FieldSpec::new(*p, k.unwrap_or(1))?;
                    ws.fields.insert(name.clone(), f);
                }
                Item::Ring { name, field, vars, relations } => {
                    let Some(f) = ws.fields.get(field) else {
                        return semantic(format!("ring `{name}`: unknown field `{field}`"));
                    };
                    let mut seen = BTreeSet::new();
                    for v in vars {
                        if !seen.insert(v) {
                            return semantic(format!("ring `{name}`: variable `{v}` repeated"));
                        }
                    }
                    let mut poly_ring = PolyRing::new(f.clone(), vars.clone(), MonomialOrder::Grevlex)?;
                    if let Some(cap) = opts.degree_cap {
                        poly_ring = poly_ring.with_degree_cap(cap);
                    }
                    let rels = relations
                        .iter()
                        .map(|e| eval_poly(e, &poly_ring))
                        .collect::<FResult<Vec<_>>>()?;
                    let ring = QuotientRing::new(&poly_ring, rels)
                        .map_err(|e| FixtureError::Semantic(format!("ring `{name}`: {e}")))?;
                    ws.rings.insert(
                        name.clone(),
                        RingDecl { field: field.clone(), vars: vars.clone(), relations: relations.clone(), ring },
                    );
                }
                Item::Ideal { name, gens, ring } => {
                    let q = ws.ring(ring)?;
                    let polys = gens
                        .iter()
                        .map(|e| eval_poly(e, q.ring()))
                        .collect::<FResult<Vec<_>>>()?;
                    ws.ideals.insert(name.clone(), (ring.clone(), q.ideal(polys)?));
                }
                Item::Map { name, source, target, sends } => {
                    let src = ws.ring(source)?;
                    ws.ring(target)?;
                    let vars = src.ring().vars();
                    for v in vars {
                        let count = sends.iter().filter(|(w, _)| w == v).count();
                        if count != 1 {
                            return semantic(format!(
                                "map `{name}`: source variable `{v}` must be sent exactly once, found {count}"
                            ));
                        }
                    }
                    if let Some((w, _)) = sends.iter().find(|(w, _)| !vars.contains(w)) {
                        return semantic(format!("map `{name}`: `{w}` is not a variable of `{source}`"));
                    }
                    ws.maps.insert(
                        name.clone(),
                        MapDecl {
                            source: source.clone(),
                            target: target.clone(),
                            sends: sends.clone(),
                            built: OnceLock::new(),
                            cohen: OnceLock::new(),
                        },
                    );
                }
                Item::Check { kind, target, options } => {
                    let spec = ws.check_spec(kind, target, options)?;
                    ws.checks.push(spec);
                }
            }
        }
        Ok(ws)
    }

    fn check_spec(&self, kind: &str, target: &str, options: &[CheckOption]) -> FResult<CheckSpec> {
        let Some(k) = CheckKind::from_id(kind) else {
            let known: Vec<&str> = CheckKind::ALL.iter().map(|k| k.id()).collect();
            return semantic(format!("unknown check `{kind}`; known checks: {}", known.join(", ")));
        };
        if k.targets_map() {
            if !self.maps.contains_key(target) {
                return semantic(format!("check {kind}: unknown map `{target}`"));
            }
        } else if !self.rings.contains_key(target) {
            return semantic(format!("check {kind}: unknown ring `{target}`"));
        }
        let mut spec = CheckSpec {
            kind: k,
            target: target.to_string(),
            sop: None,
            emax: None,
            ideal: None,
            module: None,
            adjoin: None,
        };
        for o in options {
            match o {
                CheckOption::Sop(x) => spec.sop = Some(x.clone()),
                CheckOption::Emax(n) => spec.emax = Some(*n),
                CheckOption::Ideal(n) => spec.ideal = Some(n.clone()),
                CheckOption::Module(n) => spec.module = Some(n.clone()),
                CheckOption::Adjoin(n) => spec.adjoin = Some(*n),
            }
        }
        Ok(spec)
    }

    pub fn ring(&self, name: &str) -> FResult<&QuotientRing> {
        match self.rings.get(name) {
            Some(r) => Ok(&r.ring),
            None => semantic(format!("unknown ring `{name}`")),
        }
    }

    pub fn ring_names(&self) -> impl Iterator<Item = &String> {
        self.rings.keys()
    }

    pub fn map_names(&self) -> impl Iterator<Item = &String> {
        self.maps.keys()
    }

    pub fn ideal_names(&self) -> impl Iterator<Item = &String> {
        self.ideals.keys()
    }

    /// The named ideal of `ring`; `m` is the maximal ideal and `0` the zero ideal.
    pub fn ideal_in(&self, ring: &str, name: &str) -> FResult<Ideal> {
        let q = self.ring(ring)?;
        if let Some((r, i)) = self.ideals.get(name) {
            if r != ring {
                return semantic(format!("ideal `{name}` lives in `{r}`, not `{ring}`"));
            }
            return Ok(i.clone());
        }
        match name {
            "m" => Ok(q.maximal_ideal()),
            "0" => Ok(Ideal::zero(q.ring())),
            _ => semantic(format!("unknown ideal `{name}`")),
        }
    }

    /// The named ideal with the ring it belongs to.
    pub fn ideal(&self, name: &str) -> FResult<(String, Ideal)> {
        match self.ideals.get(name) {
            Some((r, i)) => Ok((r.clone(), i.clone())),
            None => semantic(format!("unknown ideal `{name}`")),
        }
    }

    fn map_decl(&self, name: &str) -> FResult<&MapDecl> {
        match self.maps.get(name) {
            Some(m) => Ok(m),
            None => semantic(format!("unknown map `{name}`")),
        }
    }

    /// The validated map, built on first use.
    pub fn map(&self, name: &str) -> FResult<LocalMap> {
        let decl = self.map_decl(name)?;
        let built = decl.built.get_or_init(|| self.build_map(decl).map_err(|e| e.to_string()));
        built.clone().map_err(|e| FixtureError::Semantic(format!("map `{name}`: {e}")))
    }

    fn build_map(&self, decl: &MapDecl) -> FResult<LocalMap> {
        let src = self.ring(&decl.source)?;
        let tgt = self.ring(&decl.target)?;
        let images = src
            .ring()
            .vars()
            .iter()
            .map(|v| {
                let (_, e) = decl.sends.iter().find(|(w, _)| w == v).expect("validated");
                eval_poly(e, tgt.ring())
            })
            .collect::<FResult<Vec<_>>>()?;
        Ok(make_local_map(src, tgt, images)?)
    }

    /// The Cohen factorization of a map, built on first use with `seed`.
    pub fn cohen(&self, name: &str, seed: u64) -> FResult<CohenFactorization> {
        let decl = self.map_decl(name)?;
        let built = decl.cohen.get_or_init(|| {
            let map = self.map(name).map_err(|e| e.to_string())?;
            cohen_factor(&map, seed).map_err(|e| e.to_string())
        });
        built.clone().map_err(|e| FixtureError::Semantic(format!("map `{name}`: {e}")))
    }

    pub fn map_target(&self, name: &str) -> FResult<&str> {
        Ok(&self.map_decl(name)?.target)
    }

    pub fn map_source(&self, name: &str) -> FResult<String> {
        Ok(self.map_decl(name)?.source.clone())
    }

    /// Reads the map's declarations with integer coefficients.
    pub fn integer_presentation(&self, name: &str) -> FResult<IntegerPresentation> {
        let decl = self.map_decl(name)?;
        let src = &self.rings[&decl.source];
        let tgt = &self.rings[&decl.target];
        let ints = |es: &[Expr], vars: &[String]| -> FResult<Vec<IntPoly>> {
            es.iter().map(|e| eval_int(e, vars)).collect()
        };
        let images: Vec<Expr> = src
            .vars
            .iter()
            .map(|v| decl.sends.iter().find(|(w, _)| w == v).expect("validated").1.clone())
            .collect();
        Ok(IntegerPresentation {
            source_vars: src.vars.clone(),
            source_relations: ints(&src.relations, &src.vars)?,
            target_vars: tgt.vars.clone(),
            target_relations: ints(&tgt.relations, &tgt.vars)?,
            images: ints(&images, &tgt.vars)?,
        })
    }

    pub fn ring_field_name(&self, ring: &str) -> FResult<&str> {
        match self.rings.get(ring) {
            Some(r) => Ok(&r.field),
            None => semantic(format!("unknown ring `{ring}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUSP: &str = "field F(5); ring R = F[x]; ring S = F[x,y]/(y^2-x^3);
        map f : R -> S sends x -> x; check lech f;";

    fn opts() -> BuildOptions {
        BuildOptions { degree_cap: None }
    }

    #[test]
    fn builds_cusp() {
        let ws = Workspace::from_text("cusp", CUSP, &opts()).unwrap();
        assert_eq!(ws.checks.len(), 1);
        assert_eq!(ws.map("f").unwrap().fiber.length, 2);
    }

    #[test]
    fn rejects_bad_declarations() {
        let bad = [
            "field F(5); ring R = F[x]/(x^2-1);",
            "field F(4);",
            "field F(5); ring R = G[x];",
            "field F(5); ring R = F[x,x];",
            "field F(5); ring R = F[x]; ring R = F[y];",
            "field F(5); ring R = F[x]; ideal I = (y) in R;",
            "field F(5); ring R = F[x]; map f : R -> R;",
            "field F(5); ring R = F[x]; check frobnicate R;",
        ];
        for text in bad {
            assert!(Workspace::from_text("bad", text, &opts()).is_err(), "{text}");
        }
        let ws = Workspace::from_text(
            "nonlocal",
            "field F(5); ring R = F[x]; map g : R -> R sends x -> x+1;",
            &opts(),
        )
        .unwrap();
        assert!(ws.map("g").is_err());
    }

    #[test]
    fn integer_evaluation() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let e = crate::dsl::parse_expr("(x - 2*y)^2 - x^2").unwrap();
        let p = eval_int(&e, &vars).unwrap();
        let expect: Vec<(Vec<u16>, BigInt)> =
            vec![(vec![0, 2], 4.into()), (vec![1, 1], (-4).into())];
        assert_eq!(p.terms, expect);
    }
}
