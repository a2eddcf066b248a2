use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::groebner::{GroebnerBasis, Length};
use crate::ideal::Ideal;
use crate::poly::{same_ring, PolyRing, Polynomial};

/// Lengths of `K[x]/(J + I)`: globally, away from the origin, and at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LengthReport {
    pub global_colength: Length,
    pub away_colength: Length,
    pub local_length: Length,
}

struct Inner {
    ring: Arc<PolyRing>,
    defining: Ideal,
    dim: OnceLock<Result<i64>>,
    edim: OnceLock<Result<u64>>,
}

/// `K[x_1..x_n]/J` studied locally at the origin.
#[derive(Clone)]
pub struct QuotientRing {
    inner: Arc<Inner>,
}

impl fmt::Debug for QuotientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.field(), self.inner.ring.vars().join(","))?;
        if !self.inner.defining.gens().is_empty() {
            write!(f, "/{}", self.inner.defining)?;
        }
        Ok(())
    }
}

impl QuotientRing {
    /// The defining ideal must vanish at the origin.
    pub fn new(ring: &Arc<PolyRing>, defining: Vec<Polynomial>) -> Result<Self> {
        let defining = Ideal::new(ring, defining)?;
        if let Some(g) = defining.gens().iter().find(|g| g.constant_term() != 0) {
            return Err(Error::Validation(format!(
                "defining relation {g} does not vanish at the origin"
            )));
        }
        Ok(Self::from_ideal(defining))
    }

    fn from_ideal(defining: Ideal) -> Self {
        QuotientRing {
            inner: Arc::new(Inner {
                ring: defining.ring().clone(),
                defining,
                dim: OnceLock::new(),
                edim: OnceLock::new(),
            }),
        }
    }

    pub fn polynomial(ring: &Arc<PolyRing>) -> Self {
        Self::from_ideal(Ideal::zero(ring))
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.inner.ring
    }

    pub fn field(&self) -> &FieldSpec {
        self.inner.ring.field()
    }

    pub fn nvars(&self) -> usize {
        self.inner.ring.nvars()
    }

    pub fn defining(&self) -> &Ideal {
        &self.inner.defining
    }

    pub fn defining_gb(&self) -> Result<Arc<GroebnerBasis>> {
        self.inner.defining.groebner()
    }

    pub fn var(&self, i: usize) -> Polynomial {
        Polynomial::var(&self.inner.ring, i)
    }

    pub fn vars(&self) -> Vec<Polynomial> {
        (0..self.nvars()).map(|i| self.var(i)).collect()
    }

    pub fn maximal_ideal(&self) -> Ideal {
        Ideal::maximal(&self.inner.ring)
    }

    pub fn ideal(&self, gens: Vec<Polynomial>) -> Result<Ideal> {
        Ideal::new(&self.inner.ring, gens)
    }

    /// Same ring with extra relations.
    pub fn quotient(&self, more: &[Polynomial]) -> Result<QuotientRing> {
        let mut gens = self.inner.defining.gens().to_vec();
        gens.extend(more.iter().cloned());
        QuotientRing::new(&self.inner.ring, gens)
    }

    /// Whether the defining ideal is zero, so the local ring is regular.
    pub fn is_polynomial_ring(&self) -> Result<bool> {
        Ok(self.defining_gb()?.is_zero_ideal())
    }

    /// Krull dimension of the presentation.
    pub fn dim(&self) -> Result<i64> {
        self.inner.dim.get_or_init(|| self.inner.defining.krull_dimension()).clone()
    }

    /// `I + J` as an ideal of the ambient ring.
    pub fn extend_ideal(&self, i: &Ideal) -> Result<Ideal> {
        if !same_ring(i.ring(), &self.inner.ring) {
            return Err(Error::Structural("ideal does not belong to this ring".into()));
        }
        self.inner.defining.sum(i)
    }

    /// Length at the origin of `K[x]/(J + I)` where `J + I` is already formed.
    pub fn local_length_of_sum(&self, sum: &Ideal) -> Result<LengthReport> {
        let gb = sum.groebner()?;
        if gb.krull_dimension() > 0 {
            return Ok(LengthReport {
                global_colength: Length::Infinite,
                away_colength: Length::Infinite,
                local_length: self.isolated_origin_length(sum)?,
            });
        }
        let global = gb.colength().finite().expect("zero-dimensional quotient");
        if global == 0 || supported_at_origin(&gb, global) {
            return Ok(LengthReport {
                global_colength: Length::Finite(global),
                away_colength: Length::Finite(0),
                local_length: Length::Finite(global),
            });
        }
        let sat = sum.saturation(&self.maximal_ideal())?;
        let away = sat.colength()?.finite().expect("saturation of a finite quotient");
        Ok(LengthReport {
            global_colength: Length::Finite(global),
            away_colength: Length::Finite(away),
            local_length: Length::Finite(global - away),
        })
    }

    /// Local length when `V(sum)` is positive dimensional: zero if the origin
    /// is not on it, finite if the origin is an isolated point, where the
    /// origin's component is `sum + m^t` once these lengths stop growing.
    fn isolated_origin_length(&self, sum: &Ideal) -> Result<Length> {
        let m = self.maximal_ideal();
        if sum.sum(&m)?.is_unit()? {
            return Ok(Length::Finite(0));
        }
        if !sum.saturation(&m)?.sum(&m)?.is_unit()? {
            return Ok(Length::Infinite);
        }
        let mut prev = None;
        for t in 1.. {
            let len = sum.sum(&m.power(t)?)?.colength()?.finite().expect("m-primary");
            if prev == Some(len) {
                return Ok(Length::Finite(len));
            }
            prev = Some(len);
        }
        unreachable!()
    }

    /// `l(R_m / I R_m)`, via the saturation correction for components of
    /// `V(J + I)` away from the origin.
    pub fn local_length(&self, i: &Ideal) -> Result<LengthReport> {
        self.local_length_of_sum(&self.extend_ideal(i)?)
    }

    /// Local length as a number, failing on infinite lengths.
    pub fn length(&self, i: &Ideal) -> Result<u64> {
        self.local_length(i)?.local_length.finite().ok_or_else(|| {
            Error::InfiniteLength(format!("{i} is not primary to the maximal ideal"))
        })
    }

    /// Embedding dimension `dim_K m/m^2`.
    pub fn edim(&self) -> Result<u64> {
        self.inner
            .edim
            .get_or_init(|| Ok(self.length(&self.maximal_ideal().power(2)?)? - 1))
            .clone()
    }

    /// Minimal number of generators of `A` locally, `l(R/mA) - l(R/A)`.
    pub fn min_gens(&self, a: &Ideal) -> Result<u64> {
        let la = self.length(a)?;
        let lma = self.length(&self.maximal_ideal().product(a)?)?;
        Ok(lma - la)
    }

    /// The same presentation over another field of the same characteristic.
    pub fn over_field(&self, field: FieldSpec) -> Result<QuotientRing> {
        let ring = self.inner.ring.with_field(field);
        Ok(Self::from_ideal(self.inner.defining.reinterpret(&ring)?))
    }

    /// The same presentation with a different degree cap.
    pub fn with_degree_cap(&self, cap: u32) -> Result<QuotientRing> {
        let ring = self.inner.ring.with_degree_cap(cap);
        Ok(Self::from_ideal(self.inner.defining.reinterpret(&ring)?))
    }
}

/// Kernel of `source → target` sending variable `i` to `images[i]`: the
/// graph ideal `(z_i - image_i) + J_target` with the target variables
/// eliminated, returned as an ideal of `source`.
pub fn kernel_of_map(
    source: &Arc<PolyRing>,
    target: &QuotientRing,
    images: &[Polynomial],
) -> Result<Ideal> {
    if images.len() != source.nvars() {
        return Err(Error::Argument(format!(
            "{} images given for {} variables",
            images.len(),
            source.nvars()
        )));
    }
    for img in images {
        if !same_ring(img.ring(), target.ring()) {
            return Err(Error::Structural(format!("image {img} is not in the target ring")));
        }
        if img.constant_term() != 0 {
            return Err(Error::Validation(format!("image {img} is not in the maximal ideal")));
        }
    }
    let nt = target.nvars();
    let ns = source.nvars();
    let mut names: Vec<String> = target.ring().vars().to_vec();
    let mut src_idx = Vec::with_capacity(ns);
    for _ in 0..ns {
        src_idx.push(names.len());
        names.push(format!("_k{}", names.len()));
    }
    let joint = target
        .ring()
        .with_vars(names)?
        .with_order(crate::MonomialOrder::Block { elim: (1u64 << nt) - 1 });
    let tgt_idx: Vec<usize> = (0..nt).collect();
    let mut gens: Vec<Polynomial> =
        target.defining().gens().iter().map(|g| g.remap(&joint, &tgt_idx)).collect();
    for (i, img) in images.iter().enumerate() {
        gens.push(Polynomial::var(&joint, src_idx[i]).sub(&img.remap(&joint, &tgt_idx)));
    }
    let gb = crate::groebner_basis(&joint, &gens)?;
    let back: Vec<usize> = (0..nt + ns).map(|k| k.saturating_sub(nt)).collect();
    let kernel = gb
        .generators()
        .iter()
        .filter(|g| g.support() & ((1u64 << nt) - 1) == 0)
        .map(|g| g.remap(source, &back))
        .collect();
    Ideal::new(source, kernel)
}

/// Whether every variable is nilpotent modulo a zero-dimensional `gb` of
/// colength `n`, so that the quotient is supported only at the origin.
fn supported_at_origin(gb: &GroebnerBasis, n: u64) -> bool {
    let ring = gb.ring().clone();
    (0..ring.nvars()).all(|i| {
        let x = Polynomial::var(&ring, i);
        let mut p = Polynomial::one(&ring);
        for _ in 0..n {
            p = gb.normal_form(&p.mul(&x)).expect("same ring");
            if p.is_zero() {
                return true;
            }
        }
        false
    })
}
