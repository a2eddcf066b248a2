//! Multiplicities of local rings over finite fields.
//!
//! Rings are presented as `K[x_1..x_n]/J` and always studied locally at the
//! origin. The crate computes Gröbner bases, local lengths, Hilbert–Samuel and
//! Hilbert–Kunz multiplicities, builds flat local maps and their Cohen
//! factorizations, and checks the known multiplicity inequalities for them.

pub mod error;
pub mod extensions;
pub mod field;
pub mod groebner;
pub mod ideal;
pub mod monomial;
pub mod multiplicity;
pub mod poly;
pub mod ring;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Elem, FieldSpec};
pub use ideal::Ideal;
pub use ring::{LengthReport, QuotientRing};
pub use groebner::{groebner_basis, GroebnerBasis, Length, StandardMonomials};
pub use monomial::{Monomial, MonomialOrder};
pub use poly::{PolyRing, Polynomial};

/// Exact rational numbers used for normalized lengths.
pub type Rational = num_rational::Ratio<i128>;

/// Serde helpers writing rationals as `"num/den"` strings.
pub mod rational_serde {
    use std::collections::BTreeMap;

    use serde::ser::SerializeMap;
    use serde::Serializer;

    use crate::Rational;

    pub fn to_string(r: &Rational) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(r))
    }

    pub fn serialize_map<S: Serializer, K: serde::Serialize>(
        m: &BTreeMap<K, Rational>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k, &to_string(v))?;
        }
        map.end()
    }
}
