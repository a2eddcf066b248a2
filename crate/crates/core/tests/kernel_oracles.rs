mod oracle;

use lechkit::multiplicity::{hilbert_samuel, hk_sequence, multiplicity};
use lechkit::{Ideal, Length, QuotientRing, Rational};
use oracle::{box_colength, hs_multiplicity, local_length, poly, ring, staircase, to_lib, Terms};
use proptest::prelude::*;

fn pure_power(n: usize, i: usize, a: u16) -> Vec<u16> {
    let mut e = vec![0; n];
    e[i] = a;
    e
}

fn exps(n: usize, max: u16) -> impl Strategy<Value = Vec<u16>> {
    prop::collection::vec(0..=max, n)
}

/// A monomial ideal with every variable's pure power among its generators.
fn monomial_ideal() -> impl Strategy<Value = (usize, Vec<u16>, Vec<Vec<u16>>)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(1u16..=4, n),
            prop::collection::vec(exps(n, 4).prop_filter("degree <= 4", |e| e.iter().sum::<u16>() <= 4), 0..4),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monomial_colength_is_staircase((n, bounds, extra) in monomial_ideal()) {
        let names = ["x", "y", "z"];
        let r = ring(5, &names[..n]);
        let mut gens: Vec<Vec<u16>> = (0..n).map(|i| pure_power(n, i, bounds[i])).collect();
        gens.extend(extra.into_iter().filter(|e| e.iter().any(|&a| a > 0)));
        let polys = gens.iter().map(|e| poly(&r, &[(1, e)])).collect();
        let i = Ideal::new(&r, polys).unwrap();
        prop_assert_eq!(i.colength().unwrap(), Length::Finite(staircase(&gens, &bounds)));
    }

    #[test]
    fn binomial_colength_matches_box_oracle(
        (n, bounds, binoms, c) in (1usize..=3).prop_flat_map(|n| (
            Just(n),
            prop::collection::vec(1u16..=4, n),
            prop::collection::vec((exps(n, 3), exps(n, 3)), 1..4),
            1i64..5,
        ))
    ) {
        let names = ["x", "y", "z"];
        let r = ring(5, &names[..n]);
        let mut gens: Vec<Terms> = (0..n).map(|i| vec![(1, pure_power(n, i, bounds[i]))]).collect();
        for (a, b) in binoms {
            if a != b {
                gens.push(vec![(1, a), (-c, b)]);
            }
        }
        let i = Ideal::new(&r, gens.iter().map(|g| to_lib(&r, g)).collect()).unwrap();
        prop_assert_eq!(i.colength().unwrap(), Length::Finite(box_colength(5, &bounds, &gens)));
    }

    #[test]
    fn local_length_matches_truncation_oracle(
        (a, b, u, v, c) in (1u16..=3, 1u16..=3, exps(2, 3), exps(2, 3), 1i64..3)
    ) {
        // x^a - c·u and y^b - v: the unit branches sit away from the origin.
        let r = ring(3, &["x", "y"]);
        let gens: Vec<Terms> = vec![
            vec![(1, vec![a, 0]), (-c, u)],
            vec![(1, vec![0, b]), (-1, v)],
        ];
        let i = Ideal::new(&r, gens.iter().map(|g| to_lib(&r, g)).collect()).unwrap();
        let q = QuotientRing::polynomial(&r);
        match q.local_length(&i).unwrap().local_length {
            Length::Finite(len) => {
                prop_assert_eq!(local_length(3, 2, &gens, len as u32 + 2), Some(len));
            }
            Length::Infinite => prop_assert_eq!(local_length(3, 2, &gens, 10), None),
        }
    }
}

#[test]
fn branches_away_from_origin_are_discarded() {
    let r = ring(7, &["x", "y"]);
    let gens: Vec<Terms> = vec![vec![(1, vec![2, 0]), (-1, vec![1, 0])], vec![(1, vec![0, 2])]];
    let q = QuotientRing::polynomial(&r);
    let i = Ideal::new(&r, gens.iter().map(|g| to_lib(&r, g)).collect()).unwrap();
    let rep = q.local_length(&i).unwrap();
    assert_eq!(rep.global_colength, Length::Finite(4));
    assert_eq!(rep.local_length, Length::Finite(2));
    assert_eq!(local_length(7, 2, &gens, 8), Some(2));
}

fn plane_curve(p: u32, f: &[(i64, &[u16])]) -> (QuotientRing, Terms) {
    let r = ring(p, &["x", "y"]);
    let terms: Terms = f.iter().map(|(c, e)| (*c, e.to_vec())).collect();
    (QuotientRing::new(&r, vec![poly(&r, f)]).unwrap(), terms)
}

#[test]
fn multiplicity_anchors() {
    let curves: [(&str, Vec<(i64, &[u16])>); 5] = [
        ("cusp", vec![(1, &[0, 2]), (-1, &[3, 0])]),
        ("tacnode", vec![(1, &[0, 2]), (-1, &[4, 0])]),
        ("y2-x5", vec![(1, &[0, 2]), (-1, &[5, 0])]),
        ("y3-x4", vec![(1, &[0, 3]), (-1, &[4, 0])]),
        ("node", vec![(1, &[1, 1])]),
    ];
    for (name, f) in curves {
        let (q, rel) = plane_curve(5, &f);
        let oracle = hs_multiplicity(5, 2, &[rel], 1, 12);
        assert_eq!(multiplicity(&q).unwrap().e, oracle, "{name}");
    }
    let r = ring(2, &["x", "y", "z"]);
    let cone = QuotientRing::new(&r, vec![poly(&r, &[(1, &[1, 0, 1]), (-1, &[0, 2, 0])])]).unwrap();
    let rel: Terms = vec![(1, vec![1, 0, 1]), (-1, vec![0, 2, 0])];
    assert_eq!(multiplicity(&cone).unwrap().e, hs_multiplicity(2, 3, &[rel], 2, 8));
    assert_eq!(multiplicity(&cone).unwrap().e, 2);
    assert_eq!(multiplicity(&QuotientRing::polynomial(&r)).unwrap().e, 1);
}

#[test]
fn length_table_matches_oracle() {
    let (q, rel) = plane_curve(3, &[(1, &[0, 2]), (-1, &[3, 0])]);
    let rep = hilbert_samuel(&q, &q.maximal_ideal()).unwrap();
    for (&t, &l) in &rep.length_table {
        assert_eq!(l, oracle::truncated_length(3, 2, std::slice::from_ref(&rel), t), "t = {t}");
    }
}

#[test]
fn cone_hk_estimates() {
    let r = ring(2, &["x", "y", "z"]);
    let rel: Terms = vec![(1, vec![1, 0, 1]), (-1, vec![0, 2, 0])];
    let cone = QuotientRing::new(&r, vec![to_lib(&r, &rel)]).unwrap();
    let seq = hk_sequence(&cone, &cone.maximal_ideal(), 2).unwrap();
    for e in 1..=2u32 {
        let q = 1u16 << e;
        let gens: Vec<Terms> = vec![
            rel.clone(),
            vec![(1, vec![q, 0, 0])],
            vec![(1, vec![0, q, 0])],
            vec![(1, vec![0, 0, q])],
        ];
        let len = box_colength(2, &[q, q, q], &gens);
        assert_eq!(seq.lengths[&e], len);
        assert_eq!(seq.estimates[&e], Rational::new(len as i128, (q as i128).pow(2)));
    }
    assert_eq!(seq.estimates[&1], Rational::new(3, 2));
}

#[test]
fn parameter_ideal_is_exact_on_cm_ring() {
    // (x) on the cusp: l(R/(x^q)) = 2q for every q.
    let (q, _) = plane_curve(3, &[(1, &[0, 2]), (-1, &[3, 0])]);
    let x = q.ideal(vec![q.var(0)]).unwrap();
    let seq = hk_sequence(&q, &x, 3).unwrap();
    assert!(seq.estimates.values().all(|v| *v == Rational::from_integer(2)));
}

#[test]
fn isolated_origin_beside_a_line() {
    // V = {x = 1} together with the origin.
    let r = ring(5, &["x", "y"]);
    let gens: Vec<Terms> = vec![
        vec![(1, vec![2, 0]), (-1, vec![1, 0])],
        vec![(1, vec![1, 1]), (-1, vec![0, 1])],
    ];
    let q = QuotientRing::polynomial(&r);
    let i = Ideal::new(&r, gens.iter().map(|g| to_lib(&r, g)).collect()).unwrap();
    let rep = q.local_length(&i).unwrap();
    assert_eq!(rep.global_colength, Length::Infinite);
    assert_eq!(rep.local_length, Length::Finite(local_length(5, 2, &gens, 8).unwrap()));

    let line = Ideal::new(&r, vec![to_lib(&r, &vec![(1, vec![1, 0]), (-1, vec![0, 0])])]).unwrap();
    assert_eq!(q.local_length(&line).unwrap().local_length, Length::Finite(0));
    let through = Ideal::new(&r, vec![to_lib(&r, &vec![(1, vec![1, 0])])]).unwrap();
    assert_eq!(q.local_length(&through).unwrap().local_length, Length::Infinite);
}
