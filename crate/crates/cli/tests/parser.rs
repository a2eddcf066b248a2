use lechkit_cli::dsl::{parse_bytes, parse_expr, parse_fixture, CheckOption, Document, Expr, Item};
use num_bigint::BigInt;
use proptest::prelude::*;

const KEYWORDS: &[&str] =
    &["field", "ring", "ideal", "map", "check", "with", "sends", "in", "sop", "emax", "module", "adjoin"];

fn ident() -> impl Strategy<Value = String> {
    "[a-zA-Z][a-zA-Z0-9_]{0,3}'?".prop_filter("keyword", |s| !KEYWORDS.contains(&s.as_str()))
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u64..1000).prop_map(|n| Expr::Int(BigInt::from(n))),
        ident().prop_map(Expr::Var),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner, 0u32..9).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
        ]
    })
}

fn option() -> impl Strategy<Value = CheckOption> {
    prop_oneof![
        prop::collection::vec(expr(), 0..3).prop_map(CheckOption::Sop),
        (0u32..10).prop_map(CheckOption::Emax),
        ident().prop_map(CheckOption::Ideal),
        ident().prop_map(CheckOption::Module),
        (0u32..4).prop_map(CheckOption::Adjoin),
    ]
}

fn item() -> impl Strategy<Value = Item> {
    prop_oneof![
        (ident(), 2u32..100, prop::option::of(1u32..5)).prop_map(|(name, p, k)| Item::Field { name, p, k }),
        (ident(), ident(), prop::collection::vec(ident(), 0..4), prop::collection::vec(expr(), 0..3))
            .prop_map(|(name, field, vars, relations)| Item::Ring { name, field, vars, relations }),
        (ident(), prop::collection::vec(expr(), 0..3), ident())
            .prop_map(|(name, gens, ring)| Item::Ideal { name, gens, ring }),
        (ident(), ident(), ident(), prop::collection::vec((ident(), expr()), 0..3))
            .prop_map(|(name, source, target, sends)| Item::Map { name, source, target, sends }),
        (ident(), ident(), prop::collection::vec(option(), 0..3))
            .prop_map(|(kind, target, options)| Item::Check { kind, target, options }),
    ]
}

proptest! {
    #[test]
    fn expressions_round_trip(e in expr()) {
        let printed = e.to_string();
        prop_assert_eq!(parse_expr(&printed).unwrap(), e);
    }

    #[test]
    fn documents_round_trip(items in prop::collection::vec(item(), 0..6)) {
        let doc = Document { items };
        let printed = doc.to_string();
        let reparsed = parse_fixture(&printed).map_err(|d| TestCaseError::fail(format!("{d}\n{printed}")))?;
        prop_assert_eq!(reparsed, doc);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_bytes(&bytes);
    }

    #[test]
    fn token_soup_never_panics(
        toks in prop::collection::vec(
            prop::sample::select(vec![
                "field", "ring", "map", "check", "ideal", "with", "sends", "in", "(", ")", "[", "]",
                "->", ";", ",", "/", "=", ":", "+", "-", "*", "^", "x", "F", "2", "#", "\n",
            ]),
            0..60,
        )
    ) {
        let text = toks.join(" ");
        if let Err(d) = parse_fixture(&text) {
            prop_assert!(d.line >= 1 && d.column >= 1);
        }
    }
}

#[test]
fn comments_and_whitespace() {
    let doc = parse_fixture("# header\n\nfield F(2);   # trailing\nring R = F[x];\n").unwrap();
    assert_eq!(doc.items.len(), 2);
}

#[test]
fn diagnostic_points_at_offending_token() {
    let d = parse_fixture("field F(2);\nring R = F[x;\n").unwrap_err();
    assert_eq!((d.line, d.column), (2, 13));
    assert!(d.to_string().starts_with("2:13:"));
}

#[test]
fn invalid_utf8_is_a_diagnostic() {
    assert!(parse_bytes(&[0x66, 0xff, 0xfe]).is_err());
}

#[test]
fn corpus_files_round_trip() {
    for (name, text) in lechkit_cli::registry::FIXTURES {
        let doc = parse_fixture(text).unwrap_or_else(|d| panic!("{name}: {d}"));
        assert_eq!(parse_fixture(&doc.to_string()).unwrap(), doc, "{name}");
    }
}
