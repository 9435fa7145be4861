mod common;

use common::*;
use liftforge_core::cca::run_schema_traced;
use liftforge_core::eea::equivalent_schema;
use liftforge_core::pmat::normalize;
use liftforge_core::signatures::uniqueness_check;
use liftforge_core::{
    cascade_conditioning, complexity_report, eea_factor, enumerate_left, lifting_signature, run_schema, Axis,
    Cascade, Coprimification, FieldContext, LiftingSignature, PolyMatrix2, Schema,
};

fn expected(text: &str, ctx: FieldContext) -> Cascade {
    normalize(&factors(text, ctx), ctx).unwrap()
}

fn schema(text: &str) -> Schema {
    text.parse().unwrap()
}

const EEA_CASES: [(Axis, usize, &str, &str); 4] = [
    (Axis::Column, 0, EEA_COL0, SCHEMA_COL0),
    (Axis::Column, 1, EEA_COL1, SCHEMA_COL1),
    (Axis::Row, 0, EEA_ROW0, SCHEMA_ROW0),
    (Axis::Row, 1, EEA_ROW1, SCHEMA_ROW1),
];

#[test]
fn eea_cascades() {
    let h = cdf75();
    for (axis, index, text, _) in EEA_CASES {
        let t = eea_factor(&h, axis, index).unwrap();
        assert_eq!(t.cascade, expected(text, q()), "{axis} {index}");
        assert_eq!(t.cascade.expand(), h);
    }
}

#[test]
fn cca_schemas_match_eea() {
    let h = cdf75();
    for (axis, index, text, s) in EEA_CASES {
        let c = run_schema(&h, &schema(s)).unwrap();
        assert_eq!(c, expected(text, q()), "{axis} {index}");
        let t = eea_factor(&h, axis, index).unwrap();
        assert_eq!(run_schema(&h, &equivalent_schema(&t)).unwrap(), t.cascade);
    }
}

#[test]
fn sgda_cascades() {
    let h = cdf75();
    for (s, text) in [
        (SCHEMA_LEFT_THREE, SGDA_LEFT_THREE),
        (SCHEMA_LINEAR_PHASE, SGDA_LINEAR_PHASE),
        (SCHEMA_RIGHT_THREE, SGDA_RIGHT_THREE),
    ] {
        let c = run_schema(&h, &schema(s)).unwrap();
        assert_eq!(c, expected(text, q()), "{s}");
        assert_eq!(c.expand(), h);
    }
}

#[test]
fn left_three_signature() {
    let c = run_schema(&cdf75(), &schema(SCHEMA_LEFT_THREE)).unwrap();
    assert_eq!(lifting_signature(&c).to_string(), "[{0,1}; 0,0; 1,0; 1 : 1]");
}

#[test]
fn operation_counts() {
    let r = complexity_report(&cdf75()).unwrap();
    let want = [
        ("col 0", "EEA", (3, 8, 3, 3)),
        ("col 1", "EEA", (1, 6, 1, 2)),
        ("row 0", "EEA", (3, 6, 3, 3)),
        ("row 1", "EEA", (1, 5, 1, 2)),
        ("col 0", "CCA", (2, 6, 2, 2)),
        ("col 1", "CCA", (2, 4, 2, 1)),
        ("row 0", "CCA", (2, 3, 2, 2)),
        ("row 1", "CCA", (2, 2, 2, 1)),
    ];
    for (label, method, counts) in want {
        assert_eq!(r.find(label, method).unwrap().as_tuple(), counts, "{label} {method}");
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn eea_column0_conditioning() {
    let c = eea_factor(&cdf75(), Axis::Column, 0).unwrap().cascade;
    let r = cascade_conditioning(&c);
    let mut conds: Vec<f64> = r.steps.iter().map(|s| s.cond).collect();
    conds.push(r.gain_cond);
    conds.sort_by(f64::total_cmp);
    let mut want = [577.998, 1.06183, 722502.0, 1.00160, 2500.0];
    want.sort_by(f64::total_cmp);
    for (got, w) in conds.iter().zip(want) {
        assert!(rel(*got, w) < 1e-3, "{got} vs {w}");
    }
    assert!(rel(r.product, 1.1e12) < 0.01, "{}", r.product);
}

#[test]
fn conditioning_products() {
    let h = cdf75();
    let row0 = eea_factor(&h, Axis::Row, 0).unwrap().cascade;
    assert!(rel(cascade_conditioning(&row0).product, 3.4e5) < 0.01);
    let left = run_schema(&h, &schema(SCHEMA_LEFT_THREE)).unwrap();
    let r = cascade_conditioning(&left);
    assert_eq!(r.gain_cond, 4.0);
    let norms: Vec<f64> = r.steps.iter().map(|s| s.norm_sq).collect();
    for (got, w) in norms.iter().zip([16.0, 0.25, 36.0, 9.0 / 64.0]) {
        assert!((got - w).abs() < 1e-12, "{got} vs {w}");
    }
    assert!(rel(r.product, 6.5e3) < 0.01);
    let right = run_schema(&h, &schema(SCHEMA_RIGHT_THREE)).unwrap();
    assert!(rel(cascade_conditioning(&right).product, 8.8e3) < 0.01);
}

#[test]
fn linear_phase_conditioning_is_theorem_value() {
    let c = run_schema(&cdf75(), &schema(SCHEMA_LINEAR_PHASE)).unwrap();
    let p = cascade_conditioning(&c).product;
    assert!((p - 55.5).abs() < 0.1, "{p}");
}

#[test]
fn daub44_enumeration() {
    let h = daub44();
    let found = enumerate_left(&h).unwrap();
    assert_eq!(found.len(), 8);
    for (s, sig, text) in DAUB44_TABLE {
        let want = expected(text, q3());
        let hit = found.iter().find(|e| e.cascade == want).unwrap_or_else(|| panic!("missing {s}"));
        assert_eq!(hit.signature.to_string(), sig);
        assert_eq!(hit.schema.to_string(), s);
        assert_eq!(run_schema(&h, &schema(s)).unwrap(), want, "{s}");
        assert_eq!(want.expand(), h);
    }
    let cascades: Vec<Cascade> = found.iter().map(|e| e.cascade.clone()).collect();
    assert!(uniqueness_check(&cascades).unwrap());
    let mut sigs: Vec<String> = found.iter().map(|e| e.signature.to_string()).collect();
    sigs.sort();
    sigs.dedup();
    assert_eq!(sigs.len(), 8);
}

#[test]
fn daub44_signatures_parse() {
    for (_, sig, _) in DAUB44_TABLE {
        let s: LiftingSignature = sig.parse().unwrap();
        assert_eq!(s.to_string(), sig);
    }
}

#[test]
fn identity_has_only_trivial_factorization() {
    for ctx in [q(), q3()] {
        let found = enumerate_left(&PolyMatrix2::identity(ctx)).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].cascade, Cascade::trivial(ctx));
    }
}

#[test]
fn lgt53_schema() {
    let h = liftforge_core::builtin_bank(liftforge_core::Builtin::Lgt53).to_polyphase();
    let c = run_schema(&h, &schema("(L,0,0,0; L,{0,1},1,0)")).unwrap();
    assert_eq!(c.expand(), h);
    assert_eq!(c.len(), 3);
    let found = enumerate_left(&h).unwrap();
    assert!(found.iter().any(|e| e.schema.to_string() == "(L,0,0,0; L,{0,1},1,0)" && e.cascade == c));
}

#[test]
fn coprimification_orders() {
    use liftforge_core::pmat::{coprimify, CoprimeOrder};
    let both = |h: &PolyMatrix2| {
        (
            coprimify(h, Coprimification::Order(CoprimeOrder::RowsFirst)).unwrap(),
            coprimify(h, Coprimification::Order(CoprimeOrder::ColsFirst)).unwrap(),
        )
    };
    let ndj = liftforge_core::builtin_bank(liftforge_core::Builtin::NonDoubleJust).to_polyphase();
    let (r, c) = both(&ndj);
    assert_eq!(r, c);
    assert_eq!(r.0, [0; 4]);
    let h = PolyMatrix2::parse([["z^-1", "z^-1"], ["z^-1", "1+z^-1"]], q()).unwrap();
    let ((dr, qr), (dc, qc)) = both(&h);
    assert_eq!(dr, [1, 0, 0, 0]);
    assert_eq!(dc, [0, 0, 1, 0]);
    assert_eq!(qr, PolyMatrix2::parse([["1", "1"], ["z^-1", "1+z^-1"]], q()).unwrap());
    assert_eq!(qc, PolyMatrix2::parse([["1", "z^-1"], ["1", "1+z^-1"]], q()).unwrap());
}

#[test]
fn traced_quotients_shrink() {
    let run = run_schema_traced(&cdf75(), &schema(SCHEMA_COL0)).unwrap();
    let total = |m: &PolyMatrix2| -> usize {
        m.degrees().iter().flatten().filter_map(|d| d.finite()).sum()
    };
    for w in run.quotients.windows(2) {
        assert!(total(&w[1]) < total(&w[0]));
    }
}
