mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qpa::model::{QpaDocument, QpaSpec};
use qpa::{zoo, Amplitude};

use common::perturb;

#[test]
fn shipped_specs_round_trip() {
    let names = zoo::entries()
        .iter()
        .map(|e| e.name)
        .chain(zoo::FIXTURES.iter().copied());
    for name in names {
        let spec = zoo::spec_by_name(name).unwrap();
        let text = spec.to_json();
        let back = QpaSpec::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text, "{name}");
        let doc: QpaDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(doc, spec.to_document());
    }
}

fn amplitude_literal() -> impl Strategy<Value = (String, Complex64)> {
    let num = || (1u32..20, 1u32..20);
    prop_oneof![
        num().prop_map(|(p, q)| (format!("{p}/{q}"), Complex64::new(p as f64 / q as f64, 0.0))),
        num().prop_map(|(p, q)| (
            format!("-sqrt({p}/{q})"),
            Complex64::new(-(p as f64 / q as f64).sqrt(), 0.0)
        )),
        num().prop_map(|(p, q)| (
            format!("({p}/{q}, -1/{q})"),
            Complex64::new(p as f64 / q as f64, -1.0 / q as f64)
        )),
        num().prop_map(|(p, q)| (
            format!("1/sqrt({p}) * {q}"),
            Complex64::new(q as f64 / (p as f64).sqrt(), 0.0)
        )),
    ]
}

proptest! {
    #[test]
    fn amplitude_literals_evaluate((lit, value) in amplitude_literal()) {
        let a = Amplitude::parse(&lit).unwrap();
        prop_assert!((a.value() - value).norm() < 1e-12);
        let json = serde_json::to_string(&a).unwrap();
        let back: Amplitude = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.literal(), a.literal());
    }

    #[test]
    fn perturbed_documents_round_trip(which in 0usize..4, seed in any::<u64>()) {
        let base = zoo::entries()[which].spec.to_document();
        let doc = perturb(&base, seed);
        if let Ok(spec) = QpaSpec::from_document(&doc) {
            let text = spec.to_json();
            prop_assert_eq!(QpaSpec::from_json(&text).unwrap().to_json(), text);
        }
    }

    #[test]
    fn garbage_never_panics(text in ".{0,80}") {
        let _ = QpaSpec::from_json(&text);
        let _ = Amplitude::parse(&text);
    }
}

#[test]
fn bad_literals_are_errors() {
    for lit in [
        "",
        "sqrt(-1)",
        "1/0",
        "(1,2,3)",
        "abc",
        "1 2",
        "sqrt((0,1))",
    ] {
        assert!(Amplitude::parse(lit).is_err(), "{lit}");
    }
}
