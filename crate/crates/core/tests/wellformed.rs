mod common;

use proptest::prelude::*;
use qpa::dfa2rpa::{compile, random_dfa};
use qpa::model::{Kind, QpaSpec};
use qpa::wellformed::{check_all, check_general, check_simplified_summary, CheckOptions, Suite};
use qpa::zoo;

use common::perturb;

fn suites_agree(spec: &QpaSpec) -> (bool, bool) {
    let opts = CheckOptions::default();
    let simplified = check_simplified_summary(spec, &opts).unwrap().passed;
    let general = check_general(&spec.as_general(), &opts).passed;
    (simplified, general)
}

#[test]
fn shipped_tables_pass_both_suites() {
    for e in zoo::entries() {
        assert_eq!(suites_agree(&e.spec), (true, true), "{}", e.name);
    }
    let colliding = zoo::l2_push_collision_spec();
    assert_eq!(suites_agree(&colliding), (false, false));
}

#[test]
fn check_all_picks_the_suite_from_the_kind() {
    let opts = CheckOptions::default();
    assert_eq!(check_all(&zoo::l2_spec(), &opts).suite, Suite::Simplified);
    assert_eq!(check_all(&zoo::l3_spec(), &opts).suite, Suite::Simplified);
    let ex = zoo::nonunitary_example_spec();
    assert_eq!(ex.kind(), Kind::General);
    assert_eq!(check_all(&ex, &opts).suite, Suite::General);
}

#[test]
fn tolerance_is_respected() {
    let colliding = zoo::l2_push_collision_spec();
    let loose = CheckOptions {
        tolerance: 1.5,
        ..CheckOptions::default()
    };
    assert!(check_all(&colliding, &loose).passed);
    assert!(!check_all(&colliding, &CheckOptions::default()).passed);
}

#[test]
fn witness_count_is_capped() {
    let ex = zoo::nonunitary_example_spec();
    let opts = CheckOptions {
        max_reports: 2,
        ..CheckOptions::default()
    };
    let s = check_all(&ex, &opts);
    let rvn = s.conditions.iter().find(|c| !c.passed).unwrap();
    assert!(rvn.violations > 2);
    assert_eq!(rvn.reports.len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn simplified_and_general_suites_agree_on_perturbed_tables(
        which in 0usize..4,
        seed in any::<u64>(),
    ) {
        let base = &zoo::entries()[which].spec;
        let spec = QpaSpec::from_document(&perturb(&base.to_document(), seed));
        prop_assume!(spec.is_ok());
        let spec = spec.unwrap();
        prop_assume!(spec.validate_structure().is_empty());
        let (s, g) = suites_agree(&spec);
        prop_assert_eq!(s, g);
    }

    #[test]
    fn simplified_and_general_suites_agree_on_compiled_dfas(n in 1usize..5, seed in any::<u64>()) {
        let rpa = compile(&random_dfa(n, &["0", "1"], seed).unwrap()).unwrap();
        prop_assert_eq!(suites_agree(&rpa), (true, true));
    }
}
