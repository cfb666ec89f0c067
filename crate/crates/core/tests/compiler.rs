mod common;

use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;
use qpa::dfa2rpa::{compile, compile_with_map, random_dfa, simulate_dfa};
use qpa::evolve::{RecognizeOptions, Recognizer};
use qpa::matrixlab::{build_matrix, enumerate_window_with, Seed, WindowOptions};
use qpa::model::{DfaSpec, Kind};
use qpa::wellformed::{check_simplified_summary, CheckOptions};

use common::random_words;

const SIGMAS: [&[&str]; 2] = [&["0", "1"], &["a", "b", "c"]];

/// Walks the transition table by symbol name.
fn walk(dfa: &DfaSpec, word: &str) -> bool {
    let mut q = dfa.initial();
    for c in word.chars() {
        let i = dfa
            .sigma()
            .iter()
            .position(|s| s.chars().eq(std::iter::once(c)))
            .unwrap();
        q = dfa.next(q, i);
    }
    dfa.is_final(q)
}

fn chars(sigma: &[&str]) -> Vec<char> {
    sigma.iter().map(|s| s.chars().next().unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compiled_rpa_recognizes_the_dfa_language(
        n in 1usize..=6,
        alphabet in 0usize..2,
        seed in any::<u64>(),
    ) {
        let sigma = SIGMAS[alphabet];
        let dfa = random_dfa(n, sigma, seed).unwrap();
        let rpa = compile(&dfa).unwrap();
        prop_assert_eq!(rpa.kind(), Kind::Reversible);
        prop_assert_eq!(rpa.state_count(), 2 * n);
        prop_assert!(check_simplified_summary(&rpa, &CheckOptions::default()).unwrap().passed);
        let rec = Recognizer::new(&rpa, RecognizeOptions::default()).unwrap();
        for w in random_words(&chars(sigma), 10, 12, seed ^ 0x5eed) {
            let expected = walk(&dfa, &w);
            prop_assert_eq!(simulate_dfa(&dfa, &w).unwrap(), expected);
            let r = rec.recognize(&w).unwrap();
            prop_assert_eq!(r.p_accept, if expected { 1.0 } else { 0.0 });
            prop_assert_eq!(r.p_reject, 1.0 - r.p_accept);
            prop_assert_eq!(r.steps, w.chars().count() + 2);
        }
    }

    /// Every symbol acts as a bijection on configurations, so each window
    /// matrix is a partial permutation that is a full permutation on the
    /// interior.
    #[test]
    fn compiled_rpa_is_injective_on_configurations(n in 1usize..=4, seed in any::<u64>()) {
        let dfa = random_dfa(n, &["0", "1"], seed).unwrap();
        let rpa = compile(&dfa).unwrap();
        for word in ["", "0", "10", "011"] {
            let opts = WindowOptions::new(3).seed(Seed::Stacks(1));
            let w = enumerate_window_with(&rpa, word, &opts).unwrap();
            let m = build_matrix(&rpa, &w).unwrap();
            let one = Complex64::new(1.0, 0.0);
            let rows = m.row_lists();
            for &c in w.interior_cols() {
                prop_assert_eq!(m.column(c).len(), 1);
                prop_assert_eq!(m.column(c)[0].1, one);
            }
            for &r in w.interior_rows() {
                prop_assert_eq!(rows[r].len(), 1);
            }
            let targets: BTreeSet<usize> =
                w.interior_cols().iter().map(|&c| m.column(c)[0].0).collect();
            prop_assert_eq!(targets.len(), w.interior_cols().len());
        }
    }
}

#[test]
fn compilation_map_partitions_the_rejection_sets() {
    for seed in 0..20 {
        let n = 1 + (seed as usize % 5);
        let dfa = random_dfa(n, &["0", "1"], seed).unwrap();
        let (rpa, map) = compile_with_map(&dfa).unwrap();
        assert_eq!(map.primed.len(), n);
        assert_eq!(map.index.len(), n);
        assert_eq!(map.r_set.len(), n * 2);
        assert_eq!(map.r_set.len() + map.r_bar_set.len(), n * 2 * n);
        let all: BTreeSet<_> = map.r_set.iter().chain(&map.r_bar_set).collect();
        assert_eq!(all.len(), n * 2 * n);
        for (q, qp) in &map.primed {
            let p = rpa.state_id(qp).unwrap();
            let orig = dfa.states().iter().position(|s| s == q).unwrap();
            assert_eq!(rpa.is_accepting(p), dfa.is_final(orig));
            assert_eq!(rpa.is_rejecting(p), !dfa.is_final(orig));
        }
    }
}

#[test]
fn primed_names_avoid_collisions() {
    let dfa = DfaSpec::from_table(&["a", "a'"], &["x"], 0, &[1], &[vec![1], vec![0]]).unwrap();
    let (rpa, map) = compile_with_map(&dfa).unwrap();
    let names: BTreeSet<&str> = map.primed.iter().map(|(_, p)| p.as_str()).collect();
    assert_eq!(names.len(), 2);
    assert!(!names.contains("a'"));
    assert_eq!(rpa.state_count(), 4);
    let rec = Recognizer::new(&rpa, RecognizeOptions::default()).unwrap();
    assert_eq!(rec.recognize("x").unwrap().p_accept, 1.0);
    assert_eq!(rec.recognize("xx").unwrap().p_accept, 0.0);
}

#[test]
fn compiled_documents_round_trip() {
    let dfa = random_dfa(4, &["0", "1"], 11).unwrap();
    let back = DfaSpec::from_json(&serde_json::to_string(&dfa.to_document()).unwrap()).unwrap();
    assert_eq!(back.to_document(), dfa.to_document());
    let rpa = compile(&dfa).unwrap();
    let text = rpa.to_json();
    assert_eq!(
        qpa::model::QpaSpec::from_json(&text).unwrap().to_json(),
        text
    );
}
