mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qpa::evolve::{
    apply_evolution, step, Overrun, RecognizeOptions, Recognizer, Superposition, TapeContext,
};
use qpa::matrixlab::{build_matrix, enumerate_window_with, Seed, TruncatedMatrix, WindowOptions};
use qpa::model::QpaSpec;
use qpa::zoo;

use common::{oracle_for, random_words, sigma_chars, words_upto};

fn zoo_spec(i: usize) -> &'static QpaSpec {
    &zoo::entries()[i].spec
}

fn word_for(spec: &QpaSpec, picks: &[usize]) -> String {
    let sigma = sigma_chars(spec);
    picks.iter().map(|&i| sigma[i % sigma.len()]).collect()
}

/// Random superposition over interior columns whose successors all stay on
/// the tape.
fn random_state(spec: &QpaSpec, word: &str, coeffs: &[(f64, f64)]) -> (TapeContext, Superposition) {
    let opts = WindowOptions::new(3).seed(Seed::Stacks(1));
    let w = enumerate_window_with(spec, word, &opts).unwrap();
    let tape = w.tape().clone();
    let usable: Vec<_> = w
        .interior_cols()
        .iter()
        .map(|&i| w.configs()[i].clone())
        .filter(|c| apply_evolution(spec, &tape, &Superposition::basis(c.clone())).is_ok())
        .collect();
    let mut psi = Superposition::new();
    for (k, &(re, im)) in coeffs.iter().enumerate() {
        psi.add(
            usable[(k * 7919) % usable.len()].clone(),
            Complex64::new(re, im),
        );
    }
    (tape, psi)
}

fn matvec(m: &TruncatedMatrix, x: &[Complex64]) -> Vec<Complex64> {
    let mut y = vec![Complex64::default(); m.rows()];
    for (c, &xc) in x.iter().enumerate() {
        for &(r, v) in m.column(c) {
            y[r] += v * xc;
        }
    }
    y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_preserves_norm(
        which in 0usize..4,
        picks in prop::collection::vec(0usize..3, 0..4),
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
    ) {
        let spec = zoo_spec(which);
        let (tape, psi) = random_state(spec, &word_for(spec, &picks), &coeffs);
        let out = apply_evolution(spec, &tape, &psi).unwrap();
        prop_assert!((out.norm_sqr() - psi.norm_sqr()).abs() < 1e-9);
    }

    #[test]
    fn evolution_is_linear(
        which in 0usize..4,
        picks in prop::collection::vec(0usize..3, 0..4),
        x in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8),
        y in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8),
        a in (-2.0f64..2.0, -2.0f64..2.0),
        b in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let spec = zoo_spec(which);
        let word = word_for(spec, &picks);
        let (tape, px) = random_state(spec, &word, &x);
        let (_, py) = random_state(spec, &word, &y);
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let lhs = apply_evolution(spec, &tape, &px.scaled(a).plus(&py.scaled(b))).unwrap();
        let ux = apply_evolution(spec, &tape, &px).unwrap();
        let uy = apply_evolution(spec, &tape, &py).unwrap();
        let rhs = ux.scaled(a).plus(&uy.scaled(b));
        prop_assert!(lhs.max_deviation(&rhs) < 1e-12);
    }

    #[test]
    fn probability_is_conserved(which in 0usize..4, seed in any::<u64>()) {
        let e = &zoo::entries()[which];
        let rec = Recognizer::new(&e.spec, RecognizeOptions::default()).unwrap();
        for w in random_words(&sigma_chars(&e.spec), 12, 5, seed) {
            let mut worst: f64 = 0.0;
            let r = rec.run(&w, |s| worst = worst.max((s.total() - 1.0).abs())).unwrap();
            prop_assert!(worst < 1e-9);
            prop_assert!(r.halted);
            prop_assert!((r.p_accept + r.p_reject + r.p_nonhalt - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zoo_probabilities_on_longer_words(which in 0usize..4, seed in any::<u64>()) {
        let e = &zoo::entries()[which];
        let oracle = oracle_for(e.name);
        let rec = Recognizer::new(&e.spec, RecognizeOptions::default()).unwrap();
        for w in random_words(&sigma_chars(&e.spec), 16, 4, seed) {
            let r = rec.recognize(&w).unwrap();
            if oracle(&w) {
                prop_assert!(r.p_accept >= e.claimed_probability - 1e-9, "{} {w}", e.name);
            } else {
                prop_assert!(r.p_reject >= e.claimed_probability - 1e-9, "{} {w}", e.name);
            }
        }
    }
}

/// Unmeasured evolution from the initial configuration agrees with powers
/// of the truncated matrix for as long as the support stays interior.
#[test]
fn apply_evolution_matches_matrix_powers() {
    let radius = 6;
    for e in zoo::entries() {
        for word in words_upto(&sigma_chars(&e.spec), 4) {
            let w = enumerate_window_with(&e.spec, &word, &WindowOptions::new(radius)).unwrap();
            let m = build_matrix(&e.spec, &w).unwrap();
            let tape = w.tape().clone();
            let mut interior = vec![false; w.len()];
            for &c in w.interior_cols() {
                interior[c] = true;
            }
            let mut psi = Superposition::basis(w.configs()[0].clone());
            let mut vec = vec![Complex64::default(); w.len()];
            vec[0] = Complex64::new(1.0, 0.0);
            for k in 0..radius {
                for (c, _) in psi.iter() {
                    let i = w.index_of(c).unwrap();
                    assert!(interior[i], "{} `{word}` step {k}", e.name);
                }
                let s = step(&e.spec, &tape, &psi, Overrun::Discard).unwrap();
                vec = matvec(&m, &vec);
                let mut off_tape = 0.0;
                for (i, c) in w.configs().iter().enumerate() {
                    if c.head >= tape.len() {
                        off_tape += vec[i].norm_sqr();
                        vec[i] = Complex64::default();
                    } else {
                        assert!((vec[i] - s.psi.get(c)).norm() < 1e-12);
                    }
                }
                assert!((off_tape - s.lost).abs() < 1e-12);
                psi = s.psi;
            }
        }
    }
}

/// The per-step acceptance increments are the squared amplitudes on
/// accepting and rejecting configurations of the evolved state.
#[test]
fn trace_increments_match_projections() {
    for e in zoo::entries() {
        let rec = Recognizer::new(&e.spec, RecognizeOptions::default()).unwrap();
        for w in random_words(&sigma_chars(&e.spec), 6, 20, 3) {
            let t = rec.trace(&w).unwrap();
            let (mut acc, mut rej) = (0.0, 0.0);
            for s in &t.steps {
                let a: f64 = s
                    .psi
                    .iter()
                    .filter(|(c, _)| e.spec.is_accepting(c.state))
                    .map(|(_, z)| z.norm_sqr())
                    .sum();
                let r: f64 = s
                    .psi
                    .iter()
                    .filter(|(c, _)| e.spec.is_rejecting(c.state))
                    .map(|(_, z)| z.norm_sqr())
                    .sum();
                assert!((s.p_accept_inc - a).abs() < 1e-12);
                assert!((s.p_reject_inc - r).abs() < 1e-12);
                acc += a;
                rej += r;
            }
            assert!((t.result.p_accept - acc).abs() < 1e-12);
            assert!((t.result.p_reject - rej).abs() < 1e-12);
        }
    }
}
