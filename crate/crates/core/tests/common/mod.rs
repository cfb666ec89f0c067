//! Word generators and membership oracles written independently of the
//! library's zoo module.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;

/// Every word over `sigma` of length at most `max`, shortest first.
pub fn words_upto(sigma: &[char], max: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w| sigma.iter().map(move |c| format!("{w}{c}")))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn random_words(sigma: &[char], max: usize, n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(0..=max);
            (0..len)
                .map(|_| sigma[rng.gen_range(0..sigma.len())])
                .collect()
        })
        .collect()
}

fn histogram(w: &str) -> HashMap<char, usize> {
    let mut h = HashMap::new();
    for c in w.chars() {
        *h.entry(c).or_insert(0) += 1;
    }
    h
}

fn n(h: &HashMap<char, usize>, c: char) -> usize {
    h.get(&c).copied().unwrap_or(0)
}

pub fn in_l1(w: &str) -> bool {
    Regex::new("^[01]*1$").unwrap().is_match(w)
}

pub fn in_l2(w: &str) -> bool {
    let h = histogram(w);
    n(&h, 'a') == n(&h, 'b')
}

pub fn in_l3(w: &str) -> bool {
    let h = histogram(w);
    n(&h, 'a') == n(&h, 'b') && n(&h, 'b') == n(&h, 'c')
}

pub fn in_l5(w: &str) -> bool {
    let h = histogram(w);
    (n(&h, 'a') == n(&h, 'b')) ^ (n(&h, 'a') == n(&h, 'c'))
}

pub fn oracle_for(name: &str) -> fn(&str) -> bool {
    match name {
        "l1" => in_l1,
        "l2" => in_l2,
        "l3" => in_l3,
        "l5" => in_l5,
        _ => panic!("no oracle for {name}"),
    }
}

pub fn sigma_chars(spec: &qpa::model::QpaSpec) -> Vec<char> {
    spec.alphabets()
        .sigma()
        .iter()
        .map(|s| {
            let mut it = s.chars();
            let c = it.next().unwrap();
            assert!(it.next().is_none(), "multi-character symbol {s}");
            c
        })
        .collect()
}

/// One random edit of one transition: a new target with the same direction,
/// a new amplitude, or a new legal push word.
pub fn perturb(base: &qpa::model::QpaDocument, seed: u64) -> qpa::model::QpaDocument {
    use qpa::model::Kind;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = base.clone();
    let i = rng.gen_range(0..doc.transitions.len());
    let dir = doc.transitions[i].dir;
    match rng.gen_range(0..3) {
        0 => {
            let targets: Vec<String> = doc
                .states
                .iter()
                .filter(|s| doc.direction.get(*s).is_none_or(|d| *d == dir))
                .cloned()
                .collect();
            doc.transitions[i].to = targets[rng.gen_range(0..targets.len())].clone();
        }
        1 => {
            let literals = ["-1", "(0,1)", "sqrt(1/2)", "-sqrt(1/3)", "(0.6,0.8)", "0.5"];
            let lit = literals[rng.gen_range(0..literals.len())];
            if doc.kind == Kind::Reversible {
                doc.kind = Kind::Simplified;
            }
            doc.transitions[i].amp = qpa::Amplitude::parse(lit).unwrap();
        }
        _ => {
            let top = doc.transitions[i].stack_top.clone();
            let mut pushes = vec![top.clone()];
            if top != "Z0" {
                pushes.push(String::new());
            }
            for t in &doc.stack_alphabet {
                pushes.push(format!("{top} {t}"));
            }
            doc.transitions[i].push = pushes[rng.gen_range(0..pushes.len())].clone();
        }
    }
    doc
}

/// Unitarity verdict of every stack-seeded window over words up to `max_len`
/// and radii up to `max_radius`.
pub fn matrix_verdict(spec: &qpa::model::QpaSpec, max_len: usize, max_radius: usize) -> bool {
    use qpa::matrixlab::{build_matrix, check_truncated_unitarity, enumerate_window_with};
    use qpa::matrixlab::{Seed, WindowOptions};
    for w in words_upto(&sigma_chars(spec), max_len) {
        for r in 0..=max_radius {
            let opts = WindowOptions::new(r).seed(Seed::Stacks(2));
            let win = enumerate_window_with(spec, &w, &opts).unwrap();
            let m = build_matrix(spec, &win).unwrap();
            if !check_truncated_unitarity(&m, 1e-8).passed {
                return false;
            }
        }
    }
    true
}
