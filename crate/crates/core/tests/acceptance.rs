//! Acceptance suite. Runs every criterion in order, prints one
//! `PASS`/`FAIL` line each and exits non-zero if any failed.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qpa::dfa2rpa::{compile, random_dfa};
use qpa::evolve::{recognize, RecognizeOptions, Recognizer};
use qpa::matrixlab::{
    banded_associativity_probe, build_matrix, check_truncated_unitarity, random_banded,
    random_banded_isometry, row_inner, row_norm_bound_probe, row_structure_probe, shift_fixture,
    IsometryShape, Seed, WindowOptions,
};
use qpa::model::{DfaSpec, QpaSpec};
use qpa::wellformed::{check_all, check_simplified_summary, CheckOptions, ConditionId};
use qpa::zoo;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{oracle_for, random_words, sigma_chars, words_upto};

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            passed,
            detail: detail.into(),
        }
    }
}

fn within(limit: Duration, t: Instant) -> (bool, String) {
    let e = t.elapsed();
    (
        e < limit,
        format!("{:.2}s of {}s", e.as_secs_f64(), limit.as_secs()),
    )
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn zero_or_one(p: f64) -> bool {
    close(p, 0.0, 1e-9) || close(p, 1.0, 1e-9)
}

fn criterion_1() -> Verdict {
    let opts = CheckOptions::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, spec) in [("l1", zoo::l1_spec()), ("l2", zoo::l2_spec())] {
        let t = Instant::now();
        let s = check_simplified_summary(&spec, &opts).expect("simplified spec");
        let (fast, time) = within(Duration::from_secs(1), t);
        let good = s.passed && s.worst_residual < 1e-9 && fast;
        ok &= good;
        notes.push(format!("{name}: residual {:.1e}, {time}", s.worst_residual));
    }
    let t = Instant::now();
    let s = check_all(&zoo::nonunitary_example_spec(), &opts);
    let (fast, time) = within(Duration::from_secs(1), t);
    let failed = s.failed();
    let rvn = s.outcome(ConditionId::RVN).expect("general suite");
    let good = failed == [ConditionId::RVN] && close(rvn.worst_residual, 1.0, 1e-12) && fast;
    ok &= good;
    notes.push(format!(
        "example fails {:?} with residual {}, {time}",
        failed, rvn.worst_residual
    ));
    Verdict::new(ok, notes.join("; "))
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let opts = CheckOptions::default();
    let mut ok = true;
    let mut notes = Vec::new();
    let names = zoo::entries()
        .iter()
        .map(|e| e.name)
        .chain(zoo::FIXTURES.iter().copied());
    for name in names {
        let spec = zoo::spec_by_name(name).unwrap();
        let checker = check_all(&spec, &opts).passed;
        let (mut windows, mut failing) = (0, 0);
        let mut worst: f64 = 0.0;
        for word in words_upto(&sigma_chars(&spec), 3) {
            for radius in 0..=5 {
                let w = WindowOptions::new(radius).seed(Seed::Stacks(2));
                let win = qpa::matrixlab::enumerate_window_with(&spec, &word, &w).unwrap();
                let m = build_matrix(&spec, &win).unwrap();
                let r = check_truncated_unitarity(&m, 1e-8);
                windows += 1;
                worst = worst.max(r.column_deviation).max(r.row_deviation);
                if !r.passed {
                    failing += 1;
                }
            }
        }
        let matrix = failing == 0;
        ok &= checker == matrix;
        notes.push(format!(
            "{name}: checker {} matrix {} ({failing}/{windows} windows fail, worst {worst:.1e})",
            if checker { "pass" } else { "fail" },
            if matrix { "pass" } else { "fail" },
        ));
    }
    let (fast, time) = within(Duration::from_secs(10), t);
    notes.push(time);
    Verdict::new(ok && fast, notes.join("; "))
}

fn criterion_3() -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, spec, sigma) in [
        ("l1", zoo::l1_spec(), ['0', '1']),
        ("l2", zoo::l2_spec(), ['a', 'b']),
    ] {
        let oracle = oracle_for(name);
        let rec = Recognizer::new(&spec, RecognizeOptions::default()).unwrap();
        let (mut bad_p, mut bad_verdict, mut slow) = (0, 0, Vec::new());
        let words = words_upto(&sigma, 8);
        for w in &words {
            let r = rec.recognize(w).unwrap();
            if !zero_or_one(r.p_accept) || !r.halted {
                bad_p += 1;
            }
            if (r.p_accept > 0.5) != oracle(w) {
                bad_verdict += 1;
            }
            if r.steps > w.len() + 4 {
                slow.push((w.clone(), r.steps));
            }
        }
        ok &= bad_p == 0 && bad_verdict == 0 && slow.is_empty();
        let mut note = format!(
            "{name}: {} words, {bad_p} non-0/1, {bad_verdict} oracle mismatches, {} over |w|+4 steps",
            words.len(),
            slow.len()
        );
        if let Some((w, s)) = slow.iter().max_by_key(|(w, s)| (s - w.len(), w.len())) {
            note.push_str(&format!(" (worst `{w}`: {s} steps)"));
        }
        notes.push(note);
    }
    let (fast, time) = within(Duration::from_secs(30), t);
    notes.push(time);
    Verdict::new(ok && fast, notes.join("; "))
}

fn criterion_4() -> Verdict {
    let t = Instant::now();
    let spec = zoo::l3_spec();
    let rec = Recognizer::new(&spec, RecognizeOptions::default()).unwrap();
    let oracle = oracle_for("l3");
    let (mut members, mut bad) = (0, 0);
    let (mut min_rej, mut worst_member): (f64, f64) = (1.0, 0.0);
    let words = words_upto(&['a', 'b', 'c'], 6);
    for w in &words {
        let r = rec.recognize(w).unwrap();
        if oracle(w) {
            members += 1;
            worst_member = worst_member.max((r.p_accept - 2.0 / 3.0).abs());
            if !close(r.p_accept, 2.0 / 3.0, 1e-9) {
                bad += 1;
            }
        } else {
            min_rej = min_rej.min(r.p_reject);
            if r.p_reject < 2.0 / 3.0 - 1e-9 {
                bad += 1;
            }
        }
    }
    let (fast, time) = within(Duration::from_secs(60), t);
    Verdict::new(
        bad == 0 && fast,
        format!(
            "{} words, {members} members; max |p_accept - 2/3| {worst_member:.1e} on members, min p_reject {min_rej:.6} on non-members; {bad} failures; {time}",
            words.len()
        ),
    )
}

fn criterion_5() -> Verdict {
    let t = Instant::now();
    let spec = zoo::l5_spec();
    let rec = Recognizer::new(&spec, RecognizeOptions::default()).unwrap();
    let oracle = oracle_for("l5");
    let cancel_target = spec.state_id("ab.q2").unwrap();
    let (three, four) = (3.0 / 7.0, 4.0 / 7.0);
    let (mut balanced, mut bad) = (0, 0);
    let mut exactly_one: f64 = 1.0;
    let mut worst_cancelled: f64 = 0.0;
    for w in words_upto(&['a', 'b', 'c'], 6) {
        let tr = rec.trace(&w).unwrap();
        let p = tr.result.p_accept;
        let (na, nb, nc) = (
            w.matches('a').count(),
            w.matches('b').count(),
            w.matches('c').count(),
        );
        if na == nb && nb == nc {
            balanced += 1;
            let hits: Vec<f64> = tr
                .steps
                .iter()
                .flat_map(|s| s.cancelled.iter())
                .filter(|(c, _)| c.state == cancel_target)
                .map(|(_, m)| *m)
                .collect();
            let residue = tr
                .steps
                .iter()
                .flat_map(|s| s.psi.iter())
                .filter(|(c, _)| c.state == cancel_target)
                .map(|(_, a)| a.norm())
                .fold(0.0, f64::max);
            let here = hits.iter().copied().fold(residue, f64::max);
            worst_cancelled = worst_cancelled.max(here);
            if !close(p, three, 1e-9) || hits.is_empty() || here >= 1e-12 {
                bad += 1;
            }
        } else if oracle(&w) {
            exactly_one = exactly_one.min(p);
            if p < four - 1e-9 {
                bad += 1;
            }
        } else if p > three + 1e-9 {
            bad += 1;
        }
    }
    let (fast, time) = within(Duration::from_secs(60), t);
    Verdict::new(
        bad == 0 && fast,
        format!(
            "{balanced} balanced words at 3/7 with cancelled amplitude <= {worst_cancelled:.1e}; members reach {exactly_one:.9} (4/7 = {four:.9}); {bad} failures; {time}"
        ),
    )
}

/// Runs the DFA table directly.
fn dfa_accepts(dfa: &DfaSpec, word: &str) -> bool {
    let mut q = dfa.initial();
    for c in word.chars() {
        let i = dfa
            .sigma()
            .iter()
            .position(|s| *s == c.to_string())
            .unwrap();
        q = dfa.next(q, i);
    }
    dfa.is_final(q)
}

fn criterion_6() -> Verdict {
    let t = Instant::now();
    let words = words_upto(&['0', '1'], 8);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut ill_formed, mut wrong, mut fuzzy) = (0, 0, 0);
    let mut sizes = [0usize; 7];
    for _ in 0..50 {
        let n = rng.gen_range(1..=6);
        sizes[n] += 1;
        let dfa = random_dfa(n, &["0", "1"], rng.gen()).unwrap();
        let rpa: QpaSpec = compile(&dfa).unwrap();
        let s = check_simplified_summary(&rpa, &CheckOptions::default()).unwrap();
        if !s.passed || !rpa.validate_structure().is_empty() {
            ill_formed += 1;
            continue;
        }
        let rec = Recognizer::new(&rpa, RecognizeOptions::default()).unwrap();
        for w in &words {
            let r = rec.recognize(w).unwrap();
            if !zero_or_one(r.p_accept) || !zero_or_one(r.p_reject) {
                fuzzy += 1;
            }
            if (r.p_accept > 0.5) != dfa_accepts(&dfa, w) {
                wrong += 1;
            }
        }
    }
    let (fast, time) = within(Duration::from_secs(120), t);
    Verdict::new(
        ill_formed == 0 && wrong == 0 && fuzzy == 0 && fast,
        format!(
            "50 DFAs (sizes 1..6: {:?}), {} words each; {ill_formed} ill-formed, {wrong} disagreements, {fuzzy} non-0/1; {time}",
            &sizes[1..],
            words.len()
        ),
    )
}

fn criterion_7() -> Verdict {
    let t = Instant::now();
    let mut notes = Vec::new();

    let u = shift_fixture(200).unwrap();
    let r = check_truncated_unitarity(&u, 1e-12);
    let uu11 = row_inner(&u, 0, 0);
    let shift_ok = r.column_deviation < 1e-12 && (uu11 - Complex64::new(0.5, 0.0)).norm() < 1e-12;
    notes.push(format!(
        "shift: |U*U - I| {:.1e}, (UU*)11 = {}",
        r.column_deviation, uu11.re
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut bound_bad, mut equiv_bad) = (0, 0);
    let mut max_norm: f64 = 0.0;
    let (mut orthogonal, mut not_orthogonal) = (0, 0);
    for i in 0..100 {
        let n = rng.gen_range(6..=40);
        let layers = rng.gen_range(1..=4);
        let shape = match i % 3 {
            0 => IsometryShape::Unitary,
            1 => IsometryShape::ZeroRows(rng.gen_range(1..=4)),
            _ => IsometryShape::DroppedColumns(rng.gen_range(1..=n / 2)),
        };
        let m = random_banded_isometry(n, layers, shape, rng.gen()).unwrap();
        let bound = row_norm_bound_probe(&m, 1e-8).unwrap();
        max_norm = max_norm.max(bound);
        if bound > 1.0 + 1e-8 {
            bound_bad += 1;
        }
        let s = row_structure_probe(&m, 1e-8).unwrap();
        if s.rows_orthogonal != s.norms_zero_one {
            equiv_bad += 1;
        }
        if s.rows_orthogonal {
            orthogonal += 1;
        } else {
            not_orthogonal += 1;
        }
    }
    notes.push(format!(
        "100 isometries: max row norm {max_norm:.12}, {bound_bad} over 1; {orthogonal} orthogonal / {not_orthogonal} not, {equiv_bad} equivalence failures"
    ));

    let mut assoc: f64 = 0.0;
    for seed in 0..10 {
        let a = random_banded(80, 2, 3 * seed);
        let b = random_banded(80, 3, 3 * seed + 1);
        let c = random_banded(80, 1, 3 * seed + 2);
        assoc = assoc.max(banded_associativity_probe(&a, &b, &c).unwrap());
    }
    notes.push(format!("associativity deviation {assoc:.1e}"));
    let (fast, time) = within(Duration::from_secs(30), t);
    notes.push(time);
    Verdict::new(
        shift_ok
            && bound_bad == 0
            && equiv_bad == 0
            && orthogonal > 0
            && not_orthogonal > 0
            && assoc < 1e-12
            && fast,
        notes.join("; "),
    )
}

fn criterion_8() -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, e) in zoo::entries().iter().enumerate() {
        let rec = Recognizer::new(&e.spec, RecognizeOptions::default()).unwrap();
        let mut worst: f64 = 0.0;
        let mut steps = 0;
        for w in random_words(&sigma_chars(&e.spec), 10, 200, 800 + k as u64) {
            rec.run(&w, |s| {
                steps += 1;
                worst = worst.max((s.total() - 1.0).abs());
            })
            .unwrap();
        }
        ok &= worst <= 1e-9;
        notes.push(format!("{}: {steps} steps, max drift {worst:.1e}", e.name));
    }
    let (fast, time) = within(Duration::from_secs(60), t);
    notes.push(time);
    Verdict::new(ok && fast, notes.join("; "))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let sanity = recognize(&zoo::l1_spec(), "1", RecognizeOptions::default()).unwrap();
    assert!(close(sanity.p_accept, 1.0, 1e-12));

    let criteria: [Criterion; 8] = [
        (
            "well-formedness of L1, L2 and the non-unitary example",
            criterion_1,
        ),
        ("checker and truncated matrix agree", criterion_2),
        ("RPA probability-1 recognition of L1 and L2", criterion_3),
        ("L3 with probability 2/3", criterion_4),
        ("L5 interference", criterion_5),
        ("DFA to RPA compiler", criterion_6),
        ("matrix properties", criterion_7),
        ("probability conservation", criterion_8),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let v = run();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {tag}: {title} -- {}", i + 1, v.detail);
        if !v.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
