//! Compiles a total DFA into a reversible pushdown automaton.
//!
//! The RPA has a primed copy `q'` of every DFA state and uses DFA state
//! indices as stack symbols. Unprimed states run the DFA forward and push
//! the index of the state they leave; on `$` they move to their primed copy,
//! which halts. The remaining rules exist only to make every symbol act as a
//! bijection on (state, stack).

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{
    Alphabets, DfaSpec, Direction, Kind, QpaSpec, SpecBuilder, LEFT_MARKER, RIGHT_MARKER,
    STACK_BASE,
};

/// Bookkeeping produced alongside the compiled spec.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompilationMap {
    /// `(q, q')` in DFA state order.
    pub primed: Vec<(String, String)>,
    /// `(q, stack symbol)` in DFA state order.
    pub index: Vec<(String, String)>,
    /// `(q'_j, σ, i)` with `δ(q_i, σ) = q_j`.
    pub r_set: Vec<(String, String, String)>,
    /// `(q'_j, σ, i)` with `δ(q_i, σ) ≠ q_j`.
    pub r_bar_set: Vec<(String, String, String)>,
}

fn primed_names(states: &[String]) -> Vec<String> {
    let mut taken: BTreeSet<String> = states.iter().cloned().collect();
    states
        .iter()
        .map(|s| {
            let mut p = format!("{s}'");
            while taken.contains(&p) {
                p.push('\'');
            }
            taken.insert(p.clone());
            p
        })
        .collect()
}

pub fn compile(dfa: &DfaSpec) -> Result<QpaSpec> {
    Ok(compile_with_map(dfa)?.0)
}

pub fn compile_with_map(dfa: &DfaSpec) -> Result<(QpaSpec, CompilationMap)> {
    let q = dfa.states();
    let n = q.len();
    let qp = primed_names(q);
    let t: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let sigma: Vec<&str> = dfa.sigma().iter().map(String::as_str).collect();
    let t_refs: Vec<&str> = t.iter().map(String::as_str).collect();
    let mut delta: Vec<&str> = vec![STACK_BASE];
    delta.extend(&t_refs);

    let mut b = SpecBuilder::new(Kind::Reversible, &sigma, &t_refs);
    for s in q {
        b.state(s, Direction::Advance);
    }
    for s in &qp {
        b.state(s, Direction::Stay);
    }
    b.initial(&q[dfa.initial()]);
    for (i, s) in qp.iter().enumerate() {
        if dfa.is_final(i) {
            b.accepting(s);
        } else {
            b.rejecting(s);
        }
    }

    let mut r_set = Vec::new();
    let mut r_bar_set = Vec::new();
    for (si, &sym) in sigma.iter().enumerate() {
        for i in 0..n {
            // rule 1
            let j = dfa.next(i, si);
            for &tau in &delta {
                b.rule(&q[i], sym, tau, &q[j], &format!("{tau} {i}"), "1");
            }
        }
        for j in 0..n {
            for i in 0..n {
                let entry = (qp[j].clone(), sym.to_string(), t[i].clone());
                if dfa.next(i, si) == j {
                    // rule 2
                    b.rule(&qp[j], sym, &t[i], &qp[i], "", "1");
                    r_set.push(entry);
                } else {
                    // rule 3
                    b.rule(&qp[j], sym, &t[i], &q[j], &t[i], "1");
                    r_bar_set.push(entry);
                }
            }
            // rule 4
            b.rule(&qp[j], sym, STACK_BASE, &q[j], STACK_BASE, "1");
        }
    }
    for &tau in &delta {
        // rule 5
        for s in q.iter().chain(&qp) {
            b.rule(s, LEFT_MARKER, tau, s, tau, "1");
        }
        // rules 6 and 7
        for i in 0..n {
            b.rule(&q[i], RIGHT_MARKER, tau, &qp[i], tau, "1").rule(
                &qp[i],
                RIGHT_MARKER,
                tau,
                &q[i],
                tau,
                "1",
            );
        }
    }

    let map = CompilationMap {
        primed: q.iter().cloned().zip(qp.iter().cloned()).collect(),
        index: q.iter().cloned().zip(t.iter().cloned()).collect(),
        r_set,
        r_bar_set,
    };
    Ok((b.build()?, map))
}

/// Runs the DFA directly. Words are tokenized like automaton input words.
pub fn simulate_dfa(dfa: &DfaSpec, word: &str) -> Result<bool> {
    let alphabets = Alphabets::new(dfa.sigma(), &[])?;
    let mut state = dfa.initial();
    for s in alphabets.parse_word(word)? {
        state = dfa.next(state, s.0 - 1);
    }
    Ok(dfa.is_final(state))
}

/// A random total DFA with states `s0..s{n-1}`, initial `s0`, each state
/// final with probability 1/2.
pub fn random_dfa(n: usize, sigma: &[&str], seed: u64) -> Result<DfaSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let trans: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            (0..sigma.len())
                .map(|_| rng.gen_range(0..n.max(1)))
                .collect()
        })
        .collect();
    let finals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    DfaSpec::from_table(&refs, sigma, 0, &finals, &trans)
}
