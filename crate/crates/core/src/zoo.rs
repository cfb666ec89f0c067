//! Ready-made automata: two reversible machines, two bounded-error ones,
//! and a couple of deliberately broken fixtures.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::model::{Direction, Kind, QpaSpec, SpecBuilder};

/// A shipped automaton together with the language it is meant to recognize.
#[derive(Clone, Debug)]
pub struct ZooEntry {
    pub name: &'static str,
    pub language: &'static str,
    pub spec: QpaSpec,
    /// Membership test for the language.
    pub oracle: fn(&str) -> bool,
    /// Probability with which members are accepted.
    pub claimed_probability: f64,
}

impl ZooEntry {
    pub fn accepts(&self, word: &str) -> bool {
        (self.oracle)(word)
    }

    /// Input alphabet as single characters.
    pub fn sigma(&self) -> &[String] {
        self.spec.alphabets().sigma()
    }
}

fn count(word: &str, c: char) -> usize {
    word.chars().filter(|&x| x == c).count()
}

pub fn l1_oracle(word: &str) -> bool {
    word.ends_with('1')
}

pub fn l2_oracle(word: &str) -> bool {
    count(word, 'a') == count(word, 'b')
}

pub fn l3_oracle(word: &str) -> bool {
    let a = count(word, 'a');
    a == count(word, 'b') && a == count(word, 'c')
}

pub fn l5_oracle(word: &str) -> bool {
    let a = count(word, 'a');
    (a == count(word, 'b')) != (a == count(word, 'c'))
}

const STACK: [&str; 3] = ["Z0", "1", "2"];

fn push(tau: &str, extra: &str) -> String {
    if extra.is_empty() {
        tau.to_string()
    } else {
        format!("{tau} {extra}")
    }
}

/// Six-state reversible machine for words ending in 1.
pub fn l1_spec() -> QpaSpec {
    let mut b = SpecBuilder::new(Kind::Reversible, &["0", "1"], &["0", "1"]);
    b.state("q0", Direction::Advance)
        .state("q1", Direction::Advance)
        .state("q2", Direction::Stay)
        .state("q3", Direction::Stay)
        .state("q4", Direction::Stay)
        .state("q5", Direction::Stay)
        .initial("q0")
        .accepting("q5")
        .rejecting("q4");
    let taus = ["Z0", "0", "1"];
    for q in ["q0", "q1", "q2", "q3", "q4", "q5"] {
        for t in taus {
            b.rule(q, "#", t, q, t, "1");
        }
    }
    for t in taus {
        b.rule("q0", "0", t, "q0", &push(t, "0"), "1")
            .rule("q1", "0", t, "q0", &push(t, "1"), "1")
            .rule("q0", "1", t, "q1", &push(t, "0"), "1")
            .rule("q1", "1", t, "q1", &push(t, "1"), "1")
            .rule("q0", "$", t, "q4", t, "1")
            .rule("q1", "$", t, "q5", t, "1")
            .rule("q2", "1", t, "q0", t, "1")
            .rule("q3", "0", t, "q1", t, "1")
            .rule("q2", "$", t, "q2", t, "1")
            .rule("q3", "$", t, "q3", t, "1")
            .rule("q4", "$", t, "q0", t, "1")
            .rule("q5", "$", t, "q1", t, "1");
        for s in ["0", "1"] {
            b.rule("q4", s, t, "q4", t, "1")
                .rule("q5", s, t, "q5", t, "1");
        }
    }
    b.rule("q2", "0", "Z0", "q0", "Z0", "1")
        .rule("q3", "1", "Z0", "q1", "Z0", "1")
        .rule("q2", "0", "0", "q2", "", "1")
        .rule("q2", "0", "1", "q3", "", "1")
        .rule("q3", "1", "0", "q2", "", "1")
        .rule("q3", "1", "1", "q3", "", "1");
    b.build().expect("L1 table is consistent")
}

fn l2_builder(on_dollar_from_base: &str) -> SpecBuilder {
    let mut b = SpecBuilder::new(Kind::Reversible, &["a", "b"], &["1", "2"]);
    b.state("q0", Direction::Advance)
        .state("q1", Direction::Stay)
        .state("q2", Direction::Stay)
        .state("q3", Direction::Stay)
        .initial("q0")
        .accepting("q2")
        .rejecting("q3");
    for q in ["q0", "q1", "q2", "q3"] {
        for t in STACK {
            b.rule(q, "#", t, q, t, "1");
        }
    }
    b.rule("q0", "a", "Z0", "q0", "Z0 1", "1")
        .rule("q0", "b", "Z0", "q0", "Z0 2", "1")
        .rule("q0", "$", "Z0", "q2", on_dollar_from_base, "1")
        .rule("q0", "a", "1", "q0", "1 1", "1")
        .rule("q0", "b", "1", "q1", "", "1")
        .rule("q0", "$", "1", "q3", "1", "1")
        .rule("q0", "a", "2", "q1", "", "1")
        .rule("q0", "b", "2", "q0", "2 2", "1")
        .rule("q0", "$", "2", "q3", "2", "1")
        .rule("q1", "a", "Z0", "q0", "Z0", "1")
        .rule("q1", "b", "Z0", "q0", "Z0", "1");
    for t in STACK {
        b.rule("q1", "$", t, "q1", t, "1");
    }
    b.rule("q1", "a", "1", "q3", "1 2", "1")
        .rule("q1", "b", "1", "q0", "1", "1")
        .rule("q1", "a", "2", "q0", "2", "1")
        .rule("q1", "b", "2", "q3", "2 1", "1")
        .rule("q2", "a", "Z0", "q3", "Z0 2", "1")
        .rule("q2", "b", "Z0", "q3", "Z0 1", "1")
        .rule("q2", "$", "Z0", "q0", "Z0", "1")
        .rule("q2", "a", "1", "q2", "", "1")
        .rule("q2", "b", "1", "q0", "1 2", "1")
        .rule("q2", "$", "1", "q0", "1", "1")
        .rule("q2", "a", "2", "q0", "2 1", "1")
        .rule("q2", "b", "2", "q2", "", "1")
        .rule("q2", "$", "2", "q0", "2", "1");
    for s in ["a", "b", "$"] {
        b.rule("q3", s, "Z0", "q3", "Z0", "1");
    }
    b.rule("q3", "a", "1", "q3", "1", "1")
        .rule("q3", "b", "1", "q3", "1 1", "1")
        .rule("q3", "$", "1", "q2", "1", "1")
        .rule("q3", "a", "2", "q3", "2 2", "1")
        .rule("q3", "b", "2", "q3", "2", "1")
        .rule("q3", "$", "2", "q2", "2", "1");
    b
}

/// Four-state reversible machine for `|w|_a = |w|_b`.
///
/// On `$` with an empty stack, `q0` moves to the accepting `q2` keeping
/// the stack as is.
pub fn l2_spec() -> QpaSpec {
    l2_builder("Z0").build().expect("L2 table is consistent")
}

/// The L2 table with `q0` pushing `1` on its way to `q2` at the end marker.
/// That entry collides with `q3`'s `$` column, so the spec fails the row
/// norm and separability conditions.
pub fn l2_push_collision_spec() -> QpaSpec {
    l2_builder("Z0 1").build().expect("L2 table is consistent")
}

/// One state that pushes on every move and never pops: its columns are
/// orthonormal but nothing ever maps onto a configuration whose stack is
/// just `Z0`.
pub fn nonunitary_example_spec() -> QpaSpec {
    let mut b = SpecBuilder::new(Kind::General, &["1"], &["1"]);
    b.plain_state("q").initial("q");
    for s in ["#", "1", "$"] {
        b.rule_dir("q", s, "Z0", "q", Direction::Advance, "Z0 1", "1")
            .rule_dir("q", s, "1", "q", Direction::Advance, "1 1", "1");
    }
    b.build().expect("example table is consistent")
}

/// Reversible sub-machine comparing the number of `x`s against the number
/// of `y`s. Its states are `<prefix>q0` .. `<prefix>q3`; `q2` accepts and
/// `q3` rejects. Symbols in `ignore` leave every state and stack alone.
///
/// The gadget covers every input symbol except `#`, which the enclosing
/// machine wires up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparatorGadget {
    prefix: String,
    x: String,
    y: String,
    ignore: Vec<String>,
}

impl ComparatorGadget {
    pub fn new(prefix: &str, x: &str, y: &str, ignore: &[&str]) -> Result<Self> {
        if x == y {
            return Err(Error::SymbolRoles(format!("`{x}` is compared with itself")));
        }
        let mut seen = BTreeSet::new();
        for s in ignore {
            if *s == x || *s == y || !seen.insert(*s) {
                return Err(Error::SymbolRoles(format!("`{s}` has more than one role")));
            }
        }
        Ok(ComparatorGadget {
            prefix: prefix.to_string(),
            x: x.to_string(),
            y: y.to_string(),
            ignore: ignore.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn state(&self, i: usize) -> String {
        format!("{}q{i}", self.prefix)
    }

    pub fn start(&self) -> String {
        self.state(0)
    }

    pub fn accept(&self) -> String {
        self.state(2)
    }

    pub fn reject(&self) -> String {
        self.state(3)
    }

    pub fn states(&self) -> [String; 4] {
        [self.state(0), self.state(1), self.state(2), self.state(3)]
    }

    /// The input alphabet this gadget reads, sorted.
    pub fn sigma(&self) -> Vec<String> {
        let mut s = vec![self.x.clone(), self.y.clone()];
        s.extend(self.ignore.iter().cloned());
        s.sort();
        s
    }

    /// Declares the four states. Marking `q2`/`q3` as accepting or rejecting
    /// is left to the caller.
    pub fn declare(&self, b: &mut SpecBuilder) {
        b.state(&self.state(0), Direction::Advance)
            .state(&self.state(1), Direction::Stay)
            .state(&self.state(2), Direction::Stay)
            .state(&self.state(3), Direction::Stay);
    }

    /// Adds the rules on `x`, `y` and the ignored symbols.
    pub fn install_body(&self, b: &mut SpecBuilder) {
        let [q0, q1, q2, q3] = self.states();
        let (x, y) = (self.x.as_str(), self.y.as_str());
        b.rule(&q0, x, "Z0", &q0, "Z0 1", "1")
            .rule(&q0, y, "Z0", &q0, "Z0 2", "1")
            .rule(&q0, x, "1", &q0, "1 1", "1")
            .rule(&q0, y, "1", &q1, "", "1")
            .rule(&q0, x, "2", &q1, "", "1")
            .rule(&q0, y, "2", &q0, "2 2", "1")
            .rule(&q1, x, "Z0", &q0, "Z0", "1")
            .rule(&q1, y, "Z0", &q0, "Z0", "1")
            .rule(&q1, x, "1", &q3, "1 2", "1")
            .rule(&q1, y, "1", &q0, "1", "1")
            .rule(&q1, x, "2", &q0, "2", "1")
            .rule(&q1, y, "2", &q3, "2 1", "1")
            .rule(&q2, x, "Z0", &q3, "Z0 2", "1")
            .rule(&q2, y, "Z0", &q3, "Z0 1", "1")
            .rule(&q2, x, "1", &q2, "", "1")
            .rule(&q2, y, "1", &q0, "1 2", "1")
            .rule(&q2, x, "2", &q0, "2 1", "1")
            .rule(&q2, y, "2", &q2, "", "1")
            .rule(&q3, x, "Z0", &q3, "Z0", "1")
            .rule(&q3, y, "Z0", &q3, "Z0", "1")
            .rule(&q3, x, "1", &q3, "1", "1")
            .rule(&q3, y, "1", &q3, "1 1", "1")
            .rule(&q3, x, "2", &q3, "2 2", "1")
            .rule(&q3, y, "2", &q3, "2", "1");
        for c in &self.ignore {
            for q in [&q0, &q1, &q2, &q3] {
                for t in STACK {
                    b.rule(q, c, t, q, t, "1");
                }
            }
        }
    }

    /// Adds the `$` rules except the two that start from an empty stack in
    /// `q0` and `q2`; see [`ComparatorGadget::install_end_from_base`].
    pub fn install_end_nonbase(&self, b: &mut SpecBuilder) {
        let [q0, q1, q2, q3] = self.states();
        for t in STACK {
            b.rule(&q1, "$", t, &q1, t, "1");
        }
        b.rule(&q3, "$", "Z0", &q3, "Z0", "1");
        for t in ["1", "2"] {
            b.rule(&q0, "$", t, &q3, t, "1")
                .rule(&q2, "$", t, &q0, t, "1")
                .rule(&q3, "$", t, &q2, t, "1");
        }
    }

    /// `q0 → q2` and `q2 → q0` on `$` with an empty stack.
    pub fn install_end_from_base(&self, b: &mut SpecBuilder) {
        b.rule(&self.state(0), "$", "Z0", &self.state(2), "Z0", "1")
            .rule(&self.state(2), "$", "Z0", &self.state(0), "Z0", "1");
    }

    /// The gadget as a machine of its own, with identity moves on `#`.
    pub fn standalone(&self) -> Result<QpaSpec> {
        let sigma = self.sigma();
        let sigma: Vec<&str> = sigma.iter().map(String::as_str).collect();
        let mut b = SpecBuilder::new(Kind::Reversible, &sigma, &["1", "2"]);
        self.declare(&mut b);
        b.initial(&self.start())
            .accepting(&self.accept())
            .rejecting(&self.reject());
        for q in self.states() {
            for t in STACK {
                b.rule(&q, "#", t, &q, t, "1");
            }
        }
        self.install_body(&mut b);
        self.install_end_nonbase(&mut b);
        self.install_end_from_base(&mut b);
        b.build()
    }
}

/// Wires a real orthogonal 3×3 block on `#`: `sources[j]` goes to
/// `targets[i]` with amplitude `block[j][i]`, and each target goes back to
/// the matching source with amplitude 1. Every stack top is covered.
fn split_on_left_marker(
    b: &mut SpecBuilder,
    sources: [&str; 3],
    targets: [&str; 3],
    block: [[&str; 3]; 3],
) {
    for t in STACK {
        for (j, src) in sources.iter().enumerate() {
            for (i, dst) in targets.iter().enumerate() {
                if block[j][i] != "0" {
                    b.rule(src, "#", t, dst, t, block[j][i]);
                }
            }
        }
        for (dst, src) in targets.iter().zip(sources) {
            b.rule(dst, "#", t, src, t, "1");
        }
    }
}

fn identity_on(b: &mut SpecBuilder, states: &[&str], symbols: &[&str]) {
    for q in states {
        for s in symbols {
            for t in STACK {
                b.rule(q, s, t, q, t, "1");
            }
        }
    }
}

/// Bounded-error machine for `|w|_a = |w|_b = |w|_c`.
///
/// On `#` the start state splits evenly into an a/b comparator, a b/c
/// comparator and an immediate reject. The other two columns of the split
/// belong to auxiliary states that are never reached.
pub fn l3_spec() -> QpaSpec {
    let ab = ComparatorGadget::new("ab.", "a", "b", &["c"]).expect("distinct roles");
    let bc = ComparatorGadget::new("bc.", "b", "c", &["a"]).expect("distinct roles");
    let mut b = SpecBuilder::new(Kind::Simplified, &["a", "b", "c"], &["1", "2"]);
    b.state("s0", Direction::Stay)
        .state("x1", Direction::Stay)
        .state("x2", Direction::Stay)
        .state("rej", Direction::Stay);
    ab.declare(&mut b);
    bc.declare(&mut b);
    b.initial("s0")
        .accepting(&ab.accept())
        .accepting(&bc.accept())
        .rejecting(&ab.reject())
        .rejecting(&bc.reject())
        .rejecting("rej");
    let (ab0, bc0) = (ab.start(), bc.start());
    split_on_left_marker(
        &mut b,
        ["s0", "x1", "x2"],
        [&ab0, &bc0, "rej"],
        [
            ["sqrt(1/3)", "sqrt(1/3)", "sqrt(1/3)"],
            ["sqrt(1/2)", "-sqrt(1/2)", "0"],
            ["sqrt(1/6)", "sqrt(1/6)", "-sqrt(2/3)"],
        ],
    );
    for g in [&ab, &bc] {
        for q in &g.states()[1..] {
            for t in STACK {
                b.rule(q, "#", t, q, t, "1");
            }
        }
        g.install_body(&mut b);
        g.install_end_nonbase(&mut b);
        g.install_end_from_base(&mut b);
    }
    identity_on(&mut b, &["s0", "x1", "x2", "rej"], &["a", "b", "c", "$"]);
    b.build().expect("L3 table is consistent")
}

/// Bounded-error machine for `|w|_a = |w|_b` xor `|w|_a = |w|_c`.
///
/// On `#` the start state branches with amplitudes √(2/7) into an a/b
/// comparator, −√(2/7) into an a/c comparator and √(3/7) into an accepting
/// state. A comparator that reaches `$` with an empty stack enters a
/// Hadamard mix of the two comparators' `q2` states; only `ab.q2` accepts.
/// When both comparisons succeed the two contributions to `ab.q2` cancel.
pub fn l5_spec() -> QpaSpec {
    let ab = ComparatorGadget::new("ab.", "a", "b", &["c"]).expect("distinct roles");
    let ac = ComparatorGadget::new("ac.", "a", "c", &["b"]).expect("distinct roles");
    let mut b = SpecBuilder::new(Kind::Simplified, &["a", "b", "c"], &["1", "2"]);
    b.state("s0", Direction::Stay)
        .state("x1", Direction::Stay)
        .state("x2", Direction::Stay)
        .state("acc", Direction::Stay);
    ab.declare(&mut b);
    ac.declare(&mut b);
    b.initial("s0")
        .accepting("acc")
        .accepting(&ab.accept())
        .rejecting(&ac.accept())
        .rejecting(&ab.reject())
        .rejecting(&ac.reject());
    let (ab0, ac0) = (ab.start(), ac.start());
    split_on_left_marker(
        &mut b,
        ["s0", "x1", "x2"],
        [&ab0, &ac0, "acc"],
        [
            ["sqrt(2/7)", "-sqrt(2/7)", "sqrt(3/7)"],
            ["sqrt(1/2)", "sqrt(1/2)", "0"],
            ["-sqrt(3/14)", "sqrt(3/14)", "sqrt(4/7)"],
        ],
    );
    for g in [&ab, &ac] {
        for q in &g.states()[1..] {
            for t in STACK {
                b.rule(q, "#", t, q, t, "1");
            }
        }
        g.install_body(&mut b);
        g.install_end_nonbase(&mut b);
    }
    let (ab2, ac2) = (ab.accept(), ac.accept());
    b.rule(&ab0, "$", "Z0", &ab2, "Z0", "sqrt(1/2)")
        .rule(&ab0, "$", "Z0", &ac2, "Z0", "sqrt(1/2)")
        .rule(&ac0, "$", "Z0", &ab2, "Z0", "sqrt(1/2)")
        .rule(&ac0, "$", "Z0", &ac2, "Z0", "-sqrt(1/2)")
        .rule(&ab2, "$", "Z0", &ab0, "Z0", "1")
        .rule(&ac2, "$", "Z0", &ac0, "Z0", "1");
    identity_on(&mut b, &["s0", "x1", "x2", "acc"], &["a", "b", "c", "$"]);
    b.build().expect("L5 table is consistent")
}

pub fn l1_rpa() -> ZooEntry {
    ZooEntry {
        name: "l1",
        language: "(0,1)*1",
        spec: l1_spec(),
        oracle: l1_oracle,
        claimed_probability: 1.0,
    }
}

pub fn l2_rpa() -> ZooEntry {
    ZooEntry {
        name: "l2",
        language: "|w|_a = |w|_b over {a,b}",
        spec: l2_spec(),
        oracle: l2_oracle,
        claimed_probability: 1.0,
    }
}

pub fn l3_qpa() -> ZooEntry {
    ZooEntry {
        name: "l3",
        language: "|w|_a = |w|_b = |w|_c over {a,b,c}",
        spec: l3_spec(),
        oracle: l3_oracle,
        claimed_probability: 2.0 / 3.0,
    }
}

pub fn l5_qpa() -> ZooEntry {
    ZooEntry {
        name: "l5",
        language: "|w|_a = |w|_b xor |w|_a = |w|_c over {a,b,c}",
        spec: l5_spec(),
        oracle: l5_oracle,
        claimed_probability: 4.0 / 7.0,
    }
}

/// The four language entries, built once.
pub fn entries() -> &'static [ZooEntry] {
    static ENTRIES: OnceLock<Vec<ZooEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| vec![l1_rpa(), l2_rpa(), l3_qpa(), l5_qpa()])
}

pub fn entry(name: &str) -> Option<&'static ZooEntry> {
    entries().iter().find(|e| e.name == name)
}

/// Specs without a language attached, exported for experiments.
pub const FIXTURES: [&str; 2] = ["l2-push-collision", "nonunitary-example"];

/// Any exportable spec by name: an entry or a fixture.
pub fn spec_by_name(name: &str) -> Option<QpaSpec> {
    if let Some(e) = entry(name) {
        return Some(e.spec.clone());
    }
    match name {
        "l2-push-collision" => Some(l2_push_collision_spec()),
        "nonunitary-example" => Some(nonunitary_example_spec()),
        _ => None,
    }
}
