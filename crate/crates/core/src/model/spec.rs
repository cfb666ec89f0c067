use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabets, Direction, InputSym, StackSym, StateId};
use super::document::{QpaDocument, TransitionDoc};
use crate::amplitude::Amplitude;
use crate::error::{Error, Result};

/// Which well-formedness suite a spec is written against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Full transition function δ with an explicit direction per entry.
    General,
    /// Every target state fixes the head direction through `D`.
    Simplified,
    /// Simplified, all amplitudes exactly 1, one entry per source triple.
    Reversible,
}

/// `(q, d, ω, amplitude)` by name.
pub type NamedMove = (String, Direction, Vec<String>, Amplitude);

/// Argument tuple of δ: `(q1, σ, τ, q, d, ω)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionKey {
    pub from: StateId,
    pub input: InputSym,
    pub top: StackSym,
    pub to: StateId,
    pub dir: Direction,
    pub push: Vec<StackSym>,
}

/// One outgoing entry of a column `(q1, σ, τ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub to: StateId,
    pub dir: Direction,
    pub push: Vec<StackSym>,
    pub amp: Complex64,
}

/// One incoming entry for a `(σ, q, d)` target, used to invert δ.
#[derive(Clone, Debug, PartialEq)]
pub struct IncomingEntry {
    pub from: StateId,
    pub top: StackSym,
    pub push: Vec<StackSym>,
    pub amp: Complex64,
}

/// A quantum pushdown automaton as a finite table of transition amplitudes.
///
/// Immutable after construction. States and alphabets are kept in sorted
/// order and every iteration over them is deterministic.
#[derive(Clone, Debug)]
pub struct QpaSpec {
    kind: Kind,
    alphabets: Alphabets,
    states: Vec<String>,
    initial: StateId,
    accepting: BTreeSet<StateId>,
    rejecting: BTreeSet<StateId>,
    direction: Vec<Option<Direction>>,
    delta: BTreeMap<TransitionKey, Amplitude>,
    columns: HashMap<(StateId, InputSym, StackSym), Vec<Entry>>,
    incoming: HashMap<(InputSym, StateId, Direction), Vec<IncomingEntry>>,
}

impl QpaSpec {
    pub fn from_document(doc: &QpaDocument) -> Result<Self> {
        let alphabets = Alphabets::new(&doc.input_alphabet, &doc.stack_alphabet)?;
        let mut states = doc.states.clone();
        states.sort();
        for w in states.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Duplicate {
                    what: "state",
                    name: w[0].clone(),
                });
            }
        }
        let lookup = |name: &str| -> Result<StateId> {
            states
                .binary_search_by(|s| s.as_str().cmp(name))
                .map(StateId)
                .map_err(|_| Error::UnknownState(name.to_string()))
        };
        let initial = lookup(&doc.initial)?;
        let accepting = doc
            .accepting
            .iter()
            .map(|s| lookup(s))
            .collect::<Result<BTreeSet<_>>>()?;
        let rejecting = doc
            .rejecting
            .iter()
            .map(|s| lookup(s))
            .collect::<Result<BTreeSet<_>>>()?;
        let mut direction = vec![None; states.len()];
        for (name, d) in &doc.direction {
            direction[lookup(name)?.0] = Some(*d);
        }
        let mut delta = BTreeMap::new();
        for t in &doc.transitions {
            let key = TransitionKey {
                from: lookup(&t.from)?,
                input: alphabets.input_id(&t.input)?,
                top: alphabets.stack_id(&t.stack_top)?,
                to: lookup(&t.to)?,
                dir: t.dir,
                push: alphabets.parse_push(&t.push)?,
            };
            if delta.insert(key, t.amp.clone()).is_some() {
                return Err(Error::Duplicate {
                    what: "transition",
                    name: format!("{}", TransitionDocDisplay(t)),
                });
            }
        }
        Ok(QpaSpec::assemble(
            doc.kind, alphabets, states, initial, accepting, rejecting, direction, delta,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: Kind,
        alphabets: Alphabets,
        states: Vec<String>,
        initial: StateId,
        accepting: BTreeSet<StateId>,
        rejecting: BTreeSet<StateId>,
        direction: Vec<Option<Direction>>,
        delta: BTreeMap<TransitionKey, Amplitude>,
    ) -> Self {
        let mut columns: HashMap<_, Vec<Entry>> = HashMap::new();
        let mut incoming: HashMap<_, Vec<IncomingEntry>> = HashMap::new();
        for (k, a) in &delta {
            if a.is_zero() {
                continue;
            }
            columns
                .entry((k.from, k.input, k.top))
                .or_default()
                .push(Entry {
                    to: k.to,
                    dir: k.dir,
                    push: k.push.clone(),
                    amp: a.value(),
                });
            incoming
                .entry((k.input, k.to, k.dir))
                .or_default()
                .push(IncomingEntry {
                    from: k.from,
                    top: k.top,
                    push: k.push.clone(),
                    amp: a.value(),
                });
        }
        QpaSpec {
            kind,
            alphabets,
            states,
            initial,
            accepting,
            rejecting,
            direction,
            delta,
            columns,
            incoming,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: QpaDocument =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        QpaSpec::from_document(&doc)
    }

    pub fn to_document(&self) -> QpaDocument {
        let names = |set: &BTreeSet<StateId>| {
            set.iter()
                .map(|&s| self.state_name(s).to_string())
                .collect()
        };
        QpaDocument {
            kind: self.kind,
            states: self.states.clone(),
            input_alphabet: self.alphabets.sigma().to_vec(),
            stack_alphabet: self.alphabets.stack().to_vec(),
            initial: self.state_name(self.initial).to_string(),
            accepting: names(&self.accepting),
            rejecting: names(&self.rejecting),
            direction: self
                .direction
                .iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|d| (self.states[i].clone(), d)))
                .collect(),
            transitions: self
                .delta
                .iter()
                .map(|(k, a)| TransitionDoc {
                    from: self.state_name(k.from).to_string(),
                    input: self.alphabets.input_name(k.input).to_string(),
                    stack_top: self.alphabets.stack_name(k.top).to_string(),
                    to: self.state_name(k.to).to_string(),
                    dir: k.dir,
                    push: self.alphabets.render_push(&k.push),
                    amp: a.clone(),
                })
                .collect(),
        }
    }

    /// Pretty JSON with a trailing newline; stable across runs.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document())
            .expect("document serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn alphabets(&self) -> &Alphabets {
        &self.alphabets
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + Clone {
        (0..self.states.len()).map(StateId)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0]
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.states
            .binary_search_by(|s| s.as_str().cmp(name))
            .map(StateId)
            .map_err(|_| Error::UnknownState(name.to_string()))
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    pub fn rejecting(&self) -> &BTreeSet<StateId> {
        &self.rejecting
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains(&q)
    }

    pub fn is_rejecting(&self, q: StateId) -> bool {
        self.rejecting.contains(&q)
    }

    /// `D(q)` when declared.
    pub fn direction_of(&self, q: StateId) -> Option<Direction> {
        self.direction[q.0]
    }

    /// The stored table, zero entries included.
    pub fn delta(&self) -> &BTreeMap<TransitionKey, Amplitude> {
        &self.delta
    }

    /// Nonzero entries of the column `(q1, σ, τ)` in key order.
    pub fn column(&self, q1: StateId, sigma: InputSym, tau: StackSym) -> &[Entry] {
        self.columns
            .get(&(q1, sigma, tau))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Nonzero entries that read `σ` and move to state `q` with direction `d`.
    pub fn incoming(&self, sigma: InputSym, q: StateId, d: Direction) -> &[IncomingEntry] {
        self.incoming
            .get(&(sigma, q, d))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Name-level column accessor.
    pub fn transitions_from(&self, q1: &str, sigma: &str, tau: &str) -> Result<Vec<NamedMove>> {
        let q1 = self.state_id(q1)?;
        let sigma = self.alphabets.input_id(sigma)?;
        let tau = self.alphabets.stack_id(tau)?;
        Ok(self
            .delta
            .range(
                TransitionKey {
                    from: q1,
                    input: sigma,
                    top: tau,
                    to: StateId(0),
                    dir: Direction::Stay,
                    push: vec![],
                }..,
            )
            .take_while(|(k, _)| k.from == q1 && k.input == sigma && k.top == tau)
            .filter(|(_, a)| !a.is_zero())
            .map(|(k, a)| {
                (
                    self.state_name(k.to).to_string(),
                    k.dir,
                    k.push
                        .iter()
                        .map(|&s| self.alphabets.stack_name(s).to_string())
                        .collect(),
                    a.clone(),
                )
            })
            .collect())
    }

    /// Human-readable rendering of a key, e.g. `δ(q0, a, Z0, q0, advance, Z0 1)`.
    pub fn render_key(&self, k: &TransitionKey) -> String {
        let push = self.alphabets.render_push(&k.push);
        format!(
            "δ({}, {}, {}, {}, {}, {})",
            self.state_name(k.from),
            self.alphabets.input_name(k.input),
            self.alphabets.stack_name(k.top),
            self.state_name(k.to),
            k.dir,
            if push.is_empty() { "ε" } else { &push }
        )
    }

    /// Same table read as a general QPA (kind set to `general`).
    pub fn as_general(&self) -> QpaSpec {
        let mut out = self.clone();
        out.kind = Kind::General;
        out
    }

    /// Validates the structural restrictions on δ and on the state sets.
    pub fn validate_structure(&self) -> Vec<StructureViolation> {
        validate_structure(self)
    }
}

struct TransitionDocDisplay<'a>(&'a TransitionDoc);

impl fmt::Display for TransitionDocDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.0;
        write!(
            f,
            "δ({}, {}, {}, {}, {}, {})",
            t.from, t.input, t.stack_top, t.to, t.dir, t.push
        )
    }
}

/// What a structural violation breaks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    AcceptRejectOverlap,
    PushTooLong,
    PushPrefixMismatch,
    BaseNotPreserved,
    BaseAbovePrefix,
    AmplitudeModulus,
    MissingDirection,
    DirectionMismatch,
    NonUnitAmplitude,
    NotAFunction,
}

impl ViolationKind {
    pub fn message(&self) -> &'static str {
        match self {
            ViolationKind::AcceptRejectOverlap => "state is both accepting and rejecting",
            ViolationKind::PushTooLong => "|ω| > 2",
            ViolationKind::PushPrefixMismatch => "ω₁ ≠ β",
            ViolationKind::BaseNotPreserved => "Z0 pop removes base",
            ViolationKind::BaseAbovePrefix => "Z0 pushed above the base",
            ViolationKind::AmplitudeModulus => "amplitude modulus exceeds 1",
            ViolationKind::MissingDirection => "direction function undefined for state",
            ViolationKind::DirectionMismatch => "d ≠ D(q)",
            ViolationKind::NonUnitAmplitude => "reversible amplitude is not exactly 1",
            ViolationKind::NotAFunction => "reversible triple has more than one entry",
        }
    }
}

/// One broken invariant, naming the offending key or state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureViolation {
    pub kind: ViolationKind,
    pub subject: String,
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.kind.message())
    }
}

/// Default modulus tolerance for stored amplitudes.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-9;

pub fn validate_structure(spec: &QpaSpec) -> Vec<StructureViolation> {
    let mut out = Vec::new();
    let ab = spec.alphabets();
    for q in spec.accepting.intersection(&spec.rejecting) {
        out.push(StructureViolation {
            kind: ViolationKind::AcceptRejectOverlap,
            subject: spec.state_name(*q).to_string(),
        });
    }
    let needs_direction = spec.kind != Kind::General;
    if needs_direction {
        for q in spec.states() {
            if spec.direction_of(q).is_none() {
                out.push(StructureViolation {
                    kind: ViolationKind::MissingDirection,
                    subject: spec.state_name(q).to_string(),
                });
            }
        }
    }
    let mut per_triple: BTreeMap<(StateId, InputSym, StackSym), usize> = BTreeMap::new();
    for (k, a) in &spec.delta {
        if a.is_zero() {
            continue;
        }
        let mut flag = |kind| {
            out.push(StructureViolation {
                kind,
                subject: spec.render_key(k),
            })
        };
        let tau = k.top;
        let push = &k.push;
        if push.len() > 2 {
            flag(ViolationKind::PushTooLong);
        } else if push.len() == 2 && push[0] != tau {
            flag(ViolationKind::PushPrefixMismatch);
        }
        if tau.is_base() {
            if push.first() != Some(&StackSym::BASE) {
                flag(ViolationKind::BaseNotPreserved);
            }
            if push.iter().skip(1).any(|s| s.is_base()) {
                flag(ViolationKind::BaseAbovePrefix);
            }
        } else if push.iter().any(|s| s.is_base()) {
            flag(ViolationKind::BaseAbovePrefix);
        }
        if a.norm() > 1.0 + AMPLITUDE_TOLERANCE {
            flag(ViolationKind::AmplitudeModulus);
        }
        if needs_direction {
            if let Some(d) = spec.direction_of(k.to) {
                if d != k.dir {
                    flag(ViolationKind::DirectionMismatch);
                }
            }
        }
        if spec.kind == Kind::Reversible {
            if !a.is_exact_one() {
                flag(ViolationKind::NonUnitAmplitude);
            }
            *per_triple.entry((k.from, k.input, k.top)).or_default() += 1;
        }
    }
    for ((q, s, t), n) in per_triple {
        if n > 1 {
            out.push(StructureViolation {
                kind: ViolationKind::NotAFunction,
                subject: format!(
                    "({}, {}, {})",
                    spec.state_name(q),
                    ab.input_name(s),
                    ab.stack_name(t)
                ),
            });
        }
    }
    out
}
