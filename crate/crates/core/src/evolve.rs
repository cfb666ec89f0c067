//! Configuration-space simulation and the measure-many recognition loop.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Direction, InputSym, QpaSpec, StackSym, StateId};
use crate::wellformed::{check_all, CheckOptions, ConditionSummary};

/// Entries with modulus below this are dropped after every step.
pub const PRUNE_EPS: f64 = 1e-15;
/// Recognition stops once the residual squared norm falls below this.
pub const HALT_EPS: f64 = 1e-12;

/// The framed input `# x $` for one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeContext {
    framed: Vec<InputSym>,
}

impl TapeContext {
    pub fn new(spec: &QpaSpec, word: &str) -> Result<Self> {
        let word = spec.alphabets().parse_word(word)?;
        Ok(TapeContext::from_symbols(spec, &word))
    }

    /// Frames an already tokenized word. Markers inside `word` are the
    /// caller's problem.
    pub fn from_symbols(spec: &QpaSpec, word: &[InputSym]) -> Self {
        let a = spec.alphabets();
        let mut framed = Vec::with_capacity(word.len() + 2);
        framed.push(a.left_marker());
        framed.extend_from_slice(word);
        framed.push(a.right_marker());
        TapeContext { framed }
    }

    pub fn len(&self) -> usize {
        self.framed.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn word_len(&self) -> usize {
        self.framed.len() - 2
    }

    pub fn symbol(&self, head: usize) -> InputSym {
        self.framed[head]
    }

    pub fn symbols(&self) -> &[InputSym] {
        &self.framed
    }
}

/// `(state, head, stack)`; the stack is stored bottom first, so `stack[0]`
/// is always Z0 and the last element is the top.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub head: usize,
    pub stack: Vec<StackSym>,
}

impl Configuration {
    pub fn initial(spec: &QpaSpec) -> Self {
        Configuration {
            state: spec.initial(),
            head: 0,
            stack: vec![StackSym::BASE],
        }
    }

    pub fn top(&self) -> StackSym {
        *self.stack.last().expect("stack always holds Z0")
    }

    /// Z0 at the bottom and nowhere else.
    pub fn has_valid_stack(&self) -> bool {
        self.stack.first() == Some(&StackSym::BASE) && self.stack[1..].iter().all(|s| !s.is_base())
    }

    pub fn display<'a>(&'a self, spec: &'a QpaSpec) -> ConfigDisplay<'a> {
        ConfigDisplay { config: self, spec }
    }
}

pub struct ConfigDisplay<'a> {
    config: &'a Configuration,
    spec: &'a QpaSpec,
}

impl fmt::Display for ConfigDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            self.spec.state_name(self.config.state),
            self.config.head,
            self.spec.alphabets().render_push(&self.config.stack)
        )
    }
}

/// Sparse map from configurations to amplitudes, iterated in a fixed order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Superposition {
    amps: BTreeMap<Configuration, Complex64>,
}

impl Superposition {
    pub fn new() -> Self {
        Superposition::default()
    }

    pub fn basis(c: Configuration) -> Self {
        let mut s = Superposition::new();
        s.amps.insert(c, Complex64::new(1.0, 0.0));
        s
    }

    /// Adds `amp` to the entry for `c`.
    pub fn add(&mut self, c: Configuration, amp: Complex64) {
        *self.amps.entry(c).or_default() += amp;
    }

    pub fn get(&self, c: &Configuration) -> Complex64 {
        self.amps.get(c).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Configuration, &Complex64)> {
        self.amps.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .values()
            .map(|a| a.norm_sqr())
            .fold(0.0, |s, n| s + n)
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.amps.values_mut() {
            *a *= k;
        }
        out.prune(PRUNE_EPS);
        out
    }

    /// `self + other`, pruned.
    pub fn plus(&self, other: &Superposition) -> Self {
        let mut out = self.clone();
        for (c, a) in &other.amps {
            out.add(c.clone(), *a);
        }
        out.prune(PRUNE_EPS);
        out
    }

    pub fn prune(&mut self, eps: f64) {
        self.amps.retain(|_, a| a.norm() >= eps);
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Superposition) -> f64 {
        let mut worst: f64 = 0.0;
        for (c, a) in &self.amps {
            worst = worst.max((a - other.get(c)).norm());
        }
        for (c, b) in &other.amps {
            if !self.amps.contains_key(c) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }
}

impl FromIterator<(Configuration, Complex64)> for Superposition {
    fn from_iter<I: IntoIterator<Item = (Configuration, Complex64)>>(iter: I) -> Self {
        let mut s = Superposition::new();
        for (c, a) in iter {
            s.add(c, a);
        }
        s.prune(PRUNE_EPS);
        s
    }
}

/// `|q0 # x $, Z0⟩` with amplitude 1.
pub fn initial_superposition(spec: &QpaSpec, word: &str) -> Result<Superposition> {
    spec.alphabets().parse_word(word)?;
    Ok(Superposition::basis(Configuration::initial(spec)))
}

/// What to do with amplitude that advances past `$`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Overrun {
    #[default]
    Error,
    /// Drop it and account for it as lost probability.
    Discard,
}

/// Image of a superposition under one application of `U_A`.
#[derive(Clone, Debug, Default)]
pub struct Step {
    pub psi: Superposition,
    /// Squared norm of amplitude discarded at the tape end.
    pub lost: f64,
    /// Targets that received several contributions whose sum was pruned,
    /// with the modulus of that sum.
    pub cancelled: Vec<(Configuration, f64)>,
}

/// Successors of a single basis configuration, unsummed.
pub fn successors(
    spec: &QpaSpec,
    tape: &TapeContext,
    c: &Configuration,
) -> Result<Vec<(Configuration, Complex64)>> {
    let sigma = tape.symbol(c.head);
    let column = spec.column(c.state, sigma, c.top());
    let mut out = Vec::with_capacity(column.len());
    for e in column {
        let mut stack = Vec::with_capacity(c.stack.len() + 1);
        stack.extend_from_slice(&c.stack[..c.stack.len() - 1]);
        stack.extend_from_slice(&e.push);
        let next = Configuration {
            state: e.to,
            head: c.head + usize::from(e.dir == Direction::Advance),
            stack,
        };
        if next.stack.is_empty() || !next.has_valid_stack() {
            return Err(Error::StackBase {
                state: spec.state_name(c.state).to_string(),
            });
        }
        out.push((next, e.amp));
    }
    Ok(out)
}

pub fn step(
    spec: &QpaSpec,
    tape: &TapeContext,
    psi: &Superposition,
    overrun: Overrun,
) -> Result<Step> {
    let mut sums: BTreeMap<Configuration, (Complex64, u32)> = BTreeMap::new();
    let mut lost = 0.0;
    for (c, alpha) in psi.iter() {
        for (next, amp) in successors(spec, tape, c)? {
            let v = alpha * amp;
            if next.head >= tape.len() {
                match overrun {
                    Overrun::Error => {
                        return Err(Error::TapeOverrun {
                            state: spec.state_name(c.state).to_string(),
                        })
                    }
                    Overrun::Discard => {
                        lost += v.norm_sqr();
                        continue;
                    }
                }
            }
            let slot = sums.entry(next).or_default();
            slot.0 += v;
            slot.1 += 1;
        }
    }
    let mut out = Step {
        lost,
        ..Step::default()
    };
    for (c, (a, hits)) in sums {
        if a.norm() >= PRUNE_EPS {
            out.psi.amps.insert(c, a);
        } else if hits > 1 {
            out.cancelled.push((c, a.norm()));
        }
    }
    Ok(out)
}

/// One application of `U_A`. Advancing past `$` is an error.
pub fn apply_evolution(
    spec: &QpaSpec,
    tape: &TapeContext,
    psi: &Superposition,
) -> Result<Superposition> {
    Ok(step(spec, tape, psi, Overrun::Error)?.psi)
}

/// Outcome of observing a superposition against `E_a ⊕ E_r ⊕ E_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub p_accept: f64,
    pub p_reject: f64,
    /// The non-halting part, not renormalized.
    pub residual: Superposition,
}

pub fn measure(spec: &QpaSpec, psi: &Superposition) -> Measurement {
    let mut m = Measurement {
        p_accept: 0.0,
        p_reject: 0.0,
        residual: Superposition::new(),
    };
    for (c, a) in psi.iter() {
        if spec.is_accepting(c.state) {
            m.p_accept += a.norm_sqr();
        } else if spec.is_rejecting(c.state) {
            m.p_reject += a.norm_sqr();
        } else {
            m.residual.amps.insert(c.clone(), *a);
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecognitionResult {
    pub p_accept: f64,
    pub p_reject: f64,
    pub p_nonhalt: f64,
    pub steps: usize,
    pub halted: bool,
    /// Probability discarded at the tape end (forced runs only).
    #[serde(skip_serializing_if = "is_zero")]
    pub p_lost: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accepted,
    Rejected,
    Inconclusive,
}

impl Decision {
    pub fn name(self) -> &'static str {
        match self {
            Decision::Accepted => "accepted",
            Decision::Rejected => "rejected",
            Decision::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn check_threshold(threshold: f64) -> Result<f64> {
    if threshold > 0.5 && threshold <= 1.0 {
        Ok(threshold)
    } else {
        Err(Error::Threshold(threshold))
    }
}

/// Accepted iff `p_accept ≥ threshold`, rejected iff `p_reject ≥ threshold`.
pub fn decide(result: &RecognitionResult, threshold: f64) -> Result<Decision> {
    check_threshold(threshold)?;
    Ok(if result.p_accept >= threshold {
        Decision::Accepted
    } else if result.p_reject >= threshold {
        Decision::Rejected
    } else {
        Decision::Inconclusive
    })
}

/// Accepted iff `p_accept > 1/2`, rejected iff `p_reject > 1/2`.
pub fn decide_majority(result: &RecognitionResult) -> Decision {
    if result.p_accept > 0.5 {
        Decision::Accepted
    } else if result.p_reject > 0.5 {
        Decision::Rejected
    } else {
        Decision::Inconclusive
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecognizeOptions {
    /// `None` means `20·(|word| + 2)`.
    pub max_steps: Option<usize>,
    pub halt_eps: f64,
    /// Skip the well-formedness gate.
    pub force: bool,
    pub overrun: Overrun,
    pub check: CheckOptions,
}

impl Default for RecognizeOptions {
    fn default() -> Self {
        RecognizeOptions {
            max_steps: None,
            halt_eps: HALT_EPS,
            force: false,
            overrun: Overrun::Error,
            check: CheckOptions::default(),
        }
    }
}

impl RecognizeOptions {
    /// Skips the gate and discards overrunning amplitude.
    pub fn forced() -> Self {
        RecognizeOptions {
            force: true,
            overrun: Overrun::Discard,
            ..RecognizeOptions::default()
        }
    }

    pub fn steps_for(&self, word_len: usize) -> usize {
        self.max_steps.unwrap_or(20 * (word_len + 2))
    }
}

/// Per-step record of a traced run.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub step: usize,
    /// Post-evolution, pre-measurement superposition.
    pub psi: Superposition,
    pub p_accept_inc: f64,
    pub p_reject_inc: f64,
    pub p_accept: f64,
    pub p_reject: f64,
    pub residual_norm_sqr: f64,
    pub lost: f64,
    pub cancelled: Vec<(Configuration, f64)>,
}

impl TraceStep {
    /// `p_accept + p_reject + ‖residual‖²` after this step.
    pub fn total(&self) -> f64 {
        self.p_accept + self.p_reject + self.residual_norm_sqr
    }
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub word: String,
    pub steps: Vec<TraceStep>,
    pub result: RecognitionResult,
}

#[derive(Serialize)]
struct TraceEntryJson {
    state: String,
    head: usize,
    stack: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct TraceStepJson {
    step: usize,
    superposition: Vec<TraceEntryJson>,
    p_accept_inc: f64,
    p_reject_inc: f64,
    p_accept: f64,
    p_reject: f64,
    residual_norm_sqr: f64,
    #[serde(skip_serializing_if = "is_zero")]
    lost: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    cancelled: Vec<String>,
}

#[derive(Serialize)]
struct TraceJson<'a> {
    word: &'a str,
    steps: Vec<TraceStepJson>,
    result: RecognitionResult,
}

impl Trace {
    pub fn to_json(&self, spec: &QpaSpec) -> serde_json::Value {
        let a = spec.alphabets();
        let steps = self
            .steps
            .iter()
            .map(|s| TraceStepJson {
                step: s.step,
                superposition: s
                    .psi
                    .iter()
                    .map(|(c, z)| TraceEntryJson {
                        state: spec.state_name(c.state).to_string(),
                        head: c.head,
                        stack: a.render_push(&c.stack),
                        re: z.re,
                        im: z.im,
                    })
                    .collect(),
                p_accept_inc: s.p_accept_inc,
                p_reject_inc: s.p_reject_inc,
                p_accept: s.p_accept,
                p_reject: s.p_reject,
                residual_norm_sqr: s.residual_norm_sqr,
                lost: s.lost,
                cancelled: s
                    .cancelled
                    .iter()
                    .map(|(c, _)| c.display(spec).to_string())
                    .collect(),
            })
            .collect();
        serde_json::to_value(TraceJson {
            word: &self.word,
            steps,
            result: self.result,
        })
        .expect("trace serialization cannot fail")
    }
}

/// A spec that has passed (or been excused from) the well-formedness gate.
#[derive(Clone, Debug)]
pub struct Recognizer<'a> {
    spec: &'a QpaSpec,
    opts: RecognizeOptions,
}

impl<'a> Recognizer<'a> {
    pub fn new(spec: &'a QpaSpec, opts: RecognizeOptions) -> Result<Self> {
        if !opts.force {
            let structural = spec.validate_structure().len();
            let summary: ConditionSummary = check_all(spec, &opts.check);
            if structural > 0 || !summary.passed {
                return Err(Error::NotWellFormed(structural + summary.failed().len()));
            }
        }
        Ok(Recognizer { spec, opts })
    }

    pub fn spec(&self) -> &QpaSpec {
        self.spec
    }

    pub fn options(&self) -> &RecognizeOptions {
        &self.opts
    }

    pub fn recognize(&self, word: &str) -> Result<RecognitionResult> {
        self.run(word, |_| ())
    }

    pub fn trace(&self, word: &str) -> Result<Trace> {
        let mut steps = Vec::new();
        let result = self.run(word, |s| steps.push(s))?;
        Ok(Trace {
            word: word.to_string(),
            steps,
            result,
        })
    }

    /// Runs the loop, handing every step record to `observe`.
    pub fn run(&self, word: &str, mut observe: impl FnMut(TraceStep)) -> Result<RecognitionResult> {
        let tape = TapeContext::new(self.spec, word)?;
        let max_steps = self.opts.steps_for(tape.word_len());
        let mut residual = Superposition::basis(Configuration::initial(self.spec));
        let mut r = RecognitionResult {
            p_accept: 0.0,
            p_reject: 0.0,
            p_nonhalt: 1.0,
            steps: 0,
            halted: false,
            p_lost: 0.0,
        };
        loop {
            let norm = residual.norm_sqr();
            r.p_nonhalt = norm;
            if norm < self.opts.halt_eps {
                r.halted = true;
                break;
            }
            if r.steps >= max_steps {
                break;
            }
            let s = step(self.spec, &tape, &residual, self.opts.overrun)?;
            let m = measure(self.spec, &s.psi);
            r.steps += 1;
            r.p_accept += m.p_accept;
            r.p_reject += m.p_reject;
            r.p_lost += s.lost;
            residual = m.residual;
            observe(TraceStep {
                step: r.steps,
                psi: s.psi,
                p_accept_inc: m.p_accept,
                p_reject_inc: m.p_reject,
                p_accept: r.p_accept,
                p_reject: r.p_reject,
                residual_norm_sqr: residual.norm_sqr(),
                lost: s.lost,
                cancelled: s.cancelled,
            });
        }
        Ok(r)
    }
}

/// Checks the spec, then runs one word.
pub fn recognize(spec: &QpaSpec, word: &str, opts: RecognizeOptions) -> Result<RecognitionResult> {
    Recognizer::new(spec, opts)?.recognize(word)
}

pub fn trace(spec: &QpaSpec, word: &str, opts: RecognizeOptions) -> Result<Trace> {
    Recognizer::new(spec, opts)?.trace(word)
}
