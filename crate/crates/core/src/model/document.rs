//! JSON interchange documents for automata and DFAs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::alphabet::Direction;
use super::spec::{Kind, QpaSpec};
use crate::amplitude::Amplitude;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QpaDocument {
    pub kind: Kind,
    pub states: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub stack_alphabet: Vec<String>,
    pub initial: String,
    pub accepting: Vec<String>,
    pub rejecting: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub direction: BTreeMap<String, Direction>,
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub input: String,
    pub stack_top: String,
    pub to: String,
    pub dir: Direction,
    /// Space-separated stack symbols; `""` is ε.
    pub push: String,
    pub amp: Amplitude,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaDocument {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: String,
    pub finals: Vec<String>,
    pub transitions: Vec<DfaTransitionDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaTransitionDoc {
    pub from: String,
    pub input: String,
    pub to: String,
}

/// Incremental construction of a spec by name.
///
/// For simplified and reversible kinds the direction of each rule is taken
/// from `D(to)`, so every state must be declared with [`SpecBuilder::state`]
/// before the rules that target it are added.
#[derive(Clone, Debug)]
pub struct SpecBuilder {
    kind: Kind,
    states: Vec<String>,
    direction: BTreeMap<String, Direction>,
    sigma: Vec<String>,
    stack: Vec<String>,
    initial: String,
    accepting: Vec<String>,
    rejecting: Vec<String>,
    rules: Vec<Rule>,
}

/// `(from, sigma, tau, to, direction, push, amplitude)` as written.
type Rule = (
    String,
    String,
    String,
    String,
    Option<Direction>,
    String,
    String,
);

impl SpecBuilder {
    pub fn new(kind: Kind, sigma: &[&str], stack: &[&str]) -> Self {
        SpecBuilder {
            kind,
            states: Vec::new(),
            direction: BTreeMap::new(),
            sigma: sigma.iter().map(|s| s.to_string()).collect(),
            stack: stack.iter().map(|s| s.to_string()).collect(),
            initial: String::new(),
            accepting: Vec::new(),
            rejecting: Vec::new(),
            rules: Vec::new(),
        }
    }

    pub fn state(&mut self, name: &str, dir: Direction) -> &mut Self {
        self.states.push(name.to_string());
        self.direction.insert(name.to_string(), dir);
        self
    }

    /// A state without a direction entry (general kind only).
    pub fn plain_state(&mut self, name: &str) -> &mut Self {
        self.states.push(name.to_string());
        self
    }

    pub fn initial(&mut self, name: &str) -> &mut Self {
        self.initial = name.to_string();
        self
    }

    pub fn accepting(&mut self, name: &str) -> &mut Self {
        self.accepting.push(name.to_string());
        self
    }

    pub fn rejecting(&mut self, name: &str) -> &mut Self {
        self.rejecting.push(name.to_string());
        self
    }

    /// Adds `φ(from, input, top, to, push) = amp` with direction `D(to)`.
    pub fn rule(
        &mut self,
        from: &str,
        input: &str,
        top: &str,
        to: &str,
        push: &str,
        amp: &str,
    ) -> &mut Self {
        self.rules.push((
            from.to_string(),
            input.to_string(),
            top.to_string(),
            to.to_string(),
            None,
            push.to_string(),
            amp.to_string(),
        ));
        self
    }

    /// Adds `δ(from, input, top, to, dir, push) = amp`.
    #[allow(clippy::too_many_arguments)]
    pub fn rule_dir(
        &mut self,
        from: &str,
        input: &str,
        top: &str,
        to: &str,
        dir: Direction,
        push: &str,
        amp: &str,
    ) -> &mut Self {
        self.rules.push((
            from.to_string(),
            input.to_string(),
            top.to_string(),
            to.to_string(),
            Some(dir),
            push.to_string(),
            amp.to_string(),
        ));
        self
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn document(&self) -> Result<QpaDocument> {
        let mut transitions = Vec::with_capacity(self.rules.len());
        for (from, input, top, to, dir, push, amp) in &self.rules {
            let dir = match dir {
                Some(d) => *d,
                None => *self
                    .direction
                    .get(to)
                    .ok_or_else(|| Error::MissingDirection(to.clone()))?,
            };
            transitions.push(TransitionDoc {
                from: from.clone(),
                input: input.clone(),
                stack_top: top.clone(),
                to: to.clone(),
                dir,
                push: push.clone(),
                amp: Amplitude::parse(amp)?,
            });
        }
        Ok(QpaDocument {
            kind: self.kind,
            states: self.states.clone(),
            input_alphabet: self.sigma.clone(),
            stack_alphabet: self.stack.clone(),
            initial: self.initial.clone(),
            accepting: self.accepting.clone(),
            rejecting: self.rejecting.clone(),
            direction: self.direction.clone(),
            transitions,
        })
    }

    pub fn build(&self) -> Result<QpaSpec> {
        QpaSpec::from_document(&self.document()?)
    }
}
