use std::collections::BTreeSet;

use super::document::{DfaDocument, DfaTransitionDoc};
use crate::error::{Error, Result};

/// A total deterministic finite automaton.
///
/// States keep their declared order; state `i` is the one whose stack index
/// is `i` after compilation. The alphabet is sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfaSpec {
    states: Vec<String>,
    sigma: Vec<String>,
    initial: usize,
    finals: BTreeSet<usize>,
    /// `trans[state][symbol]`
    trans: Vec<Vec<usize>>,
}

impl DfaSpec {
    pub fn from_document(doc: &DfaDocument) -> Result<Self> {
        if doc.states.is_empty() {
            return Err(Error::EmptyDfa);
        }
        let states = doc.states.clone();
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s) {
                return Err(Error::Duplicate {
                    what: "state",
                    name: s.clone(),
                });
            }
        }
        let mut sigma = doc.alphabet.clone();
        sigma.sort();
        for w in sigma.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Duplicate {
                    what: "input symbol",
                    name: w[0].clone(),
                });
            }
        }
        let state = |n: &str| {
            states
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| Error::UnknownState(n.to_string()))
        };
        let symbol = |n: &str| {
            sigma
                .binary_search_by(|s| s.as_str().cmp(n))
                .map_err(|_| Error::UnknownInputSymbol(n.to_string()))
        };
        let initial = state(&doc.initial)?;
        let finals = doc
            .finals
            .iter()
            .map(|f| state(f))
            .collect::<Result<BTreeSet<_>>>()?;
        let mut table = vec![vec![None; sigma.len()]; states.len()];
        for t in &doc.transitions {
            let (from, sym, to) = (state(&t.from)?, symbol(&t.input)?, state(&t.to)?);
            if table[from][sym].replace(to).is_some() {
                return Err(Error::Duplicate {
                    what: "DFA transition",
                    name: format!("{} --{}-->", t.from, t.input),
                });
            }
        }
        let mut trans = Vec::with_capacity(states.len());
        for (i, row) in table.into_iter().enumerate() {
            let mut out = Vec::with_capacity(sigma.len());
            for (j, cell) in row.into_iter().enumerate() {
                out.push(cell.ok_or_else(|| Error::PartialDfa {
                    state: states[i].clone(),
                    symbol: sigma[j].clone(),
                })?);
            }
            trans.push(out);
        }
        Ok(DfaSpec {
            states,
            sigma,
            initial,
            finals,
            trans,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DfaDocument =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        DfaSpec::from_document(&doc)
    }

    pub fn to_document(&self) -> DfaDocument {
        let mut transitions = Vec::new();
        for (i, row) in self.trans.iter().enumerate() {
            for (j, &to) in row.iter().enumerate() {
                transitions.push(DfaTransitionDoc {
                    from: self.states[i].clone(),
                    input: self.sigma[j].clone(),
                    to: self.states[to].clone(),
                });
            }
        }
        DfaDocument {
            states: self.states.clone(),
            alphabet: self.sigma.clone(),
            initial: self.states[self.initial].clone(),
            finals: self
                .finals
                .iter()
                .map(|&f| self.states[f].clone())
                .collect(),
            transitions,
        }
    }

    /// Builds a DFA from index tables: `trans[state][symbol]`.
    pub fn from_table(
        states: &[&str],
        sigma: &[&str],
        initial: usize,
        finals: &[usize],
        trans: &[Vec<usize>],
    ) -> Result<Self> {
        let doc = DfaDocument {
            states: states.iter().map(|s| s.to_string()).collect(),
            alphabet: sigma.iter().map(|s| s.to_string()).collect(),
            initial: states.get(initial).ok_or(Error::EmptyDfa)?.to_string(),
            finals: finals.iter().map(|&f| states[f].to_string()).collect(),
            transitions: trans
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(move |(j, &to)| DfaTransitionDoc {
                            from: states[i].to_string(),
                            input: sigma[j].to_string(),
                            to: states[to].to_string(),
                        })
                })
                .collect(),
        };
        DfaSpec::from_document(&doc)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn sigma(&self) -> &[String] {
        &self.sigma
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(&q)
    }

    pub fn next(&self, q: usize, symbol: usize) -> usize {
        self.trans[q][symbol]
    }

    pub fn symbol_index(&self, name: &str) -> Result<usize> {
        self.sigma
            .binary_search_by(|s| s.as_str().cmp(name))
            .map_err(|_| Error::UnknownInputSymbol(name.to_string()))
    }
}
