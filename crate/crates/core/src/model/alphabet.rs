use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LEFT_MARKER: &str = "#";
pub const RIGHT_MARKER: &str = "$";
pub const STACK_BASE: &str = "Z0";

/// Head movement of a transition. `Stay` keeps the input head in place,
/// `Advance` moves it one cell to the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Stay,
    Advance,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Stay, Direction::Advance];

    pub fn name(self) -> &'static str {
        match self {
            Direction::Stay => "stay",
            Direction::Advance => "advance",
        }
    }

    pub fn other(self) -> Direction {
        match self {
            Direction::Stay => Direction::Advance,
            Direction::Advance => Direction::Stay,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Index into the state list of a spec.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Index into the tape alphabet: `0` is `#`, `1..=|Σ|` the input symbols,
/// `|Σ|+1` is `$`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InputSym(pub usize);

/// Index into the working stack alphabet: `0` is the base `Z0`, `1..=|T|`
/// the declared stack symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StackSym(pub usize);

impl StackSym {
    pub const BASE: StackSym = StackSym(0);

    pub fn is_base(self) -> bool {
        self.0 == 0
    }
}

/// Input and stack alphabets. The end-markers and the stack base are
/// injected here and can never be declared by the user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabets {
    sigma: Vec<String>,
    stack: Vec<String>,
}

impl Alphabets {
    /// Builds alphabets from declared names; both lists are sorted.
    pub fn new(sigma: &[String], stack: &[String]) -> Result<Self> {
        let sigma = check_names(sigma, "input symbol", &[LEFT_MARKER, RIGHT_MARKER])?;
        let stack = check_names(stack, "stack symbol", &[STACK_BASE])?;
        Ok(Alphabets { sigma, stack })
    }

    /// Declared input symbols Σ, sorted.
    pub fn sigma(&self) -> &[String] {
        &self.sigma
    }

    /// Declared stack symbols T, sorted.
    pub fn stack(&self) -> &[String] {
        &self.stack
    }

    pub fn gamma_len(&self) -> usize {
        self.sigma.len() + 2
    }

    pub fn delta_len(&self) -> usize {
        self.stack.len() + 1
    }

    pub fn left_marker(&self) -> InputSym {
        InputSym(0)
    }

    pub fn right_marker(&self) -> InputSym {
        InputSym(self.sigma.len() + 1)
    }

    pub fn is_marker(&self, s: InputSym) -> bool {
        s.0 == 0 || s.0 == self.sigma.len() + 1
    }

    /// Γ in deterministic order: `#`, Σ sorted, `$`.
    pub fn gamma(&self) -> impl Iterator<Item = InputSym> + Clone {
        (0..self.gamma_len()).map(InputSym)
    }

    /// Σ only.
    pub fn sigma_syms(&self) -> impl Iterator<Item = InputSym> + Clone {
        (1..=self.sigma.len()).map(InputSym)
    }

    /// Δ in deterministic order: `Z0`, T sorted.
    pub fn delta(&self) -> impl Iterator<Item = StackSym> + Clone {
        (0..self.delta_len()).map(StackSym)
    }

    /// T only.
    pub fn stack_syms(&self) -> impl Iterator<Item = StackSym> + Clone {
        (1..self.delta_len()).map(StackSym)
    }

    pub fn input_name(&self, s: InputSym) -> &str {
        if s.0 == 0 {
            LEFT_MARKER
        } else if s.0 == self.sigma.len() + 1 {
            RIGHT_MARKER
        } else {
            &self.sigma[s.0 - 1]
        }
    }

    pub fn stack_name(&self, s: StackSym) -> &str {
        if s.0 == 0 {
            STACK_BASE
        } else {
            &self.stack[s.0 - 1]
        }
    }

    /// Resolves a Γ symbol (markers included).
    pub fn input_id(&self, name: &str) -> Result<InputSym> {
        match name {
            LEFT_MARKER => Ok(self.left_marker()),
            RIGHT_MARKER => Ok(self.right_marker()),
            _ => self
                .sigma
                .binary_search_by(|s| s.as_str().cmp(name))
                .map(|i| InputSym(i + 1))
                .map_err(|_| Error::UnknownInputSymbol(name.to_string())),
        }
    }

    /// Resolves a Δ symbol (`Z0` included).
    pub fn stack_id(&self, name: &str) -> Result<StackSym> {
        if name == STACK_BASE {
            return Ok(StackSym::BASE);
        }
        self.stack
            .binary_search_by(|s| s.as_str().cmp(name))
            .map(|i| StackSym(i + 1))
            .map_err(|_| Error::UnknownStackSymbol(name.to_string()))
    }

    /// Splits a word over Σ into symbols. Whitespace separates tokens; a
    /// token that is not itself a symbol is split by longest match.
    pub fn parse_word(&self, word: &str) -> Result<Vec<InputSym>> {
        let names: Vec<(&str, InputSym)> = self
            .sigma
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), InputSym(i + 1)))
            .collect();
        tokenize(word, &names).map_err(Error::UnknownInputSymbol)
    }

    /// Splits a push word over Δ, same rules as [`Alphabets::parse_word`].
    pub fn parse_push(&self, push: &str) -> Result<Vec<StackSym>> {
        let mut names: Vec<(&str, StackSym)> = vec![(STACK_BASE, StackSym::BASE)];
        names.extend(
            self.stack
                .iter()
                .enumerate()
                .map(|(i, s)| (s.as_str(), StackSym(i + 1))),
        );
        tokenize(push, &names).map_err(Error::UnknownStackSymbol)
    }

    pub fn render_word(&self, word: &[InputSym]) -> String {
        let sep = if self.sigma.iter().any(|s| s.chars().count() > 1) {
            " "
        } else {
            ""
        };
        word.iter()
            .map(|&s| self.input_name(s))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Push words are always rendered space-separated so that multi-character
    /// symbols such as `Z0` or `10` stay unambiguous.
    pub fn render_push(&self, push: &[StackSym]) -> String {
        push.iter()
            .map(|&s| self.stack_name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Every ω a transition popping `tau` may legally push, ordered by length
    /// and then by symbol index.
    pub fn push_words(&self, tau: StackSym) -> Vec<Vec<StackSym>> {
        if tau.is_base() {
            let mut out = vec![vec![StackSym::BASE]];
            out.extend(self.stack_syms().map(|t| vec![StackSym::BASE, t]));
            out
        } else {
            let mut out = vec![vec![]];
            out.extend(self.stack_syms().map(|t| vec![t]));
            out.extend(self.stack_syms().map(|t| vec![tau, t]));
            out
        }
    }

    /// Name-level form of [`Alphabets::push_words`].
    pub fn enumerate_push_words(&self, tau: &str) -> Result<Vec<Vec<String>>> {
        let tau = self.stack_id(tau)?;
        Ok(self
            .push_words(tau)
            .into_iter()
            .map(|w| w.iter().map(|&s| self.stack_name(s).to_string()).collect())
            .collect())
    }

    /// True when `push` is a legal ω for a transition that pops `tau`.
    pub fn is_legal_push(&self, tau: StackSym, push: &[StackSym]) -> bool {
        match push.len() {
            0 => !tau.is_base(),
            1 => push[0].is_base() == tau.is_base(),
            2 => push[0] == tau && !push[1].is_base(),
            _ => false,
        }
    }
}

fn check_names(names: &[String], what: &'static str, reserved: &[&str]) -> Result<Vec<String>> {
    let mut sorted = names.to_vec();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Duplicate {
                what,
                name: w[0].clone(),
            });
        }
    }
    for n in &sorted {
        if reserved.contains(&n.as_str()) {
            return Err(Error::ReservedSymbol(n.clone()));
        }
        if n.is_empty() || n.chars().any(char::is_whitespace) {
            return Err(Error::Document(format!("invalid {what} name `{n}`")));
        }
    }
    Ok(sorted)
}

fn tokenize<T: Copy>(text: &str, names: &[(&str, T)]) -> std::result::Result<Vec<T>, String> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        if let Some(&(_, id)) = names.iter().find(|(n, _)| *n == token) {
            out.push(id);
            continue;
        }
        let mut rest = token;
        while !rest.is_empty() {
            let best = names
                .iter()
                .filter(|(n, _)| rest.starts_with(n))
                .max_by_key(|(n, _)| n.len());
            match best {
                Some(&(n, id)) => {
                    out.push(id);
                    rest = &rest[n.len()..];
                }
                None => return Err(rest.chars().next().map(String::from).unwrap_or_default()),
            }
        }
    }
    Ok(out)
}
