use thiserror::Error;

/// Errors raised while loading, simulating, or compiling automata.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid amplitude literal `{literal}`: {reason}")]
    AmplitudeLiteral { literal: String, reason: String },

    #[error("malformed document: {0}")]
    Document(String),

    #[error("reserved symbol `{0}` cannot be declared")]
    ReservedSymbol(String),

    #[error("duplicate {what} `{name}`")]
    Duplicate { what: &'static str, name: String },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown input symbol `{0}`")]
    UnknownInputSymbol(String),

    #[error("unknown stack symbol `{0}`")]
    UnknownStackSymbol(String),

    #[error("direction function missing for state `{0}`")]
    MissingDirection(String),

    #[error("the automaton is not well-formed ({0} violated condition(s)); rerun with force to simulate anyway")]
    NotWellFormed(usize),

    #[error("tape overrun: configuration in state `{state}` advances past the right end-marker")]
    TapeOverrun { state: String },

    #[error("stack base lost: transition from state `{state}` produced a stack without a unique Z0 prefix")]
    StackBase { state: String },

    #[error("threshold {0} outside (1/2, 1]")]
    Threshold(f64),

    #[error("configuration window exceeds cap of {cap} configurations")]
    WindowCap { cap: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("DFA has no states")]
    EmptyDfa,

    #[error("DFA transition missing for state `{state}` on `{symbol}`")]
    PartialDfa { state: String, symbol: String },

    #[error("symbol roles overlap: {0}")]
    SymbolRoles(String),
}

pub type Result<T> = std::result::Result<T, Error>;
