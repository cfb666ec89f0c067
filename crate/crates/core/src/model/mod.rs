//! Automaton data model: alphabets, transition tables, structural checks.

mod alphabet;
mod dfa;
mod document;
mod spec;

pub use alphabet::{
    Alphabets, Direction, InputSym, StackSym, StateId, LEFT_MARKER, RIGHT_MARKER, STACK_BASE,
};
pub use dfa::DfaSpec;
pub use document::{DfaDocument, DfaTransitionDoc, QpaDocument, SpecBuilder, TransitionDoc};
pub use spec::{
    validate_structure, Entry, IncomingEntry, Kind, QpaSpec, StructureViolation, TransitionKey,
    ViolationKind, AMPLITUDE_TOLERANCE,
};
