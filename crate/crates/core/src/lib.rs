//! Quantum pushdown automata as finite amplitude tables.
//!
//! * [`model`] holds the automaton data model and its JSON form.
//! * [`wellformed`] checks the finite unitarity conditions on δ.
//! * [`evolve`] runs the measure-many recognition process on words.
//! * [`matrixlab`] builds truncated evolution matrices and checks them numerically.
//! * [`dfa2rpa`] compiles total DFAs into reversible pushdown automata.
//! * [`zoo`] ships ready-made automata for a handful of languages.

pub mod amplitude;
pub mod dfa2rpa;
pub mod error;
pub mod evolve;
pub mod matrixlab;
pub mod model;
pub mod wellformed;
pub mod zoo;

pub use amplitude::Amplitude;
pub use error::{Error, Result};
