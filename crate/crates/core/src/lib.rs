//! Census of crystallizations of closed 3-manifolds.
//!
//! Graph model, canonical codes, moves, exhaustive generation, classification,
//! invariants and Seifert-manifold crystallizations.

pub mod code;
pub mod graph;
pub mod library;
pub mod moves;
pub mod sum;

pub use code::{canonical_code, from_code, Code, CodeError};
pub use graph::{ColourSet, ColouredGraph, GraphError, NUM_COLOURS};
pub mod invariants;
pub mod snf;
pub mod generation;
pub mod catalog;
pub mod classify;
pub mod seifert;
