//! Semantic construction grammar interpreter.
//!
//! Text is concept-tagged against a lexicon, constructions are retrieved for
//! windows of the resulting chart through a three-tier template index,
//! candidates are filtered by knowledge-base tests and plausibility checks,
//! and the surviving interpretations are composed bottom-up into CycL-style
//! logical expressions.

pub mod cli;
pub mod constructions;
pub mod demo;
pub mod eval;
pub mod interpreter;
pub mod kb;
pub mod logic;
pub mod sexp;
pub mod tagger;
