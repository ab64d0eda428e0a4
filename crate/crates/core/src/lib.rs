//! A workbench for proof-terms of atomic second-order intuitionistic
//! propositional logic: formulas built from atoms, `→` and `∀`, where
//! `∀`-elimination may only instantiate atoms.
//!
//! The crate parses and prints formulas and terms, type-checks terms
//! bidirectionally with replayable derivations, normalizes with recorded
//! traces, and tests membership of terms in the phase-semantic
//! interpretations of formulas over an atomic base.

pub mod encodings;
pub mod reduction;
pub mod semantics;
pub mod syntax;
pub mod typing;
