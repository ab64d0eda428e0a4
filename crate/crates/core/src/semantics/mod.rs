//! Validity of proof-terms against an atomic base.
//!
//! The universally quantified clauses of the membership definitions
//! ("for every s in B", "for every atom Y") are finitized into witness
//! sets and an atom sample. A pass over a finite sample is reported as
//! `BoundedOk`; `Certified` is reserved for cases backed by a derivation.

mod enumerate;
mod extract;
mod membership;
mod validity;
mod verdict;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::reduction::Fuel;
use crate::syntax::Context;
use crate::syntax::{parse_formula, parse_term, Atom, Formula, Term, VarName};
use crate::typing::{check, TypeError};

pub use enumerate::{enumerate_normal, enumerate_normal_with};
pub use extract::{extract, ExtractError, Extraction};
pub use membership::{e_member, i_member, membership, outer_v};
pub use validity::{is_valid, q_valid};
pub use verdict::{Counterexample, Evidence, Flavor, Probe, Status, Verdict};

/// The atoms `X` whose constants `c{X}` count as axioms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomicBase {
    atoms: BTreeSet<Atom>,
}

impl AtomicBase {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> AtomicBase {
        AtomicBase {
            atoms: atoms.into_iter().collect(),
        }
    }

    pub fn empty() -> AtomicBase {
        AtomicBase::default()
    }

    pub fn contains(&self, x: &Atom) -> bool {
        self.atoms.contains(x)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl std::fmt::Display for AtomicBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<&str> = self.atoms.iter().map(|a| a.as_str()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// True iff every constant in `t` is some `c{X}` with `X` in the base,
/// tagged or not.
pub fn is_proof_term(t: &Term, base: &AtomicBase) -> bool {
    first_foreign_constant(t, base).is_none()
}

/// The first constant of `t` that is not an axiom of `base`. A constant
/// `c{X}` whose atom is bound by an enclosing `Λ` is not the axiom
/// `c{X}`: renaming the binder would rename the constant too.
pub(crate) fn first_foreign_constant(t: &Term, base: &AtomicBase) -> Option<Formula> {
    fn go(t: &Term, base: &AtomicBase, bound: &mut Vec<Atom>) -> Option<Formula> {
        match t {
            Term::Var(_) => None,
            Term::Const {
                formula: Formula::Atom(x),
                ..
            } if base.contains(x) && !bound.contains(x) => None,
            Term::Const { formula, .. } => Some(formula.clone()),
            Term::Lam { body, .. } | Term::TApp(body, _) => go(body, base, bound),
            Term::TLam { binder, body } => {
                bound.push(binder.clone());
                let found = go(body, base, bound);
                bound.pop();
                found
            }
            Term::App(f, a) => go(f, base, bound).or_else(|| go(a, base, bound)),
        }
    }
    go(t, base, &mut Vec::new())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("term has free variables {0:?}; membership is defined for closed terms")]
    OpenTerm(Vec<String>),
    #[error("variable `{0}` is free in the term but not bound by the context")]
    UnboundFreeVariable(VarName),
    #[error("invalid budget: {0}")]
    BudgetInvalid(String),
    #[error("witness `{term}` does not prove `{formula}`: {error}")]
    BadWitness {
        term: Term,
        formula: Formula,
        error: Box<TypeError>,
    },
}

/// Limits and extra material for the finitized membership tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessBudget {
    /// Largest enumerated witness, in AST nodes.
    pub term_size_bound: usize,
    /// Atoms tried for `∀` clauses besides those of the goal, the term and
    /// the base. One fresh atom is always added on top.
    pub atom_sample: BTreeSet<Atom>,
    /// Fuel for each individual normalization.
    pub fuel: Fuel,
    /// Maximum number of nested `→`/`∀` unfoldings.
    pub unfold_depth: usize,
    /// Extra closed witnesses, each checked against its formula.
    pub witnesses: Vec<(Term, Formula)>,
    /// Cap on atomic probes per query.
    pub max_probes: usize,
    /// Cap on substitution instances tried for an open term.
    pub max_instances: usize,
    /// Seeded extra witnesses drawn from slightly above the size bound.
    pub random_witnesses: usize,
    pub seed: u64,
}

impl Default for WitnessBudget {
    fn default() -> WitnessBudget {
        WitnessBudget {
            term_size_bound: 7,
            atom_sample: BTreeSet::new(),
            fuel: Fuel::DEFAULT,
            unfold_depth: 8,
            witnesses: Vec::new(),
            max_probes: 20_000,
            max_instances: 256,
            random_witnesses: 0,
            seed: 0,
        }
    }
}

impl WitnessBudget {
    pub fn validate(&self) -> Result<(), SemanticsError> {
        let bad = |m: &str| Err(SemanticsError::BudgetInvalid(m.to_string()));
        if self.term_size_bound == 0 {
            return bad("term size bound must be positive");
        }
        if self.unfold_depth == 0 {
            return bad("unfold depth must be positive");
        }
        if self.max_probes == 0 || self.max_instances == 0 {
            return bad("probe and instance caps must be positive");
        }
        for (term, formula) in &self.witnesses {
            if let Err(error) = check(&Context::new(), term, formula) {
                return Err(SemanticsError::BadWitness {
                    term: term.clone(),
                    formula: formula.clone(),
                    error: Box::new(error),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct WitnessFileError {
    pub line: usize,
    pub message: String,
}

/// Reads witnesses written one per line as `term : Formula`. Blank lines
/// and `--` comments are skipped.
pub fn parse_witnesses(text: &str) -> Result<Vec<(Term, Formula)>, WitnessFileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("--").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        // Annotations also use `:`, so try each split point from the right.
        let found = line.rmatch_indices(':').find_map(|(at, _)| {
            let term = parse_term(&line[..at]).ok()?;
            let formula = parse_formula(&line[at + 1..]).ok()?;
            Some((term, formula))
        });
        match found {
            Some(pair) => out.push(pair),
            None => {
                return Err(WitnessFileError {
                    line: i + 1,
                    message: format!("expected `term : formula`, found `{line}`"),
                })
            }
        }
    }
    Ok(out)
}
