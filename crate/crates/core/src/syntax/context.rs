use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::names::{Atom, VarName};
use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable `{0}` is already bound in the context")]
pub struct DuplicateVariable(pub VarName);

/// An ordered assumption list `x1:A1, ..., xn:An` with distinct variables.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Context {
    entries: Vec<(VarName, Formula)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn from_entries(
        entries: impl IntoIterator<Item = (VarName, Formula)>,
    ) -> Result<Context, DuplicateVariable> {
        entries
            .into_iter()
            .try_fold(Context::new(), |ctx, (x, a)| ctx.extend(x, a))
    }

    /// Builds a context without the distinctness check. Only useful for
    /// constructing malformed derivations that the kernel must reject.
    pub fn from_entries_unchecked(entries: Vec<(VarName, Formula)>) -> Context {
        Context { entries }
    }

    /// A copy of `self` with `x:formula` appended.
    pub fn extend(&self, x: VarName, formula: Formula) -> Result<Context, DuplicateVariable> {
        if self.contains(&x) {
            return Err(DuplicateVariable(x));
        }
        let mut entries = self.entries.clone();
        entries.push((x, formula));
        Ok(Context { entries })
    }

    pub fn lookup(&self, x: &VarName) -> Option<&Formula> {
        self.entries.iter().find(|(y, _)| y == x).map(|(_, a)| a)
    }

    pub fn contains(&self, x: &VarName) -> bool {
        self.entries.iter().any(|(y, _)| y == x)
    }

    pub fn entries(&self) -> &[(VarName, Formula)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarName> {
        self.entries.iter().map(|(x, _)| x)
    }

    pub fn has_duplicates(&self) -> bool {
        let mut seen = BTreeSet::new();
        !self.entries.iter().all(|(x, _)| seen.insert(x))
    }

    /// `PFV(Γ)`: free atoms of all assumption formulas.
    pub fn free_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for (_, a) in &self.entries {
            a.collect_free_atoms(&mut Vec::new(), &mut out);
        }
        out
    }

    /// A variant of `base` not bound in this context.
    pub fn fresh_var(&self, base: &VarName) -> VarName {
        base.freshen(|n| self.entries.iter().any(|(y, _)| y.as_str() == n))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, a)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} : {a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}
