use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use super::names::Atom;

/// Formulas of the atomic second-order calculus.
///
/// Equality and hashing are α-equivalence: `forall X. X` equals
/// `forall Y. Y`.
#[derive(Clone)]
pub enum Formula {
    Atom(Atom),
    Arrow(Box<Formula>, Box<Formula>),
    Forall(Atom, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Atom::new(name))
    }

    pub fn arrow(left: Formula, right: Formula) -> Formula {
        Formula::Arrow(Box::new(left), Box::new(right))
    }

    pub fn forall(binder: Atom, body: Formula) -> Formula {
        Formula::Forall(binder, Box::new(body))
    }

    /// `A1 -> A2 -> ... -> target`.
    pub fn arrows(args: impl IntoIterator<Item = Formula>, target: Formula) -> Formula {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(target, |acc, a| Formula::arrow(a, acc))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Arrow(l, r) => 1 + l.size() + r.size(),
            Formula::Forall(_, b) => 1 + b.size(),
        }
    }

    pub fn free_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_free_atoms(&mut Vec::new(), &mut out);
        out
    }

    pub(crate) fn collect_free_atoms(&self, bound: &mut Vec<Atom>, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                if !bound.contains(a) {
                    out.insert(a.clone());
                }
            }
            Formula::Arrow(l, r) => {
                l.collect_free_atoms(bound, out);
                r.collect_free_atoms(bound, out);
            }
            Formula::Forall(x, b) => {
                bound.push(x.clone());
                b.collect_free_atoms(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free_atom(&self, x: &Atom) -> bool {
        match self {
            Formula::Atom(a) => a == x,
            Formula::Arrow(l, r) => l.has_free_atom(x) || r.has_free_atom(x),
            Formula::Forall(y, b) => y != x && b.has_free_atom(x),
        }
    }

    /// Every atom name occurring anywhere, bound or free.
    pub fn all_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Arrow(l, r) => {
                l.all_atoms(out);
                r.all_atoms(out);
            }
            Formula::Forall(x, b) => {
                out.insert(x.clone());
                b.all_atoms(out);
            }
        }
    }

    /// Capture-avoiding `self[x := replacement]`.
    pub fn subst(&self, x: &Atom, replacement: &Formula) -> Formula {
        if !self.has_free_atom(x) {
            return self.clone();
        }
        match self {
            Formula::Atom(a) if a == x => replacement.clone(),
            Formula::Atom(_) => self.clone(),
            Formula::Arrow(l, r) => {
                Formula::arrow(l.subst(x, replacement), r.subst(x, replacement))
            }
            Formula::Forall(y, body) => {
                // y != x here, otherwise x would not be free.
                if replacement.has_free_atom(y) {
                    let avoid = replacement.free_atoms();
                    let fresh = y.freshen(|s| {
                        avoid.contains(s) || s == x.as_str() || body.has_free_atom(&Atom::new(s))
                    });
                    let renamed = body.subst(y, &Formula::Atom(fresh.clone()));
                    Formula::forall(fresh, renamed.subst(x, replacement))
                } else {
                    Formula::forall(y.clone(), body.subst(x, replacement))
                }
            }
        }
    }

    /// Atom-for-atom substitution, the only kind the core calculus needs.
    pub fn subst_atom(&self, x: &Atom, y: &Atom) -> Formula {
        self.subst(x, &Formula::Atom(y.clone()))
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_eq_in(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

/// Position of `a` counted from the innermost binder.
pub(crate) fn bound_index<T: PartialEq>(scope: &[T], a: &T) -> Option<usize> {
    scope.iter().rev().position(|b| b == a)
}

pub(crate) fn alpha_eq_in(
    a: &Formula,
    b: &Formula,
    left: &mut Vec<Atom>,
    right: &mut Vec<Atom>,
) -> bool {
    match (a, b) {
        (Formula::Atom(x), Formula::Atom(y)) => {
            match (bound_index(left, x), bound_index(right, y)) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Formula::Arrow(l1, r1), Formula::Arrow(l2, r2)) => {
            alpha_eq_in(l1, l2, left, right) && alpha_eq_in(r1, r2, left, right)
        }
        (Formula::Forall(x, b1), Formula::Forall(y, b2)) => {
            left.push(x.clone());
            right.push(y.clone());
            let eq = alpha_eq_in(b1, b2, left, right);
            left.pop();
            right.pop();
            eq
        }
        _ => false,
    }
}

pub(crate) fn hash_in<H: Hasher>(f: &Formula, scope: &mut Vec<Atom>, state: &mut H) {
    match f {
        Formula::Atom(a) => match bound_index(scope, a) {
            Some(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            None => {
                1u8.hash(state);
                a.hash(state);
            }
        },
        Formula::Arrow(l, r) => {
            2u8.hash(state);
            hash_in(l, scope, state);
            hash_in(r, scope, state);
        }
        Formula::Forall(x, b) => {
            3u8.hash(state);
            scope.push(x.clone());
            hash_in(b, scope, state);
            scope.pop();
        }
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        self.alpha_eq(other)
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        hash_in(self, &mut Vec::new(), state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn alpha_equivalence() {
        assert_eq!(f("forall X. X"), f("forall Y. Y"));
        assert_ne!(f("forall X. Y"), f("forall Y. Y"));
        assert_eq!(
            f("forall X. forall Y. X -> Y"),
            f("forall A. forall B. A -> B")
        );
        assert_ne!(
            f("forall X. forall Y. X -> Y"),
            f("forall A. forall B. B -> A")
        );
    }

    #[test]
    fn substitution_avoids_capture() {
        let a = f("forall X. X -> Y");
        let out = a.subst_atom(&Atom::new("Y"), &Atom::new("X"));
        assert_eq!(out, f("forall Z. Z -> X"));
        assert!(out.free_atoms().contains("X"));
    }

    #[test]
    fn substitution_of_absent_atom_is_identity() {
        let a = f("forall X. X -> Y");
        assert_eq!(a.subst_atom(&Atom::new("X"), &Atom::new("Z")), a);
        assert_eq!(f("X").subst_atom(&Atom::new("X"), &Atom::new("Y")), f("Y"));
    }
}
