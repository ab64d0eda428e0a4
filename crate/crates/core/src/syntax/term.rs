use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use super::formula::{alpha_eq_in as formula_alpha_eq_in, bound_index};
use super::names::{Atom, VarName};
use super::Formula;

/// Proof terms.
///
/// Equality and hashing are α-equivalence over both term binders and
/// atom binders. Constant tags are part of a constant's identity.
#[derive(Clone)]
pub enum Term {
    Var(VarName),
    Const {
        formula: Formula,
        tag: Option<u32>,
    },
    Lam {
        binder: VarName,
        annotation: Option<Formula>,
        body: Box<Term>,
    },
    TLam {
        binder: Atom,
        body: Box<Term>,
    },
    App(Box<Term>, Box<Term>),
    TApp(Box<Term>, Atom),
}

/// One argument of an elimination spine.
#[derive(Clone, Copy, Debug)]
pub enum SpineArg<'a> {
    Term(&'a Term),
    Atom(&'a Atom),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(VarName::new(name))
    }

    pub fn constant(formula: Formula) -> Term {
        Term::Const { formula, tag: None }
    }

    pub fn tagged(formula: Formula, tag: u32) -> Term {
        Term::Const {
            formula,
            tag: Some(tag),
        }
    }

    pub fn lam(binder: VarName, body: Term) -> Term {
        Term::Lam {
            binder,
            annotation: None,
            body: Box::new(body),
        }
    }

    pub fn lam_ann(binder: VarName, annotation: Formula, body: Term) -> Term {
        Term::Lam {
            binder,
            annotation: Some(annotation),
            body: Box::new(body),
        }
    }

    pub fn tlam(binder: Atom, body: Term) -> Term {
        Term::TLam {
            binder,
            body: Box::new(body),
        }
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn tapp(fun: Term, atom: Atom) -> Term {
        Term::TApp(Box::new(fun), atom)
    }

    /// Number of AST nodes. Formulas inside constants and annotations
    /// and the atom of an atom application are not counted.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const { .. } => 1,
            Term::Lam { body, .. } | Term::TLam { body, .. } => 1 + body.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::TApp(f, _) => 1 + f.size(),
        }
    }

    /// Free term variables (`tFV`).
    pub fn free_vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut Vec<VarName>, out: &mut BTreeSet<VarName>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Const { .. } => {}
            Term::Lam { binder, body, .. } => {
                bound.push(binder.clone());
                body.collect_free_vars(bound, out);
                bound.pop();
            }
            Term::TLam { body, .. } => body.collect_free_vars(bound, out),
            Term::App(f, a) => {
                f.collect_free_vars(bound, out);
                a.collect_free_vars(bound, out);
            }
            Term::TApp(f, _) => f.collect_free_vars(bound, out),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_free_var(&self, x: &VarName) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Const { .. } => false,
            Term::Lam { binder, body, .. } => binder != x && body.has_free_var(x),
            Term::TLam { body, .. } => body.has_free_var(x),
            Term::App(f, a) => f.has_free_var(x) || a.has_free_var(x),
            Term::TApp(f, _) => f.has_free_var(x),
        }
    }

    /// Free propositional variables, from constants, annotations and
    /// atom applications.
    pub fn free_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_free_atoms(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_atoms(&self, bound: &mut Vec<Atom>, out: &mut BTreeSet<Atom>) {
        match self {
            Term::Var(_) => {}
            Term::Const { formula, .. } => formula.collect_free_atoms(bound, out),
            Term::Lam {
                annotation, body, ..
            } => {
                if let Some(a) = annotation {
                    a.collect_free_atoms(bound, out);
                }
                body.collect_free_atoms(bound, out);
            }
            Term::TLam { binder, body } => {
                bound.push(binder.clone());
                body.collect_free_atoms(bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                f.collect_free_atoms(bound, out);
                a.collect_free_atoms(bound, out);
            }
            Term::TApp(f, y) => {
                f.collect_free_atoms(bound, out);
                if !bound.contains(y) {
                    out.insert(y.clone());
                }
            }
        }
    }

    pub fn has_free_atom(&self, x: &Atom) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const { formula, .. } => formula.has_free_atom(x),
            Term::Lam {
                annotation, body, ..
            } => annotation.as_ref().is_some_and(|a| a.has_free_atom(x)) || body.has_free_atom(x),
            Term::TLam { binder, body } => binder != x && body.has_free_atom(x),
            Term::App(f, a) => f.has_free_atom(x) || a.has_free_atom(x),
            Term::TApp(f, y) => y == x || f.has_free_atom(x),
        }
    }

    /// Every term-variable name occurring anywhere, bound or free.
    pub fn all_vars(&self, out: &mut BTreeSet<VarName>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Const { .. } => {}
            Term::Lam { binder, body, .. } => {
                out.insert(binder.clone());
                body.all_vars(out);
            }
            Term::TLam { body, .. } | Term::TApp(body, _) => body.all_vars(out),
            Term::App(f, a) => {
                f.all_vars(out);
                a.all_vars(out);
            }
        }
    }

    /// Every atom name occurring anywhere, bound or free.
    pub fn all_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Term::Var(_) => {}
            Term::Const { formula, .. } => formula.all_atoms(out),
            Term::Lam {
                annotation, body, ..
            } => {
                if let Some(a) = annotation {
                    a.all_atoms(out);
                }
                body.all_atoms(out);
            }
            Term::TLam { binder, body } => {
                out.insert(binder.clone());
                body.all_atoms(out);
            }
            Term::App(f, a) => {
                f.all_atoms(out);
                a.all_atoms(out);
            }
            Term::TApp(f, y) => {
                out.insert(y.clone());
                f.all_atoms(out);
            }
        }
    }

    /// Tags of all tagged constants, in left-to-right order.
    pub fn const_tags(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.visit_consts(&mut |_, tag| out.extend(tag));
        out
    }

    pub fn visit_consts(&self, f: &mut impl FnMut(&Formula, Option<u32>)) {
        match self {
            Term::Var(_) => {}
            Term::Const { formula, tag } => f(formula, *tag),
            Term::Lam { body, .. } | Term::TLam { body, .. } | Term::TApp(body, _) => {
                body.visit_consts(f)
            }
            Term::App(g, a) => {
                g.visit_consts(f);
                a.visit_consts(f);
            }
        }
    }

    /// Split `h T1 ... Tn` into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<SpineArg<'_>>) {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::App(f, a) => {
                    args.push(SpineArg::Term(a));
                    cur = f;
                }
                Term::TApp(f, y) => {
                    args.push(SpineArg::Atom(y));
                    cur = f;
                }
                _ => break,
            }
        }
        args.reverse();
        (cur, args)
    }

    /// True for `c^D T1 ... Tn`, n ≥ 0.
    pub fn is_constant_headed(&self) -> bool {
        matches!(self.spine().0, Term::Const { .. })
    }

    /// Capture-avoiding `self[x := s]`.
    pub fn subst(&self, x: &VarName, s: &Term) -> Term {
        let s_vars = s.free_vars();
        let s_atoms = s.free_atoms();
        self.subst_with(x, s, &s_vars, &s_atoms)
    }

    fn subst_with(
        &self,
        x: &VarName,
        s: &Term,
        s_vars: &BTreeSet<VarName>,
        s_atoms: &BTreeSet<Atom>,
    ) -> Term {
        if !self.has_free_var(x) {
            return self.clone();
        }
        match self {
            Term::Var(_) => s.clone(),
            Term::Const { .. } => unreachable!("constants have no free variables"),
            Term::Lam {
                binder,
                annotation,
                body,
            } => {
                if s_vars.contains(binder) {
                    let fresh = binder.freshen(|n| {
                        s_vars.contains(n) || n == x.as_str() || body.has_free_var(&VarName::new(n))
                    });
                    let renamed = body.subst(binder, &Term::Var(fresh.clone()));
                    Term::Lam {
                        binder: fresh,
                        annotation: annotation.clone(),
                        body: Box::new(renamed.subst_with(x, s, s_vars, s_atoms)),
                    }
                } else {
                    Term::Lam {
                        binder: binder.clone(),
                        annotation: annotation.clone(),
                        body: Box::new(body.subst_with(x, s, s_vars, s_atoms)),
                    }
                }
            }
            Term::TLam { binder, body } => {
                if s_atoms.contains(binder) {
                    let fresh = binder
                        .freshen(|n| s_atoms.contains(n) || body.has_free_atom(&Atom::new(n)));
                    let renamed = body.subst_atom(binder, &fresh);
                    Term::tlam(fresh, renamed.subst_with(x, s, s_vars, s_atoms))
                } else {
                    Term::tlam(binder.clone(), body.subst_with(x, s, s_vars, s_atoms))
                }
            }
            Term::App(f, a) => Term::app(
                f.subst_with(x, s, s_vars, s_atoms),
                a.subst_with(x, s, s_vars, s_atoms),
            ),
            Term::TApp(f, y) => Term::tapp(f.subst_with(x, s, s_vars, s_atoms), y.clone()),
        }
    }

    /// Capture-avoiding `self[x := y]` for atoms.
    pub fn subst_atom(&self, x: &Atom, y: &Atom) -> Term {
        if !self.has_free_atom(x) {
            return self.clone();
        }
        match self {
            Term::Var(_) => self.clone(),
            Term::Const { formula, tag } => Term::Const {
                formula: formula.subst_atom(x, y),
                tag: *tag,
            },
            Term::Lam {
                binder,
                annotation,
                body,
            } => Term::Lam {
                binder: binder.clone(),
                annotation: annotation.as_ref().map(|a| a.subst_atom(x, y)),
                body: Box::new(body.subst_atom(x, y)),
            },
            Term::TLam { binder, body } => {
                // binder != x, otherwise x would not be free.
                if binder == y {
                    let fresh = binder.freshen(|n| {
                        n == y.as_str() || n == x.as_str() || body.has_free_atom(&Atom::new(n))
                    });
                    let renamed = body.subst_atom(binder, &fresh);
                    Term::tlam(fresh, renamed.subst_atom(x, y))
                } else {
                    Term::tlam(binder.clone(), body.subst_atom(x, y))
                }
            }
            Term::App(f, a) => Term::app(f.subst_atom(x, y), a.subst_atom(x, y)),
            Term::TApp(f, z) => {
                let z = if z == x { y.clone() } else { z.clone() };
                Term::tapp(f.subst_atom(x, y), z)
            }
        }
    }

    /// Simultaneous capture-avoiding substitution, applied left to right
    /// on a term whose substituted variables do not occur in the
    /// replacements.
    pub fn subst_many(&self, pairs: &[(VarName, Term)]) -> Term {
        // Rename the targets first so that earlier replacements cannot
        // be hit by later ones.
        let mut avoid = BTreeSet::new();
        self.all_vars(&mut avoid);
        for (x, s) in pairs {
            avoid.insert(x.clone());
            s.all_vars(&mut avoid);
        }
        let mut staged = self.clone();
        let mut temps = Vec::with_capacity(pairs.len());
        for (x, _) in pairs {
            let tmp = x.freshen(|n| avoid.contains(n));
            avoid.insert(tmp.clone());
            staged = staged.subst(x, &Term::Var(tmp.clone()));
            temps.push(tmp);
        }
        for (tmp, (_, s)) in temps.iter().zip(pairs) {
            staged = staged.subst(tmp, s);
        }
        staged
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        let mut scopes = Scopes::default();
        alpha_eq_in(self, other, &mut scopes)
    }

    /// A string that is equal for two terms iff they are α-equivalent.
    pub fn alpha_key(&self) -> String {
        let mut out = String::new();
        key_in(self, &mut Vec::new(), &mut Vec::new(), &mut out);
        out
    }

    /// Remove every λ annotation.
    pub fn erase_annotations(&self) -> Term {
        match self {
            Term::Var(_) | Term::Const { .. } => self.clone(),
            Term::Lam { binder, body, .. } => Term::lam(binder.clone(), body.erase_annotations()),
            Term::TLam { binder, body } => Term::tlam(binder.clone(), body.erase_annotations()),
            Term::App(f, a) => Term::app(f.erase_annotations(), a.erase_annotations()),
            Term::TApp(f, y) => Term::tapp(f.erase_annotations(), y.clone()),
        }
    }

    /// Child by index: `App` has children 0 (function) and 1 (argument);
    /// abstractions and atom applications have a single child 0.
    pub fn child(&self, index: usize) -> Option<&Term> {
        match (self, index) {
            (Term::App(f, _), 0) => Some(f),
            (Term::App(_, a), 1) => Some(a),
            (Term::Lam { body, .. }, 0) | (Term::TLam { body, .. }, 0) => Some(body),
            (Term::TApp(f, _), 0) => Some(f),
            _ => None,
        }
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Term> {
        path.iter().try_fold(self, |t, &i| t.child(i))
    }

    /// Rebuild `self` with the subterm at `path` replaced by `f(subterm)`.
    pub fn map_at_path(&self, path: &[usize], f: impl FnOnce(&Term) -> Term) -> Option<Term> {
        let Some((&first, rest)) = path.split_first() else {
            return Some(f(self));
        };
        Some(match (self, first) {
            (Term::App(g, a), 0) => Term::App(Box::new(g.map_at_path(rest, f)?), a.clone()),
            (Term::App(g, a), 1) => Term::App(g.clone(), Box::new(a.map_at_path(rest, f)?)),
            (
                Term::Lam {
                    binder,
                    annotation,
                    body,
                },
                0,
            ) => Term::Lam {
                binder: binder.clone(),
                annotation: annotation.clone(),
                body: Box::new(body.map_at_path(rest, f)?),
            },
            (Term::TLam { binder, body }, 0) => {
                Term::tlam(binder.clone(), body.map_at_path(rest, f)?)
            }
            (Term::TApp(g, y), 0) => Term::tapp(g.map_at_path(rest, f)?, y.clone()),
            _ => return None,
        })
    }
}

#[derive(Default)]
struct Scopes {
    vars_l: Vec<VarName>,
    vars_r: Vec<VarName>,
    atoms_l: Vec<Atom>,
    atoms_r: Vec<Atom>,
}

fn atoms_eq(x: &Atom, y: &Atom, sc: &Scopes) -> bool {
    match (bound_index(&sc.atoms_l, x), bound_index(&sc.atoms_r, y)) {
        (Some(i), Some(j)) => i == j,
        (None, None) => x == y,
        _ => false,
    }
}

fn opt_formula_eq(a: &Option<Formula>, b: &Option<Formula>, sc: &mut Scopes) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => formula_alpha_eq_in(a, b, &mut sc.atoms_l, &mut sc.atoms_r),
        _ => false,
    }
}

fn alpha_eq_in(a: &Term, b: &Term, sc: &mut Scopes) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            match (bound_index(&sc.vars_l, x), bound_index(&sc.vars_r, y)) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (
            Term::Const {
                formula: f1,
                tag: t1,
            },
            Term::Const {
                formula: f2,
                tag: t2,
            },
        ) => t1 == t2 && formula_alpha_eq_in(f1, f2, &mut sc.atoms_l, &mut sc.atoms_r),
        (
            Term::Lam {
                binder: x,
                annotation: a1,
                body: b1,
            },
            Term::Lam {
                binder: y,
                annotation: a2,
                body: b2,
            },
        ) => {
            if !opt_formula_eq(a1, a2, sc) {
                return false;
            }
            sc.vars_l.push(x.clone());
            sc.vars_r.push(y.clone());
            let eq = alpha_eq_in(b1, b2, sc);
            sc.vars_l.pop();
            sc.vars_r.pop();
            eq
        }
        (
            Term::TLam {
                binder: x,
                body: b1,
            },
            Term::TLam {
                binder: y,
                body: b2,
            },
        ) => {
            sc.atoms_l.push(x.clone());
            sc.atoms_r.push(y.clone());
            let eq = alpha_eq_in(b1, b2, sc);
            sc.atoms_l.pop();
            sc.atoms_r.pop();
            eq
        }
        (Term::App(f1, a1), Term::App(f2, a2)) => {
            alpha_eq_in(f1, f2, sc) && alpha_eq_in(a1, a2, sc)
        }
        (Term::TApp(f1, x), Term::TApp(f2, y)) => atoms_eq(x, y, sc) && alpha_eq_in(f1, f2, sc),
        _ => false,
    }
}

fn key_formula(f: &Formula, atoms: &mut Vec<Atom>, out: &mut String) {
    match f {
        Formula::Atom(a) => match bound_index(atoms, a) {
            Some(i) => out.push_str(&format!("#{i}")),
            None => out.push_str(a.as_str()),
        },
        Formula::Arrow(l, r) => {
            out.push('(');
            key_formula(l, atoms, out);
            out.push('>');
            key_formula(r, atoms, out);
            out.push(')');
        }
        Formula::Forall(x, b) => {
            out.push_str("A.");
            atoms.push(x.clone());
            key_formula(b, atoms, out);
            atoms.pop();
        }
    }
}

fn key_in(t: &Term, vars: &mut Vec<VarName>, atoms: &mut Vec<Atom>, out: &mut String) {
    match t {
        Term::Var(x) => match bound_index(vars, x) {
            Some(i) => out.push_str(&format!("%{i}")),
            None => out.push_str(x.as_str()),
        },
        Term::Const { formula, tag } => {
            out.push_str("c{");
            key_formula(formula, atoms, out);
            out.push('}');
            if let Some(tag) = tag {
                out.push_str(&format!("#{tag}"));
            }
        }
        Term::Lam {
            binder,
            annotation,
            body,
        } => {
            out.push('\\');
            if let Some(a) = annotation {
                out.push(':');
                key_formula(a, atoms, out);
            }
            out.push('.');
            vars.push(binder.clone());
            key_in(body, vars, atoms, out);
            vars.pop();
        }
        Term::TLam { binder, body } => {
            out.push_str("/\\.");
            atoms.push(binder.clone());
            key_in(body, vars, atoms, out);
            atoms.pop();
        }
        Term::App(f, a) => {
            out.push('(');
            key_in(f, vars, atoms, out);
            out.push(' ');
            key_in(a, vars, atoms, out);
            out.push(')');
        }
        Term::TApp(f, y) => {
            out.push('(');
            key_in(f, vars, atoms, out);
            out.push_str(" @");
            match bound_index(atoms, y) {
                Some(i) => out.push_str(&format!("#{i}")),
                None => out.push_str(y.as_str()),
            }
            out.push(')');
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.alpha_eq(other)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.alpha_key().hash(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn substitution_renames_to_avoid_capture() {
        let out = t("\\y. x").subst(&VarName::new("x"), &t("y"));
        assert_eq!(out, t("\\z. y"));
        match &out {
            Term::Lam { binder, .. } => assert_ne!(binder.as_str(), "y"),
            _ => panic!("expected a lambda"),
        }
    }

    #[test]
    fn substitution_basics() {
        assert_eq!(t("x").subst(&VarName::new("x"), &t("c{X}")), t("c{X}"));
        assert_eq!(
            t("x x").subst(&VarName::new("x"), &t("\\y. y")),
            t("(\\y. y) (\\y. y)")
        );
    }

    #[test]
    fn substitution_under_atom_binder_renames() {
        // c{X} must not be captured by the /\X binder.
        let out = t("/\\X. x").subst(&VarName::new("x"), &t("c{X}"));
        assert_eq!(out, t("/\\Z. c{X}"));
        assert!(out.free_atoms().contains("X"));
    }

    #[test]
    fn atom_substitution() {
        let out = t("f @X").subst_atom(&Atom::new("X"), &Atom::new("Y"));
        assert_eq!(out, t("f @Y"));
        let out = t("/\\Y. c{X -> Y}").subst_atom(&Atom::new("X"), &Atom::new("Y"));
        assert_eq!(out, t("/\\Z. c{Y -> Z}"));
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(t("\\x. x"), t("\\y. y"));
        assert_ne!(t("\\x. \\y. x"), t("\\x. \\y. y"));
        assert_eq!(t("/\\X. \\x:X. x"), t("/\\Y. \\z:Y. z"));
        assert_ne!(t("c{X}#1"), t("c{X}#2"));
        assert_ne!(t("c{X}#1"), t("c{X}"));
        assert_eq!(t("\\x. x").alpha_key(), t("\\q. q").alpha_key());
    }

    #[test]
    fn spine_decomposition() {
        let term = t("c{forall X. X -> X} @Y c{Y}");
        let (head, args) = term.spine();
        assert!(matches!(head, Term::Const { .. }));
        assert_eq!(args.len(), 2);
        assert!(term.is_constant_headed());
        assert!(!t("(\\x. x) c{X}").is_constant_headed());
    }

    #[test]
    fn simultaneous_substitution_does_not_chain() {
        let out =
            t("x y").subst_many(&[(VarName::new("x"), t("y")), (VarName::new("y"), t("c{X}"))]);
        assert_eq!(out, t("y c{X}"));
    }
}
