//! Exhaustive search for β-normal proof-terms of a formula.
//!
//! Normal terms are either introductions (λ against `→`, Λ against `∀`)
//! or a head variable/constant followed by an elimination spine, so the
//! search builds exactly those shapes instead of filtering raw terms.

use std::collections::{BTreeSet, HashMap};

use crate::syntax::{Atom, Context, Formula, Term, VarName};

use super::AtomicBase;

const VAR_NAMES: &[&str] = &["x", "y", "z", "u", "v", "w"];

/// All β-normal proof-terms over `base` with at most `size_bound` nodes
/// that check against `goal` under `ctx`, sorted by canonical text.
///
/// Atom applications range over the free atoms of `goal` and `ctx`, the
/// atoms of `base`, and the eigen-atoms in scope.
pub fn enumerate_normal(
    ctx: &Context,
    goal: &Formula,
    base: &AtomicBase,
    size_bound: usize,
) -> Vec<Term> {
    enumerate_normal_with(ctx, goal, base, size_bound, &BTreeSet::new())
}

/// As [`enumerate_normal`], with `extra_atoms` added to the atoms that
/// atom applications may use.
pub fn enumerate_normal_with(
    ctx: &Context,
    goal: &Formula,
    base: &AtomicBase,
    size_bound: usize,
    extra_atoms: &BTreeSet<Atom>,
) -> Vec<Term> {
    let mut universe: BTreeSet<Atom> = extra_atoms.clone();
    universe.extend(goal.free_atoms());
    universe.extend(ctx.free_atoms());
    universe.extend(base.atoms().cloned());
    let mut search = Search {
        base,
        scope: universe.into_iter().collect(),
        memo: HashMap::new(),
    };
    let mut out: Vec<Term> = (1..=size_bound)
        .flat_map(|n| search.terms(ctx, goal, n))
        .collect();
    let mut seen = BTreeSet::new();
    out.retain(|t| seen.insert(t.alpha_key()));
    let mut keyed: Vec<(String, Term)> = out.into_iter().map(|t| (t.to_string(), t)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, t)| t).collect()
}

type MemoKey = (Context, Formula, usize, Vec<Atom>);

struct Search<'a> {
    base: &'a AtomicBase,
    /// Atoms available to atom applications, innermost eigen-atom last.
    scope: Vec<Atom>,
    memo: HashMap<MemoKey, Vec<Term>>,
}

impl Search<'_> {
    fn fresh_var(ctx: &Context) -> VarName {
        VAR_NAMES
            .iter()
            .map(|n| VarName::new(n))
            .find(|v| !ctx.contains(v))
            .unwrap_or_else(|| ctx.fresh_var(&VarName::new("x")))
    }

    fn eigen(&self, ctx: &Context, binder: &Atom) -> Atom {
        let pfv = ctx.free_atoms();
        binder.freshen(|n| pfv.contains(n) || self.scope.iter().any(|a| a.as_str() == n))
    }

    /// Terms of exactly `size` nodes.
    fn terms(&mut self, ctx: &Context, goal: &Formula, size: usize) -> Vec<Term> {
        if size == 0 {
            return Vec::new();
        }
        let key = (ctx.clone(), goal.clone(), size, self.scope.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut out = Vec::new();
        match goal {
            Formula::Arrow(dom, cod) if size >= 2 => {
                let x = Self::fresh_var(ctx);
                let inner = ctx
                    .extend(x.clone(), (**dom).clone())
                    .expect("fresh variable");
                for body in self.terms(&inner, cod, size - 1) {
                    out.push(Term::lam(x.clone(), body));
                }
            }
            Formula::Forall(y, body) if size >= 2 => {
                let z = self.eigen(ctx, y);
                let goal_z = body.subst_atom(y, &z);
                self.scope.push(z.clone());
                for b in self.terms(ctx, &goal_z, size - 1) {
                    out.push(Term::tlam(z.clone(), b));
                }
                self.scope.pop();
            }
            _ => {}
        }
        let mut heads: Vec<(Term, Formula)> = ctx
            .entries()
            .iter()
            .map(|(x, a)| (Term::Var(x.clone()), a.clone()))
            .collect();
        heads.extend(self.base.atoms().map(|x| {
            let f = Formula::Atom(x.clone());
            (Term::constant(f.clone()), f)
        }));
        for (head, ty) in heads {
            self.spines(ctx, head, &ty, goal, size - 1, &mut out);
        }
        self.memo.insert(key, out.clone());
        out
    }

    fn spines(
        &mut self,
        ctx: &Context,
        acc: Term,
        ty: &Formula,
        goal: &Formula,
        remaining: usize,
        out: &mut Vec<Term>,
    ) {
        if remaining == 0 {
            if ty == goal {
                out.push(acc);
            }
            return;
        }
        match ty {
            Formula::Atom(_) => {}
            Formula::Arrow(dom, cod) => {
                for k in 1..remaining {
                    for arg in self.terms(ctx, dom, k) {
                        let next = Term::app(acc.clone(), arg);
                        self.spines(ctx, next, cod, goal, remaining - 1 - k, out);
                    }
                }
            }
            Formula::Forall(x, body) => {
                for y in self.scope.clone() {
                    let next = Term::tapp(acc.clone(), y.clone());
                    self.spines(ctx, next, &body.subst_atom(x, &y), goal, remaining - 1, out);
                }
            }
        }
    }
}
