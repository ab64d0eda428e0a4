//! Bidirectional checking of sequents `Γ ⊢ t : A` and the derivation
//! kernel that replays them.
//!
//! Checking mode handles λ against `→` and Λ against `∀`; everything else
//! is synthesized from its head. β-normal terms are always spine-headed,
//! so the checker is complete on them. Annotated λ-binders, and redexes
//! whose argument synthesizes, widen the fragment to many non-normal
//! terms.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::syntax::{Atom, Context, Formula, Term, VarName};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    AxVar,
    AxConst,
    /// `→i`, recording the variable the premise extends the context with.
    ImpIntro {
        var: VarName,
    },
    ImpElim,
    /// `∀i`, recording the eigen-atom substituted into the premise.
    ForallIntro {
        eigen: Atom,
    },
    ForallElim,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::AxVar => "ax-var",
            Rule::AxConst => "ax-const",
            Rule::ImpIntro { .. } => "->i",
            Rule::ImpElim => "->e",
            Rule::ForallIntro { .. } => "forall-i",
            Rule::ForallElim => "forall-e",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub context: Context,
    pub term: Term,
    pub formula: Formula,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.context.is_empty() {
            write!(f, "|- {} : {}", self.term, self.formula)
        } else {
            write!(f, "{} |- {} : {}", self.context, self.term, self.formula)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub conclusion: Judgment,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn leaf(rule: Rule, context: &Context, term: &Term, formula: Formula) -> Derivation {
        Derivation {
            rule,
            conclusion: Judgment {
                context: context.clone(),
                term: term.clone(),
                formula,
            },
            premises: Vec::new(),
        }
    }

    fn node(
        rule: Rule,
        context: &Context,
        term: &Term,
        formula: Formula,
        premises: Vec<Derivation>,
    ) -> Derivation {
        Derivation {
            rule,
            conclusion: Judgment {
                context: context.clone(),
                term: term.clone(),
                formula,
            },
            premises,
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.conclusion.formula
    }

    /// Number of rule instances.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    /// Check every node against its rule. On failure, reports the child
    /// index path of the offending node.
    pub fn replay(&self) -> Result<(), ReplayFailure> {
        replay_at(self, &mut Vec::new())
    }

    /// Indented tree, conclusion first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&format!("[{}] {}\n", self.rule.name(), self.conclusion));
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }
}

impl Serialize for Derivation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Derivation", 5)?;
        st.serialize_field("rule", self.rule.name())?;
        st.serialize_field("context", &self.conclusion.context)?;
        st.serialize_field("term", &self.conclusion.term)?;
        st.serialize_field("formula", &self.conclusion.formula)?;
        st.serialize_field("premises", &self.premises)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(VarName),
    #[error("forall-elimination instantiates non-atomic formula `{0}`")]
    AtomRestrictionViolated(Formula),
    #[error("atom `{atom}` is free in the context [{context}], so /\\{atom} cannot be introduced ({cause})")]
    SideConditionViolated {
        atom: Atom,
        context: Context,
        cause: Box<TypeError>,
    },
    #[error("`{term}` was expected to have {expected}, but has {found}")]
    Mismatch {
        term: Term,
        expected: String,
        found: String,
    },
    #[error("cannot synthesize a formula for `{0}`; annotate its binder")]
    CannotSynthesize(Term),
}

fn mismatch(term: &Term, expected: impl fmt::Display, found: impl fmt::Display) -> TypeError {
    TypeError::Mismatch {
        term: term.clone(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// Rename the λ-binder `x` of `body` so that it can extend `ctx`.
fn open_binder(ctx: &Context, x: &VarName, body: &Term) -> (VarName, Term) {
    if !ctx.contains(x) {
        return (x.clone(), body.clone());
    }
    let y = x.freshen(|n| {
        let v = VarName::new(n);
        ctx.contains(&v) || body.has_free_var(&v)
    });
    let renamed = body.subst(x, &Term::Var(y.clone()));
    (y, renamed)
}

/// Choose an eigen-atom for `/\x. body` that is not free in `ctx` nor
/// in `extra`.
fn eigen_atom(ctx: &Context, x: &Atom, body: &Term, extra: Option<&Formula>) -> Atom {
    let pfv = ctx.free_atoms();
    let clashes = |a: &Atom| pfv.contains(a) || extra.is_some_and(|f| f.has_free_atom(a));
    if !clashes(x) {
        return x.clone();
    }
    x.freshen(|n| {
        let a = Atom::new(n);
        clashes(&a) || body.has_free_atom(&a)
    })
}

/// Check `ctx ⊢ t : expected`.
pub fn check(ctx: &Context, t: &Term, expected: &Formula) -> Result<Derivation, TypeError> {
    match (t, expected) {
        (
            Term::Lam {
                binder,
                annotation,
                body,
            },
            Formula::Arrow(dom, cod),
        ) => {
            if let Some(ann) = annotation {
                if ann != &**dom {
                    return Err(mismatch(
                        t,
                        format_args!("domain `{dom}`"),
                        format_args!("annotation `{ann}`"),
                    ));
                }
            }
            let (y, body) = open_binder(ctx, binder, body);
            let inner = ctx
                .extend(y.clone(), (**dom).clone())
                .expect("binder was freshened");
            let premise = check(&inner, &body, cod)?;
            Ok(Derivation::node(
                Rule::ImpIntro { var: y },
                ctx,
                t,
                expected.clone(),
                vec![premise],
            ))
        }
        (Term::Lam { .. }, _) => Err(mismatch(t, format_args!("`{expected}`"), "an implication")),
        (Term::TLam { binder, body }, Formula::Forall(y, goal)) => {
            let z = eigen_atom(ctx, binder, body, Some(expected));
            let body_z = body.subst_atom(binder, &z);
            let goal_z = goal.subst_atom(y, &z);
            match check(ctx, &body_z, &goal_z) {
                Ok(premise) => Ok(Derivation::node(
                    Rule::ForallIntro { eigen: z },
                    ctx,
                    t,
                    expected.clone(),
                    vec![premise],
                )),
                Err(cause) if ctx.free_atoms().contains(binder) => {
                    Err(TypeError::SideConditionViolated {
                        atom: binder.clone(),
                        context: ctx.clone(),
                        cause: Box::new(cause),
                    })
                }
                Err(e) => Err(e),
            }
        }
        (Term::TLam { .. }, _) => Err(mismatch(
            t,
            format_args!("`{expected}`"),
            "a universal formula",
        )),
        _ => {
            let mut d = synthesize(ctx, t)?;
            if d.formula() != expected {
                return Err(mismatch(
                    t,
                    format_args!("`{expected}`"),
                    format_args!("`{}`", d.formula()),
                ));
            }
            d.conclusion.formula = expected.clone();
            Ok(d)
        }
    }
}

/// Synthesize a formula for `t` under `ctx`, returning the derivation.
pub fn synthesize(ctx: &Context, t: &Term) -> Result<Derivation, TypeError> {
    match t {
        Term::Var(x) => match ctx.lookup(x) {
            Some(a) => Ok(Derivation::leaf(Rule::AxVar, ctx, t, a.clone())),
            None => Err(TypeError::UnboundVariable(x.clone())),
        },
        Term::Const { formula, .. } => Ok(Derivation::leaf(Rule::AxConst, ctx, t, formula.clone())),
        Term::Lam {
            binder,
            annotation: Some(dom),
            body,
        } => {
            let (y, body) = open_binder(ctx, binder, body);
            let inner = ctx
                .extend(y.clone(), dom.clone())
                .expect("binder was freshened");
            let premise = synthesize(&inner, &body)?;
            let formula = Formula::arrow(dom.clone(), premise.formula().clone());
            Ok(Derivation::node(
                Rule::ImpIntro { var: y },
                ctx,
                t,
                formula,
                vec![premise],
            ))
        }
        Term::Lam {
            annotation: None, ..
        } => Err(TypeError::CannotSynthesize(t.clone())),
        Term::TLam { binder, body } => {
            let z = eigen_atom(ctx, binder, body, None);
            let premise = synthesize(ctx, &body.subst_atom(binder, &z))?;
            let formula = Formula::forall(z.clone(), premise.formula().clone());
            Ok(Derivation::node(
                Rule::ForallIntro { eigen: z },
                ctx,
                t,
                formula,
                vec![premise],
            ))
        }
        Term::App(fun, arg) => {
            if let Term::Lam {
                binder,
                annotation: None,
                body,
            } = &**fun
            {
                // (\x. body) arg: take the domain from the argument.
                let arg_d = synthesize(ctx, arg)?;
                let dom = arg_d.formula().clone();
                let (y, body) = open_binder(ctx, binder, body);
                let inner = ctx
                    .extend(y.clone(), dom.clone())
                    .expect("binder was freshened");
                let body_d = synthesize(&inner, &body)?;
                let cod = body_d.formula().clone();
                let fun_d = Derivation::node(
                    Rule::ImpIntro { var: y },
                    ctx,
                    fun,
                    Formula::arrow(dom, cod.clone()),
                    vec![body_d],
                );
                return Ok(Derivation::node(
                    Rule::ImpElim,
                    ctx,
                    t,
                    cod,
                    vec![fun_d, arg_d],
                ));
            }
            let fun_d = synthesize(ctx, fun)?;
            match fun_d.formula().clone() {
                Formula::Arrow(dom, cod) => {
                    let arg_d = check(ctx, arg, &dom)?;
                    Ok(Derivation::node(
                        Rule::ImpElim,
                        ctx,
                        t,
                        *cod,
                        vec![fun_d, arg_d],
                    ))
                }
                other => Err(mismatch(fun, "an implication", format_args!("`{other}`"))),
            }
        }
        Term::TApp(fun, y) => {
            let fun_d = synthesize(ctx, fun)?;
            match fun_d.formula().clone() {
                Formula::Forall(x, body) => {
                    let formula = body.subst_atom(&x, y);
                    Ok(Derivation::node(
                        Rule::ForallElim,
                        ctx,
                        t,
                        formula,
                        vec![fun_d],
                    ))
                }
                other => Err(mismatch(
                    fun,
                    "a universal formula",
                    format_args!("`{other}`"),
                )),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rule instance at node {path:?}: {reason}")]
pub struct ReplayFailure {
    pub path: Vec<usize>,
    pub reason: String,
}

/// Kernel check of a derivation tree.
pub fn replay(d: &Derivation) -> bool {
    d.replay().is_ok()
}

/// If `instance` is `pattern[x := C]` for some C, return C. Returns
/// `None` when x does not occur in `pattern` and the two differ, or when
/// no C fits.
fn match_instance(pattern: &Formula, x: &Atom, instance: &Formula) -> Option<Option<Formula>> {
    fn go(
        p: &Formula,
        x: &Atom,
        i: &Formula,
        bound_p: &mut Vec<Atom>,
        bound_i: &mut Vec<Atom>,
        found: &mut Option<Formula>,
    ) -> bool {
        match (p, i) {
            (Formula::Atom(a), _) if a == x && !bound_p.contains(a) => {
                // A candidate must not mention atoms bound inside the pattern.
                if bound_i.iter().any(|b| i.has_free_atom(b)) {
                    return false;
                }
                match found {
                    Some(prev) => prev == i,
                    None => {
                        *found = Some(i.clone());
                        true
                    }
                }
            }
            (Formula::Atom(a), Formula::Atom(b)) => {
                let ia = bound_p.iter().rev().position(|c| c == a);
                let ib = bound_i.iter().rev().position(|c| c == b);
                match (ia, ib) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => a == b,
                    _ => false,
                }
            }
            (Formula::Arrow(l1, r1), Formula::Arrow(l2, r2)) => {
                go(l1, x, l2, bound_p, bound_i, found) && go(r1, x, r2, bound_p, bound_i, found)
            }
            (Formula::Forall(a, b1), Formula::Forall(b, b2)) => {
                bound_p.push(a.clone());
                bound_i.push(b.clone());
                let ok = go(b1, x, b2, bound_p, bound_i, found);
                bound_p.pop();
                bound_i.pop();
                ok
            }
            _ => false,
        }
    }
    let mut found = None;
    go(
        pattern,
        x,
        instance,
        &mut Vec::new(),
        &mut Vec::new(),
        &mut found,
    )
    .then_some(found)
}

fn replay_at(d: &Derivation, path: &mut Vec<usize>) -> Result<(), ReplayFailure> {
    let fail = |reason: String, path: &Vec<usize>| {
        Err(ReplayFailure {
            path: path.clone(),
            reason,
        })
    };
    let Judgment {
        context: ctx,
        term,
        formula,
    } = &d.conclusion;
    if ctx.has_duplicates() {
        return fail(format!("context [{ctx}] binds a variable twice"), path);
    }
    let arity = match d.rule {
        Rule::AxVar | Rule::AxConst => 0,
        Rule::ImpIntro { .. } | Rule::ForallIntro { .. } | Rule::ForallElim => 1,
        Rule::ImpElim => 2,
    };
    if d.premises.len() != arity {
        return fail(
            format!(
                "{} expects {arity} premises, found {}",
                d.rule.name(),
                d.premises.len()
            ),
            path,
        );
    }
    let prem = |i: usize| &d.premises[i].conclusion;
    let same_ctx = |j: &Judgment| &j.context == ctx;
    let local: Result<(), String> = match (&d.rule, term) {
        (Rule::AxVar, Term::Var(x)) => match ctx.lookup(x) {
            Some(a) if a == formula => Ok(()),
            Some(a) => Err(format!("`{x}` has `{a}` in the context, not `{formula}`")),
            None => Err(format!("`{x}` is not in the context")),
        },
        (Rule::AxConst, Term::Const { formula: a, .. }) => {
            if a == formula {
                Ok(())
            } else {
                Err(format!("constant of `{a}` concluded at `{formula}`"))
            }
        }
        (
            Rule::ImpIntro { var: y },
            Term::Lam {
                binder,
                annotation,
                body,
            },
        ) => {
            let p = prem(0);
            match formula {
                Formula::Arrow(dom, cod) => {
                    let expected_ctx = ctx.extend(y.clone(), (**dom).clone());
                    if annotation.as_ref().is_some_and(|a| a != &**dom) {
                        Err("annotation differs from the implication's domain".into())
                    } else if y != binder && body.has_free_var(y) {
                        Err(format!("premise variable `{y}` is free in the body"))
                    } else if expected_ctx.as_ref().ok() != Some(&p.context) {
                        Err(format!(
                            "premise context must extend the conclusion's by `{y} : {dom}`"
                        ))
                    } else if p.term != body.subst(binder, &Term::Var(y.clone())) {
                        Err("premise term is not the abstraction body".into())
                    } else if p.formula != **cod {
                        Err("premise formula is not the implication's codomain".into())
                    } else {
                        Ok(())
                    }
                }
                _ => Err(format!("->i concludes non-implication `{formula}`")),
            }
        }
        (Rule::ImpElim, Term::App(fun, arg)) => {
            let (pf, pa) = (prem(0), prem(1));
            if !same_ctx(pf) || !same_ctx(pa) {
                Err("premise contexts differ from the conclusion's".into())
            } else if pf.term != **fun || pa.term != **arg {
                Err("premise terms do not match the application".into())
            } else if pf.formula != Formula::arrow(pa.formula.clone(), formula.clone()) {
                Err(format!(
                    "`{}` is not `{} -> {}`",
                    pf.formula, pa.formula, formula
                ))
            } else {
                Ok(())
            }
        }
        (Rule::ForallIntro { eigen: z }, Term::TLam { binder, body }) => {
            let p = prem(0);
            match formula {
                Formula::Forall(y, goal) => {
                    if !same_ctx(p) {
                        Err("premise context differs from the conclusion's".into())
                    } else if ctx.free_atoms().contains(z) {
                        Err(format!("eigen-atom `{z}` is free in the context"))
                    } else if z != binder && body.has_free_atom(z) {
                        Err(format!("eigen-atom `{z}` is free in the abstraction body"))
                    } else if z != y && goal.has_free_atom(z) {
                        Err(format!("eigen-atom `{z}` is free in `{formula}`"))
                    } else if p.term != body.subst_atom(binder, z) {
                        Err("premise term is not the abstraction body".into())
                    } else if p.formula != goal.subst_atom(y, z) {
                        Err("premise formula is not the instantiated body".into())
                    } else {
                        Ok(())
                    }
                }
                _ => Err(format!("forall-i concludes non-universal `{formula}`")),
            }
        }
        (Rule::ForallElim, Term::TApp(fun, y)) => {
            let p = prem(0);
            match &p.formula {
                Formula::Forall(x, body) if same_ctx(p) && p.term == **fun => {
                    match match_instance(body, x, formula) {
                        Some(Some(inst)) if inst.as_atom().is_none() => {
                            Err(TypeError::AtomRestrictionViolated(inst).to_string())
                        }
                        _ if body.subst_atom(x, y) == *formula => Ok(()),
                        _ => Err(format!(
                            "`{formula}` is not `{}` instantiated at `{y}`",
                            p.formula
                        )),
                    }
                }
                Formula::Forall(..) => Err("premise does not match the atom application".into()),
                other => Err(format!("forall-e premise has non-universal `{other}`")),
            }
        }
        (rule, _) => Err(format!("rule {} does not apply to `{term}`", rule.name())),
    };
    if let Err(reason) = local {
        return fail(reason, path);
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        replay_at(p, path)?;
        path.pop();
    }
    Ok(())
}
