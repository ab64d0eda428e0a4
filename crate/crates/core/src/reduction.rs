//! β-reduction with explicit fuel, recorded traces and η-expansion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Atom, Term, VarName};

/// Upper bound on the number of reduction steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fuel(u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("fuel must be at least 1")]
pub struct ZeroFuel;

impl Fuel {
    pub const DEFAULT: Fuel = Fuel(10_000);

    pub fn new(steps: u64) -> Result<Fuel, ZeroFuel> {
        if steps == 0 {
            Err(ZeroFuel)
        } else {
            Ok(Fuel(steps))
        }
    }

    pub fn steps(self) -> u64 {
        self.0
    }
}

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel::DEFAULT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepRule {
    #[serde(rename = "beta-term")]
    BetaTerm,
    #[serde(rename = "beta-atom")]
    BetaAtom,
    #[serde(rename = "eta-expand")]
    EtaExpand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStatus {
    Normalized,
    FuelExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub path: Vec<usize>,
    pub rule: StepRule,
    pub result: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub start: Term,
    pub steps: Vec<TraceStep>,
    pub status: TraceStatus,
}

/// Reduction strategy. Normal order is canonical; the innermost strategy
/// exists for cross-checking confluence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    NormalOrder,
    RightmostInnermost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaMode {
    Term,
    Atom,
}

/// Contract `t` itself if it is a redex.
pub fn contract(t: &Term) -> Option<(Term, StepRule)> {
    match t {
        Term::App(f, s) => match &**f {
            Term::Lam { binder, body, .. } => Some((body.subst(binder, s), StepRule::BetaTerm)),
            _ => None,
        },
        Term::TApp(f, y) => match &**f {
            Term::TLam { binder, body } => Some((body.subst_atom(binder, y), StepRule::BetaAtom)),
            _ => None,
        },
        _ => None,
    }
}

pub fn is_redex(t: &Term) -> bool {
    matches!(t, Term::App(f, _) if matches!(**f, Term::Lam { .. }))
        || matches!(t, Term::TApp(f, _) if matches!(**f, Term::TLam { .. }))
}

/// True iff no subterm is a redex.
pub fn is_normal(t: &Term) -> bool {
    if is_redex(t) {
        return false;
    }
    match t {
        Term::Var(_) | Term::Const { .. } => true,
        Term::Lam { body, .. } | Term::TLam { body, .. } | Term::TApp(body, _) => is_normal(body),
        Term::App(f, a) => is_normal(f) && is_normal(a),
    }
}

fn rebuild(t: &Term, index: usize, child: Term) -> Term {
    match (t, index) {
        (Term::App(_, a), 0) => Term::App(Box::new(child), a.clone()),
        (Term::App(f, _), 1) => Term::App(f.clone(), Box::new(child)),
        (
            Term::Lam {
                binder, annotation, ..
            },
            0,
        ) => Term::Lam {
            binder: binder.clone(),
            annotation: annotation.clone(),
            body: Box::new(child),
        },
        (Term::TLam { binder, .. }, 0) => Term::tlam(binder.clone(), child),
        (Term::TApp(_, y), 0) => Term::tapp(child, y.clone()),
        _ => unreachable!("no child {index}"),
    }
}

fn child_order(t: &Term, strategy: Strategy) -> &'static [usize] {
    let two = matches!(t, Term::App(..));
    match (strategy, two) {
        (_, false) => match t {
            Term::Var(_) | Term::Const { .. } => &[],
            _ => &[0],
        },
        (Strategy::NormalOrder, true) => &[0, 1],
        (Strategy::RightmostInnermost, true) => &[1, 0],
    }
}

fn step_in(t: &Term, strategy: Strategy, path: &mut Vec<usize>) -> Option<(Term, StepRule)> {
    if strategy == Strategy::NormalOrder {
        if let Some(r) = contract(t) {
            return Some(r);
        }
    }
    for &i in child_order(t, strategy) {
        path.push(i);
        let child = t.child(i).expect("child index in range");
        if let Some((c, rule)) = step_in(child, strategy, path) {
            return Some((rebuild(t, i, c), rule));
        }
        path.pop();
    }
    if strategy == Strategy::RightmostInnermost {
        return contract(t);
    }
    None
}

/// One normal-order (leftmost-outermost) step, or `None` if `t` is normal.
pub fn step(t: &Term) -> Option<TraceStep> {
    step_with(t, Strategy::NormalOrder)
}

pub fn step_with(t: &Term, strategy: Strategy) -> Option<TraceStep> {
    let mut path = Vec::new();
    step_in(t, strategy, &mut path).map(|(result, rule)| TraceStep { path, rule, result })
}

/// Normalize in normal order, recording every step.
pub fn normalize(t: &Term, fuel: Fuel) -> ReductionTrace {
    normalize_with(t, fuel, Strategy::NormalOrder)
}

pub fn normalize_with(t: &Term, fuel: Fuel, strategy: Strategy) -> ReductionTrace {
    let mut steps: Vec<TraceStep> = Vec::new();
    loop {
        let cur = steps.last().map_or(t, |s| &s.result);
        if steps.len() as u64 >= fuel.steps() {
            let status = if is_normal(cur) {
                TraceStatus::Normalized
            } else {
                TraceStatus::FuelExhausted
            };
            return ReductionTrace {
                start: t.clone(),
                steps,
                status,
            };
        }
        match step_with(cur, strategy) {
            Some(s) => steps.push(s),
            None => {
                return ReductionTrace {
                    start: t.clone(),
                    steps,
                    status: TraceStatus::Normalized,
                }
            }
        }
    }
}

/// Result of normalizing without keeping intermediate terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub term: Term,
    pub steps: u64,
    pub status: TraceStatus,
}

pub fn normal_form(t: &Term, fuel: Fuel) -> NormalForm {
    let mut cur = t.clone();
    let mut steps = 0;
    while steps < fuel.steps() {
        match step(&cur) {
            Some(s) => {
                cur = s.result;
                steps += 1;
            }
            None => {
                return NormalForm {
                    term: cur,
                    steps,
                    status: TraceStatus::Normalized,
                }
            }
        }
    }
    let status = if is_normal(&cur) {
        TraceStatus::Normalized
    } else {
        TraceStatus::FuelExhausted
    };
    NormalForm {
        term: cur,
        steps,
        status,
    }
}

/// `λx.(t x)` or `ΛX.(t X)` with a binder fresh for `t`.
pub fn eta_expand(t: &Term, mode: EtaMode) -> Term {
    match mode {
        EtaMode::Term => {
            let free = t.free_vars();
            let x = VarName::new("x").freshen(|n| free.contains(n));
            Term::lam(x.clone(), Term::app(t.clone(), Term::Var(x)))
        }
        EtaMode::Atom => {
            let free = t.free_atoms();
            let x = Atom::new("X").freshen(|n| free.contains(n));
            Term::tlam(x.clone(), Term::tapp(t.clone(), x))
        }
    }
}

fn is_eta_expansion_of(expanded: &Term, original: &Term) -> bool {
    match expanded {
        Term::Lam {
            binder,
            annotation: None,
            body,
        } => {
            matches!(&**body, Term::App(f, a)
                if matches!(&**a, Term::Var(v) if v == binder)
                    && !original.has_free_var(binder)
                    && **f == *original)
        }
        Term::TLam { binder, body } => {
            matches!(&**body, Term::TApp(f, y)
                if y == binder && !original.has_free_atom(binder) && **f == *original)
        }
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("step {index}: no subterm at path {path:?}")]
    BadPath { index: usize, path: Vec<usize> },
    #[error("step {index}: subterm at {path:?} is not a {rule:?} redex")]
    NotARedex {
        index: usize,
        path: Vec<usize>,
        rule: StepRule,
    },
    #[error("step {index}: recorded result differs from the contraction")]
    WrongResult { index: usize },
    #[error("trace claims to be normalized but its final term has a redex")]
    NotNormal,
}

impl ReductionTrace {
    /// The final term of the trace.
    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.status == TraceStatus::Normalized
    }

    /// Re-derive every step from its predecessor.
    pub fn validate(&self) -> Result<(), TraceError> {
        let mut prev = &self.start;
        for (index, s) in self.steps.iter().enumerate() {
            let sub = prev.at_path(&s.path).ok_or_else(|| TraceError::BadPath {
                index,
                path: s.path.clone(),
            })?;
            let expected = match s.rule {
                StepRule::BetaTerm | StepRule::BetaAtom => match contract(sub) {
                    Some((r, rule)) if rule == s.rule => prev.map_at_path(&s.path, |_| r),
                    _ => {
                        return Err(TraceError::NotARedex {
                            index,
                            path: s.path.clone(),
                            rule: s.rule,
                        })
                    }
                },
                StepRule::EtaExpand => {
                    let ok = s
                        .result
                        .at_path(&s.path)
                        .is_some_and(|e| is_eta_expansion_of(e, sub));
                    if !ok {
                        return Err(TraceError::WrongResult { index });
                    }
                    let replacement = s.result.at_path(&s.path).cloned();
                    replacement.and_then(|r| prev.map_at_path(&s.path, |_| r))
                }
            };
            if expected.as_ref() != Some(&s.result) {
                return Err(TraceError::WrongResult { index });
            }
            prev = &s.result;
        }
        if self.status == TraceStatus::Normalized && !is_normal(prev) {
            return Err(TraceError::NotNormal);
        }
        Ok(())
    }

    /// Apply `f` to every term of the trace.
    pub fn map_terms(&self, f: impl Fn(&Term) -> Term) -> ReductionTrace {
        ReductionTrace {
            start: f(&self.start),
            steps: self
                .steps
                .iter()
                .map(|s| TraceStep {
                    path: s.path.clone(),
                    rule: s.rule,
                    result: f(&s.result),
                })
                .collect(),
            status: self.status,
        }
    }
}
