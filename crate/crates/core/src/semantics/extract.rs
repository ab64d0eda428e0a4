//! Completeness extraction: from a valid open term to a normal derivable
//! one, by normalizing its instance at the tagged assumption constants.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::reduction::{normalize, Fuel, ReductionTrace, TraceError};
use crate::syntax::{Context, Formula, Term, VarName};
use crate::typing::{check, Derivation, TypeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    /// The β-normal result, over the original context.
    pub normal: Term,
    pub derivation: Derivation,
    /// `t ↠ normal`, with the constants mapped back to variables.
    pub trace: ReductionTrace,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("variable `{0}` is free in the term but not bound by the context")]
    UnboundFreeVariable(VarName),
    #[error("no normal form within {steps} steps")]
    FuelExhausted { steps: u64 },
    #[error("normal form `{normal}` does not check: {error}")]
    CheckFailed { normal: Term, error: Box<TypeError> },
    #[error("restored reduction does not replay: {0}")]
    TraceReplayFailed(TraceError),
}

/// Replaces each `x_i` by a constant `c{A_i}` tagged with its position,
/// normalizes, and turns the constants back into the variables.
pub fn extract(
    t: &Term,
    ctx: &Context,
    a: &Formula,
    fuel: Fuel,
) -> Result<Extraction, ExtractError> {
    if let Some(x) = t.free_vars().into_iter().find(|x| !ctx.contains(x)) {
        return Err(ExtractError::UnboundFreeVariable(x));
    }
    // Tags already present in t must not be confused with ours.
    let first = t.const_tags().into_iter().max().map_or(0, |m| m + 1);
    let mut back = BTreeMap::new();
    let pairs: Vec<(VarName, Term)> = ctx
        .entries()
        .iter()
        .enumerate()
        .map(|(i, (x, ai))| {
            let tag = first + i as u32;
            back.insert(tag, x.clone());
            (x.clone(), Term::tagged(ai.clone(), tag))
        })
        .collect();
    let instance = t.subst_many(&pairs);
    let trace = normalize(&instance, fuel);
    if !trace.is_normalized() {
        return Err(ExtractError::FuelExhausted {
            steps: trace.len() as u64,
        });
    }
    let normal = untag(trace.last(), &back);
    let derivation = match check(ctx, &normal, a) {
        Ok(d) => d,
        Err(error) => {
            return Err(ExtractError::CheckFailed {
                normal,
                error: Box::new(error),
            })
        }
    };
    let mut restored = trace.map_terms(|u| untag(u, &back));
    restored.start = t.clone();
    restored
        .validate()
        .map_err(ExtractError::TraceReplayFailed)?;
    Ok(Extraction {
        normal,
        derivation,
        trace: restored,
    })
}

/// Capture-avoiding replacement of tagged constants by variables.
fn untag(t: &Term, back: &BTreeMap<u32, VarName>) -> Term {
    match t {
        Term::Const { tag: Some(k), .. } if back.contains_key(k) => Term::Var(back[k].clone()),
        Term::Const { .. } | Term::Var(_) => t.clone(),
        Term::Lam {
            binder,
            annotation,
            body,
        } => {
            let captures = back.values().any(|x| x == binder)
                && body.const_tags().iter().any(|k| back.contains_key(k));
            let (binder, body) = if captures {
                let mut taken: BTreeSet<VarName> = back.values().cloned().collect();
                body.all_vars(&mut taken);
                let fresh = binder.freshen(|n| taken.contains(n));
                let renamed = body.subst(binder, &Term::Var(fresh.clone()));
                (fresh, renamed)
            } else {
                (binder.clone(), (**body).clone())
            };
            Term::Lam {
                binder,
                annotation: annotation.clone(),
                body: Box::new(untag(&body, back)),
            }
        }
        Term::TLam { binder, body } => Term::tlam(binder.clone(), untag(body, back)),
        Term::App(f, s) => Term::app(untag(f, back), untag(s, back)),
        Term::TApp(f, y) => Term::tapp(untag(f, back), y.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::is_normal;
    use crate::syntax::{parse_formula, parse_term};

    fn ctx(entries: &[(&str, &str)]) -> Context {
        Context::from_entries(
            entries
                .iter()
                .map(|(x, a)| (VarName::new(x), parse_formula(a).unwrap())),
        )
        .unwrap()
    }

    fn run(term: &str, c: &Context, a: &str, fuel: u64) -> Result<Extraction, ExtractError> {
        extract(
            &parse_term(term).unwrap(),
            c,
            &parse_formula(a).unwrap(),
            Fuel::new(fuel).unwrap(),
        )
    }

    #[test]
    fn beta_step_then_restore() {
        let e = run("(\\y. y) x", &ctx(&[("x", "X")]), "X", 100).unwrap();
        assert_eq!(e.normal, parse_term("x").unwrap());
        assert_eq!(e.trace.len(), 1);
        assert!(e.derivation.replay().is_ok());
    }

    #[test]
    fn already_normal() {
        let e = run("x", &ctx(&[("x", "forall X. X")]), "forall X. X", 10).unwrap();
        assert_eq!(e.normal, parse_term("x").unwrap());
        let e = run("\\z. x z", &ctx(&[("x", "X -> Y")]), "X -> Y", 100).unwrap();
        assert_eq!(e.normal, parse_term("\\z. x z").unwrap());
        assert!(is_normal(&e.normal));
    }

    #[test]
    fn repeated_assumptions_stay_distinct() {
        let c = ctx(&[("x", "X"), ("y", "X")]);
        let e = run("(\\p. \\q. q) x y", &c, "X", 100).unwrap();
        assert_eq!(e.normal, parse_term("y").unwrap());
    }

    #[test]
    fn binder_named_like_an_assumption_is_renamed() {
        // After reduction `c{X}#0` sits under a binder called `x`.
        let c = ctx(&[("x", "X")]);
        let e = run("(\\k. \\x:Y. k) x", &c, "Y -> X", 100).unwrap();
        assert_eq!(e.normal, parse_term("\\x1:Y. x").unwrap());
        assert_ne!(e.normal, parse_term("\\x. x").unwrap());
    }

    #[test]
    fn failures() {
        let omega = "(\\x. x x) (\\x. x x)";
        assert!(matches!(
            run(omega, &ctx(&[]), "X", 50),
            Err(ExtractError::FuelExhausted { .. })
        ));
        assert!(matches!(
            run("x", &ctx(&[("x", "X")]), "Y", 10),
            Err(ExtractError::CheckFailed { .. })
        ));
        assert!(matches!(
            run("y", &ctx(&[("x", "X")]), "X", 10),
            Err(ExtractError::UnboundFreeVariable(_))
        ));
    }
}
