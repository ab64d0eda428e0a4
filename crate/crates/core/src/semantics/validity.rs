//! Validity of open terms: membership of every closed instance.

use crate::syntax::{Context, Formula, Term, VarName};
use crate::typing::check;

use super::membership::Prober;
use super::verdict::{Counterexample, Evidence, Flavor, Status, Verdict};
use super::{first_foreign_constant, AtomicBase, SemanticsError, WitnessBudget};

/// Substitutes closed witnesses for the context variables and tests each
/// instance in the chosen phase model.
///
/// The instance built from the tagged constants `c{A_i}#i` is tried
/// first. Witness tuples beyond `max_instances` are skipped and the
/// verdict is marked truncated.
pub fn q_valid(
    t: &Term,
    ctx: &Context,
    a: &Formula,
    flavor: Flavor,
    base: &AtomicBase,
    budget: &WitnessBudget,
) -> Result<Verdict, SemanticsError> {
    budget.validate()?;
    if let Some(x) = t.free_vars().into_iter().find(|x| !ctx.contains(x)) {
        return Err(SemanticsError::UnboundFreeVariable(x));
    }
    let mut seen = a.free_atoms();
    seen.extend(t.free_atoms());
    seen.extend(ctx.free_atoms());
    let ctx_formulas: Vec<&Formula> = ctx.entries().iter().map(|(_, f)| f).collect();
    let mut formulas = ctx_formulas.clone();
    formulas.push(a);
    let mut prober = Prober::new(base, budget, flavor, seen, &formulas, &[t]);

    let first_tag = t.const_tags().into_iter().max().map_or(0, |m| m + 1);
    let sets: Vec<Vec<Term>> = ctx
        .entries()
        .iter()
        .enumerate()
        .map(|(i, (_, ai))| {
            let mut set = vec![Term::tagged(ai.clone(), first_tag + i as u32)];
            let untagged = Term::constant(ai.clone());
            set.extend(
                prober
                    .witnesses(ai)
                    .iter()
                    .filter(|s| **s != untagged)
                    .cloned(),
            );
            set
        })
        .collect();

    let mut agg = Status::Certified;
    let mut all_certified = true;
    let mut instances = 0usize;
    let mut index = vec![0usize; sets.len()];
    loop {
        if instances >= budget.max_instances {
            prober.truncated = true;
            agg = agg.join(Status::BoundedOk);
            break;
        }
        instances += 1;
        let pairs: Vec<(VarName, Term)> = ctx
            .entries()
            .iter()
            .zip(&index)
            .zip(&sets)
            .map(|(((x, _), &k), set)| (x.clone(), set[k].clone()))
            .collect();
        let closed = t.subst_many(&pairs);
        match prober.probe(&closed, a, 0, &mut Vec::new()) {
            Err(cex) => return Ok(prober.verdict(t, a, Err(cex), pairs)),
            Ok(status) => {
                all_certified &= status == Status::Certified;
                agg = agg.join(status);
            }
        }
        if !advance(&mut index, &sets) {
            break;
        }
    }

    if agg == Status::Unknown {
        return Ok(prober.verdict(t, a, Ok(Status::Unknown), Vec::new()));
    }
    // An open derivable term is valid outright; a closed one may also be
    // certified by the membership test itself.
    if let Ok(d) = check(ctx, t, a) {
        let mut v = prober.verdict(t, a, Ok(Status::BoundedOk), Vec::new());
        v.status = Status::Certified;
        v.evidence.note = None;
        v.evidence.derivation = Some(d);
        return Ok(v);
    }
    if ctx.is_empty() && all_certified {
        return Ok(prober.verdict(t, a, Ok(Status::Certified), Vec::new()));
    }
    Ok(prober.verdict(t, a, Ok(Status::BoundedOk), Vec::new()))
}

/// Next witness tuple in odometer order; false when all are done.
fn advance(index: &mut [usize], sets: &[Vec<Term>]) -> bool {
    for i in (0..index.len()).rev() {
        index[i] += 1;
        if index[i] < sets[i].len() {
            return true;
        }
        index[i] = 0;
    }
    false
}

/// A proof-term over `base` that is valid in the chosen phase model.
pub fn is_valid(
    t: &Term,
    ctx: &Context,
    a: &Formula,
    flavor: Flavor,
    base: &AtomicBase,
    budget: &WitnessBudget,
) -> Result<Verdict, SemanticsError> {
    if let Some(c) = first_foreign_constant(t, base) {
        let evidence = Evidence {
            counterexample: Some(Counterexample {
                substitution: Vec::new(),
                probes: Vec::new(),
                failing_term: t.clone(),
                failing_formula: a.clone(),
                normal_form: None,
                reason: format!("not a proof-term: constant c{{{c}}} is not an axiom of the base"),
            }),
            ..Evidence::default()
        };
        return Ok(Verdict {
            status: Status::Refuted,
            formula: a.clone(),
            term: t.clone(),
            flavor: Some(flavor),
            evidence,
        });
    }
    q_valid(t, ctx, a, flavor, base, budget)
}
