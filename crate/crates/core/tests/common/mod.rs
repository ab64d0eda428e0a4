//! Generators and reference implementations shared by the integration
//! tests. Everything here is deliberately naive.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use fatk_core::reduction::is_normal;
use fatk_core::semantics::{enumerate_normal, is_proof_term, AtomicBase};
use fatk_core::syntax::{parse_formula, parse_term, Atom, Context, Formula, Term, VarName};
use fatk_core::typing::{check, Derivation, Rule};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn f(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn t(s: &str) -> Term {
    parse_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn atoms(names: &[&str]) -> Vec<Atom> {
    names.iter().map(|n| Atom::new(n)).collect()
}

pub fn base(names: &[&str]) -> AtomicBase {
    AtomicBase::new(atoms(names))
}

pub fn ctx(entries: &[(&str, &str)]) -> Context {
    Context::from_entries(entries.iter().map(|(x, a)| (VarName::new(x), f(a)))).unwrap()
}

/// Every formula with exactly `n` nodes whose atoms and binders come from
/// `names`, before α-deduplication.
fn formulas_exact(
    n: usize,
    names: &[Atom],
    memo: &mut BTreeMap<usize, Vec<Formula>>,
) -> Vec<Formula> {
    if let Some(hit) = memo.get(&n) {
        return hit.clone();
    }
    let mut out = Vec::new();
    if n == 1 {
        out.extend(names.iter().cloned().map(Formula::Atom));
    } else if n >= 2 {
        for body in formulas_exact(n - 1, names, memo) {
            for x in names {
                out.push(Formula::forall(x.clone(), body.clone()));
            }
        }
        for i in 1..n - 1 {
            let lefts = formulas_exact(i, names, memo);
            let rights = formulas_exact(n - 1 - i, names, memo);
            for l in &lefts {
                for r in &rights {
                    out.push(Formula::arrow(l.clone(), r.clone()));
                }
            }
        }
    }
    memo.insert(n, out.clone());
    out
}

/// Every formula with at most `max_nodes` nodes over `names`, one per
/// α-class, smallest first.
pub fn formulas_up_to(max_nodes: usize, names: &[Atom]) -> Vec<Formula> {
    let mut memo = BTreeMap::new();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for n in 1..=max_nodes {
        for a in formulas_exact(n, names, &mut memo) {
            if seen.insert(a.clone()) {
                out.push(a);
            }
        }
    }
    out
}

/// A random formula with exactly `connectives` arrows and quantifiers.
pub fn random_formula(rng: &mut impl Rng, connectives: usize, names: &[Atom]) -> Formula {
    if connectives == 0 {
        return Formula::Atom(names.choose(rng).unwrap().clone());
    }
    if rng.gen_bool(0.3) {
        let x = names.choose(rng).unwrap().clone();
        Formula::forall(x, random_formula(rng, connectives - 1, names))
    } else {
        let left = rng.gen_range(0..connectives);
        Formula::arrow(
            random_formula(rng, left, names),
            random_formula(rng, connectives - 1 - left, names),
        )
    }
}

const ORACLE_VARS: &[&str] = &["x", "y", "z", "u"];
const ORACLE_BINDERS: &[&str] = &["X", "Y", "Z"];

/// All raw unannotated terms of exactly `size` nodes: variables from
/// `vars`, constants `c{A}` for `A` in `consts`, atom applications to
/// `atom_pool` or an enclosing binder.
pub fn raw_terms(
    size: usize,
    vars: &[VarName],
    bound_atoms: &[Atom],
    atom_pool: &[Atom],
    consts: &[Atom],
) -> Vec<Term> {
    let mut out = Vec::new();
    if size == 0 {
        return out;
    }
    if size == 1 {
        out.extend(vars.iter().cloned().map(Term::Var));
        out.extend(
            consts
                .iter()
                .map(|a| Term::constant(Formula::Atom(a.clone()))),
        );
        return out;
    }
    // A new binder gets a new name; shadowing adds no α-classes.
    if let Some(x) = ORACLE_VARS
        .iter()
        .map(|n| VarName::new(n))
        .find(|v| !vars.contains(v))
    {
        let mut inner = vars.to_vec();
        inner.push(x.clone());
        for body in raw_terms(size - 1, &inner, bound_atoms, atom_pool, consts) {
            out.push(Term::lam(x.clone(), body));
        }
    }
    for b in ORACLE_BINDERS.iter().map(|n| Atom::new(n)) {
        let mut inner = bound_atoms.to_vec();
        inner.push(b.clone());
        for body in raw_terms(size - 1, vars, &inner, atom_pool, consts) {
            out.push(Term::tlam(b.clone(), body));
        }
    }
    for i in 1..size - 1 {
        let funs = raw_terms(i, vars, bound_atoms, atom_pool, consts);
        let args = raw_terms(size - 1 - i, vars, bound_atoms, atom_pool, consts);
        for fun in &funs {
            for arg in &args {
                out.push(Term::app(fun.clone(), arg.clone()));
            }
        }
    }
    let mut instantiable: Vec<Atom> = atom_pool.to_vec();
    instantiable.extend(bound_atoms.iter().cloned());
    instantiable.sort();
    instantiable.dedup();
    for fun in raw_terms(size - 1, vars, bound_atoms, atom_pool, consts) {
        for y in &instantiable {
            out.push(Term::tapp(fun.clone(), y.clone()));
        }
    }
    out
}

/// Generate every closed term up to `size` nodes and keep the β-normal
/// proof-terms of `goal` whose free atoms stay within the goal and base.
pub fn naive_oracle(goal: &Formula, b: &AtomicBase, size: usize, names: &[Atom]) -> Vec<Term> {
    let mut universe = goal.free_atoms();
    universe.extend(b.atoms().cloned());
    let mut found = BTreeMap::new();
    for n in 1..=size {
        for cand in raw_terms(n, &[], &[], names, names) {
            if is_normal(&cand)
                && is_proof_term(&cand, b)
                && cand.free_atoms().is_subset(&universe)
                && check(&Context::new(), &cand, goal).is_ok()
            {
                found.entry(cand.alpha_key()).or_insert(cand);
            }
        }
    }
    found.into_values().collect()
}

pub fn alpha_keys(ts: &[Term]) -> Vec<String> {
    let mut keys: Vec<String> = ts.iter().map(|t| t.alpha_key()).collect();
    keys.sort();
    keys
}

/// Closed derivable terms over base `{X}` at every formula up to
/// `formula_nodes` nodes over `{X, Y}`, with their formulas.
pub fn derivable_corpus(formula_nodes: usize, term_size: usize) -> Vec<(Term, Formula)> {
    let b = base(&["X"]);
    let mut out = Vec::new();
    for a in formulas_up_to(formula_nodes, &atoms(&["X", "Y"])) {
        for s in enumerate_normal(&Context::new(), &a, &b, term_size) {
            out.push((s, a.clone()));
        }
    }
    out
}

/// Rebuilds the term proved by `d`, wrapping the subterms at the chosen
/// derivation nodes (preorder indices) in a redex that reduces back to
/// them and leaves typing intact.
pub fn rebuild_with_redexes(d: &Derivation, chosen: &BTreeSet<usize>, rng: &mut impl Rng) -> Term {
    let mut counter = 0;
    rebuild(d, chosen, &mut counter, rng)
}

pub fn derivation_nodes(d: &Derivation) -> usize {
    1 + d.premises.iter().map(derivation_nodes).sum::<usize>()
}

fn rebuild(
    d: &Derivation,
    chosen: &BTreeSet<usize>,
    counter: &mut usize,
    rng: &mut impl Rng,
) -> Term {
    let me = *counter;
    *counter += 1;
    let concl = &d.conclusion;
    let term = match (&d.rule, &concl.term) {
        (Rule::AxVar, _) | (Rule::AxConst, _) => concl.term.clone(),
        (Rule::ImpIntro { var }, Term::Lam { annotation, .. }) => {
            let body = rebuild(&d.premises[0], chosen, counter, rng);
            match annotation {
                Some(a) => Term::lam_ann(var.clone(), a.clone(), body),
                None => Term::lam(var.clone(), body),
            }
        }
        (Rule::ForallIntro { eigen }, _) => {
            Term::tlam(eigen.clone(), rebuild(&d.premises[0], chosen, counter, rng))
        }
        (Rule::ImpElim, _) => {
            let fun = rebuild(&d.premises[0], chosen, counter, rng);
            let arg = rebuild(&d.premises[1], chosen, counter, rng);
            Term::app(fun, arg)
        }
        (Rule::ForallElim, Term::TApp(_, y)) => {
            Term::tapp(rebuild(&d.premises[0], chosen, counter, rng), y.clone())
        }
        (rule, term) => panic!("rule {rule:?} does not match {term}"),
    };
    if chosen.contains(&me) {
        wrap(&term, &concl.formula, &concl.context, rng)
    } else {
        term
    }
}

/// One of three typing-preserving head redexes around `u : b`.
pub fn wrap(u: &Term, b: &Formula, ctx: &Context, rng: &mut impl Rng) -> Term {
    let k = VarName::new("k").freshen(|n| ctx.contains(&VarName::new(n)));
    let id = Term::lam_ann(k.clone(), b.clone(), Term::Var(k.clone()));
    let choice = rng.gen_range(0..3);
    if choice == 2 {
        if let Some((w, c)) = ctx.entries().choose(rng) {
            let z =
                VarName::new("z").freshen(|n| n == k.as_str() || ctx.contains(&VarName::new(n)));
            let konst = Term::lam_ann(z, c.clone(), id);
            return Term::app(Term::app(konst, Term::Var(w.clone())), u.clone());
        }
    }
    if choice >= 1 {
        let mut taken = BTreeSet::new();
        b.all_atoms(&mut taken);
        taken.extend(ctx.free_atoms());
        let zed = Atom::new("Z").freshen(|n| taken.contains(n));
        let y = b
            .free_atoms()
            .into_iter()
            .next()
            .unwrap_or_else(|| Atom::new("X"));
        return Term::app(Term::tapp(Term::tlam(zed, id), y), u.clone());
    }
    Term::app(id, u.clone())
}

/// A derivable open sequent: a random context, a goal and one normal
/// proof of it, wrapped in 1 to 4 extra redexes.
pub struct Wrapped {
    pub context: Context,
    pub goal: Formula,
    pub normal: Term,
    pub wrapped: Term,
}

pub fn wrapped_sequents(count: usize, rng: &mut impl Rng) -> Vec<Wrapped> {
    let names = atoms(&["X", "Y"]);
    let b = base(&["X"]);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(0..=2);
        let entries: Vec<(VarName, Formula)> = (0..n)
            .map(|i| {
                let k = rng.gen_range(0..=3);
                (VarName::new(["a", "b"][i]), random_formula(rng, k, &names))
            })
            .collect();
        let context = Context::from_entries(entries).unwrap();
        let k = rng.gen_range(1..=4);
        let goal = random_formula(rng, k, &names);
        let proofs = enumerate_normal(&context, &goal, &b, 6);
        let Some(normal) = proofs.choose(rng).cloned() else {
            continue;
        };
        let d = check(&context, &normal, &goal).expect("enumerated terms check");
        let nodes = derivation_nodes(&d);
        let redexes = rng.gen_range(1..=4.min(nodes));
        let chosen: BTreeSet<usize> = rand::seq::index::sample(rng, nodes, redexes)
            .into_iter()
            .collect();
        let wrapped = rebuild_with_redexes(&d, &chosen, rng);
        out.push(Wrapped {
            context,
            goal,
            normal,
            wrapped,
        });
    }
    out
}
