mod common;

use std::collections::BTreeSet;

use common::*;
use fatk_core::reduction::{eta_expand, normal_form, EtaMode, Fuel, TraceStatus};
use fatk_core::semantics::{
    e_member, enumerate_normal, enumerate_normal_with, i_member, is_valid, q_valid, AtomicBase,
    Flavor, Status, Verdict, WitnessBudget,
};
use fatk_core::syntax::{Atom, Context, Formula, Term};
use fatk_core::typing::check;

fn small() -> WitnessBudget {
    WitnessBudget {
        term_size_bound: 4,
        unfold_depth: 5,
        ..WitnessBudget::default()
    }
}

/// `t` normalizes and its normal form proves `a`.
fn outer(t: &Term, a: &Formula) -> Option<bool> {
    let nf = normal_form(t, Fuel::DEFAULT);
    (nf.status == TraceStatus::Normalized).then(|| check(&Context::new(), &nf.term, a).is_ok())
}

/// The atom sample used by the checker: goal, term and base atoms plus
/// one fresh atom.
fn sample(t: &Term, a: &Formula, b: &AtomicBase) -> Vec<Atom> {
    let mut s: BTreeSet<Atom> = a.free_atoms();
    s.extend(t.free_atoms());
    s.extend(b.atoms().cloned());
    let mut taken = s.clone();
    a.all_atoms(&mut taken);
    t.all_atoms(&mut taken);
    let mut out: Vec<Atom> = s.into_iter().collect();
    out.push(Atom::new("W").freshen(|n| taken.contains(n)));
    out
}

fn witnesses(a: &Formula, b: &AtomicBase, bound: usize) -> Vec<Term> {
    let mut ws = vec![Term::constant(a.clone())];
    ws.extend(enumerate_normal(&Context::new(), a, b, bound));
    ws
}

/// The E-phase clauses read literally: `None` when some normalization
/// runs out of fuel.
fn literal_e(t: &Term, a: &Formula, b: &AtomicBase, atoms: &[Atom], bound: usize) -> Option<bool> {
    match a {
        Formula::Atom(_) => outer(t, a),
        Formula::Arrow(dom, cod) => {
            let mut all = Some(true);
            for s in witnesses(dom, b, bound) {
                match literal_e(&Term::app(t.clone(), s), cod, b, atoms, bound) {
                    Some(false) => return Some(false),
                    None => all = None,
                    Some(true) => {}
                }
            }
            all
        }
        Formula::Forall(x, body) => {
            let mut all = Some(true);
            for y in atoms {
                match literal_e(
                    &Term::tapp(t.clone(), y.clone()),
                    &body.subst_atom(x, y),
                    b,
                    atoms,
                    bound,
                ) {
                    Some(false) => return Some(false),
                    None => all = None,
                    Some(true) => {}
                }
            }
            all
        }
    }
}

/// Introduction-style validity read from its definition: reduce to an
/// abstraction (η-expanding if needed) and continue with its body.
fn literal_i(t: &Term, a: &Formula, b: &AtomicBase, atoms: &[Atom], bound: usize) -> Option<bool> {
    if let Formula::Atom(_) = a {
        return outer(t, a);
    }
    let nf = normal_form(t, Fuel::DEFAULT);
    if nf.status != TraceStatus::Normalized {
        return None;
    }
    let mut all = Some(true);
    match a {
        Formula::Arrow(dom, cod) => {
            let (x, u) = match &nf.term {
                Term::Lam { binder, body, .. } => (binder.clone(), (**body).clone()),
                other => match eta_expand(other, EtaMode::Term) {
                    Term::Lam { binder, body, .. } => (binder, *body),
                    _ => unreachable!(),
                },
            };
            for s in witnesses(dom, b, bound) {
                match literal_i(&u.subst(&x, &s), cod, b, atoms, bound) {
                    Some(false) => return Some(false),
                    None => all = None,
                    Some(true) => {}
                }
            }
        }
        Formula::Forall(xa, body) => {
            let (z, u) = match &nf.term {
                Term::TLam { binder, body } => (binder.clone(), (**body).clone()),
                other => match eta_expand(other, EtaMode::Atom) {
                    Term::TLam { binder, body } => (binder, *body),
                    _ => unreachable!(),
                },
            };
            for y in atoms {
                match literal_i(
                    &u.subst_atom(&z, y),
                    &body.subst_atom(xa, y),
                    b,
                    atoms,
                    bound,
                ) {
                    Some(false) => return Some(false),
                    None => all = None,
                    Some(true) => {}
                }
            }
        }
        Formula::Atom(_) => unreachable!(),
    }
    all
}

fn agrees(v: &Verdict, literal: Option<bool>) -> bool {
    matches!(
        (v.status, literal),
        (Status::Refuted, Some(false))
            | (Status::Certified | Status::BoundedOk, Some(true))
            | (Status::Unknown, None)
    )
}

/// Closed terms of up to four nodes that normalize, paired with small
/// formulas: derivable, refutable and merely bounded cases all occur.
fn mixed_corpus() -> Vec<(Term, Formula)> {
    let names = atoms(&["X", "Y"]);
    let formulas = formulas_up_to(4, &names);
    let mut out = Vec::new();
    for n in 1..=4 {
        for t in raw_terms(n, &[], &[], &names, &names) {
            if normal_form(&t, Fuel::new(50).unwrap()).status != TraceStatus::Normalized {
                continue;
            }
            for a in &formulas {
                out.push((t.clone(), a.clone()));
            }
        }
    }
    out
}

#[test]
fn e_membership_matches_its_definition() {
    let b = base(&["X"]);
    let budget = WitnessBudget {
        unfold_depth: 6,
        ..small()
    };
    let (mut refuted, mut passed) = (0, 0);
    for (t, a) in mixed_corpus() {
        let v = e_member(&t, &a, &b, &budget).unwrap();
        let lit = literal_e(&t, &a, &b, &sample(&t, &a, &b), 4);
        assert!(agrees(&v, lit), "{t} : {a}: {} vs {lit:?}", v.status);
        refuted += usize::from(v.is_refuted());
        passed += usize::from(!v.is_refuted());
    }
    assert!(
        refuted > 100 && passed > 100,
        "{refuted} refuted, {passed} passed"
    );
}

#[test]
fn i_membership_matches_introduction_validity() {
    let b = base(&["X"]);
    let budget = WitnessBudget {
        unfold_depth: 6,
        ..small()
    };
    for (t, a) in mixed_corpus() {
        let v = i_member(&t, &a, &b, &budget).unwrap();
        let lit = literal_i(&t, &a, &b, &sample(&t, &a, &b), 4);
        assert!(agrees(&v, lit), "{t} : {a}: {} vs {lit:?}", v.status);
    }
}

#[test]
fn closed_validity_shares_membership() {
    let b = base(&["X"]);
    for (t, a) in mixed_corpus().into_iter().step_by(7) {
        let m = e_member(&t, &a, &b, &small()).unwrap();
        let q = q_valid(&t, &Context::new(), &a, Flavor::E, &b, &small()).unwrap();
        assert_eq!(m.status, q.status, "{t} : {a}");
        let i = i_member(&t, &a, &b, &small()).unwrap();
        let qi = q_valid(&t, &Context::new(), &a, Flavor::I, &b, &small()).unwrap();
        assert_eq!(i.status, qi.status, "{t} : {a}");
    }
}

#[test]
fn constants_belong_to_their_formula() {
    let b = base(&["X"]);
    for a in formulas_up_to(6, &atoms(&["X", "Y"])) {
        let c = Term::constant(a.clone());
        assert_eq!(
            e_member(&c, &a, &b, &small()).unwrap().status,
            Status::Certified,
            "{a}"
        );
        assert_eq!(
            i_member(&c, &a, &b, &small()).unwrap().status,
            Status::Certified,
            "{a}"
        );
    }
}

#[test]
fn membership_examples() {
    let budget = WitnessBudget::default();
    let xy = base(&["X", "Y"]);
    let v = e_member(&t("\\x. x"), &f("X -> X"), &base(&["X"]), &budget).unwrap();
    assert_eq!(v.status, Status::Certified);
    let v = e_member(&t("\\x. c{Y}"), &f("X -> X"), &xy, &budget).unwrap();
    assert_eq!(v.status, Status::Refuted);
    assert_eq!(
        v.evidence.counterexample.unwrap().probes[0].to_string(),
        "c{X}"
    );
    let v = i_member(&t("c{X -> Y}"), &f("X -> Y"), &xy, &budget).unwrap();
    assert_eq!(v.status, Status::Certified);
    let v = i_member(&t("\\x. x"), &f("X -> X"), &base(&[]), &budget).unwrap();
    assert_eq!(v.status, Status::Certified);
}

#[test]
fn validity_examples() {
    let budget = WitnessBudget::default();
    let xy = base(&["X", "Y"]);
    let open = |term: &str, c: &[(&str, &str)], a: &str, flavor, b: &AtomicBase| {
        is_valid(&t(term), &ctx(c), &f(a), flavor, b, &budget)
            .unwrap()
            .status
    };
    assert_eq!(
        open("x", &[("x", "X")], "X", Flavor::E, &xy),
        Status::Certified
    );
    assert_eq!(
        open("\\y. x", &[("x", "X")], "Y -> X", Flavor::E, &xy),
        Status::Certified
    );
    assert_eq!(
        open("x", &[("x", "X -> X")], "X -> Y", Flavor::E, &xy),
        Status::Refuted
    );
    assert_eq!(
        open("x", &[("x", "X")], "X", Flavor::I, &xy),
        Status::Certified
    );
    assert_eq!(
        open("c{X -> Y}", &[], "X -> Y", Flavor::E, &xy),
        Status::Refuted
    );
    assert_eq!(
        open("c{X}", &[], "X", Flavor::E, &base(&["X"])),
        Status::Certified
    );
}

#[test]
fn open_refutation_names_the_instance() {
    let v = q_valid(
        &t("\\y. x y"),
        &ctx(&[("x", "X -> X")]),
        &f("X -> Y"),
        Flavor::E,
        &base(&["X", "Y"]),
        &WitnessBudget::default(),
    )
    .unwrap();
    assert_eq!(v.status, Status::Refuted);
    let cex = v.evidence.counterexample.unwrap();
    assert_eq!(cex.substitution[0].1.to_string(), "c{X -> X}#0");
}

#[test]
fn extra_witnesses_are_deterministic_and_used() {
    let term = t("\\f. f");
    let b = base(&["X"]);
    let a = f("(X -> X) -> X -> X");
    let v = e_member(&term, &a, &b, &WitnessBudget::default()).unwrap();
    assert_eq!(v.status, Status::Certified);

    let seeded = WitnessBudget {
        random_witnesses: 3,
        seed: 9,
        ..WitnessBudget::default()
    };
    let again = WitnessBudget {
        random_witnesses: 3,
        seed: 9,
        ..WitnessBudget::default()
    };
    let v1 = e_member(&term, &a, &b, &seeded).unwrap();
    let v2 = e_member(&term, &a, &b, &again).unwrap();
    assert_eq!(v1.evidence.witnesses_tried, v2.evidence.witnesses_tried);

    let extra = WitnessBudget {
        witnesses: vec![(t("\\x. (\\y. y) x"), f("X -> X"))],
        ..WitnessBudget::default()
    };
    let v = e_member(&term, &a, &b, &extra).unwrap();
    assert!(v
        .evidence
        .witnesses_tried
        .iter()
        .any(|w| w.contains("(\\y. y) x")));
}

#[test]
fn enumerator_respects_extra_atoms() {
    let goal = f("(forall Z. Z) -> X");
    let plain = enumerate_normal(&Context::new(), &goal, &base(&[]), 4);
    let extra: BTreeSet<Atom> = atoms(&["Y"]).into_iter().collect();
    let wider = enumerate_normal_with(&Context::new(), &goal, &base(&[]), 4, &extra);
    assert_eq!(plain.len(), 1);
    assert_eq!(wider.len(), 1);
    let goal = f("(forall Z. Z) -> (forall Z. Z -> X) -> X");
    let plain = enumerate_normal(&Context::new(), &goal, &base(&[]), 8);
    let wider = enumerate_normal_with(&Context::new(), &goal, &base(&[]), 8, &extra);
    assert!(wider.len() > plain.len());
}

#[test]
fn enumerator_matches_oracle_with_open_atoms() {
    let names = atoms(&["X", "Y"]);
    for g in formulas_up_to(4, &names) {
        for b in [base(&[]), base(&["Y"])] {
            let fast = enumerate_normal(&Context::new(), &g, &b, 3);
            let slow = naive_oracle(&g, &b, 3, &names);
            assert_eq!(alpha_keys(&fast), alpha_keys(&slow), "{g}");
        }
    }
}

#[test]
fn derivable_terms_are_never_refuted_in_either_phase() {
    let b = base(&["X", "Y"]);
    for (s, a) in derivable_corpus(5, 5) {
        for flavor in [Flavor::E, Flavor::I] {
            let v = fatk_core::semantics::membership(&s, &a, flavor, &b, &small()).unwrap();
            assert_eq!(v.status, Status::Certified, "{s} : {a}");
            assert!(v.evidence.derivation.unwrap().replay().is_ok());
        }
    }
}

#[test]
fn verdict_json_shape() {
    let v = e_member(&t("\\x. c{Y}"), &f("X -> X"), &base(&["X", "Y"]), &small()).unwrap();
    let json = serde_json::to_value(&v).unwrap();
    assert_eq!(json["status"], "Refuted");
    assert_eq!(json["formula"], "X -> X");
    assert_eq!(json["term"], "\\x. c{Y}");
    assert_eq!(json["flavor"], "E");
    let ev = &json["evidence"];
    assert!(ev["trace"]["steps"].is_array());
    assert!(ev["counterexample"]["probes"].is_array());
    assert!(ev["witnesses_tried"].is_array());
    assert!(ev["fuel_used"].is_u64());
}
