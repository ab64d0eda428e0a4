//! E-phase (`A*`) and I-phase (`A†`) membership over the singleton monoid.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::reduction::Fuel;
use crate::reduction::{eta_expand, normal_form, normalize, EtaMode, TraceStatus};
use crate::syntax::{Atom, Context, Formula, Term};
use crate::typing::check;

use super::enumerate::enumerate_normal_with;
use super::verdict::{Counterexample, Evidence, Flavor, Probe, Status, Verdict};
use super::{AtomicBase, SemanticsError, WitnessBudget};

/// `t ∈ ⟨A⟩`: `t` normalizes within `fuel` to a term that proves `A`.
pub fn outer_v(t: &Term, a: &Formula, fuel: Fuel) -> Verdict {
    let trace = normalize(t, fuel);
    let mut evidence = Evidence {
        fuel_used: trace.len() as u64,
        ..Evidence::default()
    };
    let status = if !trace.is_normalized() {
        evidence.note = Some(format!("no normal form within {} steps", fuel.steps()));
        Status::Unknown
    } else {
        let nf = trace.last().clone();
        match check(&Context::new(), &nf, a) {
            Ok(d) => {
                evidence.derivation = Some(d);
                Status::Certified
            }
            Err(e) => {
                evidence.counterexample = Some(Counterexample {
                    substitution: Vec::new(),
                    probes: Vec::new(),
                    failing_term: t.clone(),
                    failing_formula: a.clone(),
                    normal_form: Some(nf),
                    reason: e.to_string(),
                });
                Status::Refuted
            }
        }
    };
    evidence.trace = Some(trace);
    Verdict {
        status,
        formula: a.clone(),
        term: t.clone(),
        flavor: None,
        evidence,
    }
}

/// Membership of a closed term in the E-phase interpretation of `a`.
pub fn e_member(
    t: &Term,
    a: &Formula,
    base: &AtomicBase,
    budget: &WitnessBudget,
) -> Result<Verdict, SemanticsError> {
    membership(t, a, Flavor::E, base, budget)
}

/// Membership of a closed term in the I-phase interpretation of `a`.
pub fn i_member(
    t: &Term,
    a: &Formula,
    base: &AtomicBase,
    budget: &WitnessBudget,
) -> Result<Verdict, SemanticsError> {
    membership(t, a, Flavor::I, base, budget)
}

pub fn membership(
    t: &Term,
    a: &Formula,
    flavor: Flavor,
    base: &AtomicBase,
    budget: &WitnessBudget,
) -> Result<Verdict, SemanticsError> {
    budget.validate()?;
    let free = t.free_vars();
    if !free.is_empty() {
        return Err(SemanticsError::OpenTerm(
            free.iter().map(|x| x.to_string()).collect(),
        ));
    }
    let mut seen = a.free_atoms();
    seen.extend(t.free_atoms());
    let mut prober = Prober::new(base, budget, flavor, seen, &[a], &[t]);
    let found = prober.probe(t, a, 0, &mut Vec::new());
    Ok(prober.verdict(t, a, found, Vec::new()))
}

/// Shared engine for membership and validity queries.
pub(crate) struct Prober<'a> {
    base: &'a AtomicBase,
    budget: &'a WitnessBudget,
    flavor: Flavor,
    atoms: Vec<Atom>,
    cache: HashMap<Formula, Rc<Vec<Term>>>,
    tried: Vec<String>,
    fuel_used: u64,
    probes_done: usize,
    pub(crate) truncated: bool,
    note: Option<String>,
}

impl<'a> Prober<'a> {
    /// `seen` are the atoms the query mentions; the sample adds the base,
    /// the budget's atoms and one atom fresh for everything in sight.
    pub(crate) fn new(
        base: &'a AtomicBase,
        budget: &'a WitnessBudget,
        flavor: Flavor,
        seen: BTreeSet<Atom>,
        formulas: &[&Formula],
        terms: &[&Term],
    ) -> Prober<'a> {
        let mut sample = seen;
        sample.extend(base.atoms().cloned());
        sample.extend(budget.atom_sample.iter().cloned());
        let mut taken = sample.clone();
        for f in formulas {
            f.all_atoms(&mut taken);
        }
        for t in terms {
            t.all_atoms(&mut taken);
        }
        let fresh = Atom::new("W").freshen(|n| taken.contains(n));
        let mut atoms: Vec<Atom> = sample.into_iter().collect();
        atoms.push(fresh);
        Prober {
            base,
            budget,
            flavor,
            atoms,
            cache: HashMap::new(),
            tried: Vec::new(),
            fuel_used: 0,
            probes_done: 0,
            truncated: false,
            note: None,
        }
    }

    /// The closed witnesses tried for `b`: its constant first, then every
    /// enumerated normal proof, then user and sampled extras.
    pub(crate) fn witnesses(&mut self, b: &Formula) -> Rc<Vec<Term>> {
        if let Some(hit) = self.cache.get(b) {
            return hit.clone();
        }
        let bound = self.budget.term_size_bound;
        let extra = &self.budget.atom_sample;
        let mut list = vec![Term::constant(b.clone())];
        list.extend(enumerate_normal_with(
            &Context::new(),
            b,
            self.base,
            bound,
            extra,
        ));
        list.extend(
            self.budget
                .witnesses
                .iter()
                .filter(|(_, f)| f == b)
                .map(|(t, _)| t.clone()),
        );
        if self.budget.random_witnesses > 0 {
            let mut pool = enumerate_normal_with(&Context::new(), b, self.base, bound + 2, extra);
            pool.retain(|t| t.size() > bound);
            let mut h = DefaultHasher::new();
            b.hash(&mut h);
            let mut rng = ChaCha8Rng::seed_from_u64(self.budget.seed ^ h.finish());
            list.extend(
                pool.choose_multiple(&mut rng, self.budget.random_witnesses)
                    .cloned(),
            );
        }
        let mut keys = BTreeSet::new();
        list.retain(|t| keys.insert(t.alpha_key()));
        let list = Rc::new(list);
        self.cache.insert(b.clone(), list.clone());
        list
    }

    fn remark(&mut self, note: String) {
        self.note.get_or_insert(note);
    }

    /// Unfolds `a` on `t`. `Err` carries the first failing probe.
    pub(crate) fn probe(
        &mut self,
        t: &Term,
        a: &Formula,
        depth: usize,
        probes: &mut Vec<Probe>,
    ) -> Result<Status, Box<Counterexample>> {
        if let Formula::Atom(_) = a {
            return self.atomic(t, a, probes);
        }
        if depth >= self.budget.unfold_depth {
            self.remark(format!(
                "unfold depth {} exceeded",
                self.budget.unfold_depth
            ));
            return Ok(Status::Unknown);
        }
        let Some(subject) = self.subject(t) else {
            return Ok(Status::Unknown);
        };
        let mut agg = Status::Certified;
        match a {
            Formula::Arrow(b, c) => {
                for s in self.witnesses(b).iter() {
                    if self.exhausted() {
                        agg = agg.join(Status::BoundedOk);
                        break;
                    }
                    probes.push(Probe::Term(s.clone()));
                    let next = self.apply(&subject, s);
                    let r = self.probe(&next, c, depth + 1, probes);
                    probes.pop();
                    agg = agg.join(r?);
                }
            }
            Formula::Forall(x, b) => {
                for y in self.atoms.clone() {
                    if self.exhausted() {
                        agg = agg.join(Status::BoundedOk);
                        break;
                    }
                    probes.push(Probe::Atom(y.clone()));
                    let next = self.apply_atom(&subject, &y);
                    let r = self.probe(&next, &b.subst_atom(x, &y), depth + 1, probes);
                    probes.pop();
                    agg = agg.join(r?);
                }
            }
            Formula::Atom(_) => unreachable!(),
        }
        if agg == Status::Unknown {
            return Ok(Status::Unknown);
        }
        Ok(if self.certifies(t, a) {
            Status::Certified
        } else {
            Status::BoundedOk
        })
    }

    fn exhausted(&mut self) -> bool {
        if self.probes_done >= self.budget.max_probes {
            self.truncated = true;
        }
        self.truncated
    }

    /// The term whose eliminations are probed: `t` itself in the E-phase,
    /// its normal form in the I-phase.
    fn subject(&mut self, t: &Term) -> Option<Term> {
        match self.flavor {
            Flavor::E => Some(t.clone()),
            Flavor::I => {
                let nf = normal_form(t, self.budget.fuel);
                self.fuel_used += nf.steps;
                if nf.status == TraceStatus::Normalized {
                    Some(nf.term)
                } else {
                    self.remark(format!("no normal form for {t} within {} steps", nf.steps));
                    None
                }
            }
        }
    }

    fn apply(&self, subject: &Term, s: &Term) -> Term {
        match self.flavor {
            Flavor::E => Term::app(subject.clone(), s.clone()),
            // (u x)[x := s] taken literally from the η-expansion λx.(u x).
            Flavor::I => match eta_expand(subject, EtaMode::Term) {
                Term::Lam { binder, body, .. } => body.subst(&binder, s),
                _ => unreachable!("η-expansion is an abstraction"),
            },
        }
    }

    fn apply_atom(&self, subject: &Term, y: &Atom) -> Term {
        match self.flavor {
            Flavor::E => Term::tapp(subject.clone(), y.clone()),
            Flavor::I => match eta_expand(subject, EtaMode::Atom) {
                Term::TLam { binder, body } => body.subst_atom(&binder, y),
                _ => unreachable!("η-expansion is an abstraction"),
            },
        }
    }

    fn atomic(
        &mut self,
        t: &Term,
        a: &Formula,
        probes: &[Probe],
    ) -> Result<Status, Box<Counterexample>> {
        self.probes_done += 1;
        self.tried.push(t.to_string());
        let nf = normal_form(t, self.budget.fuel);
        self.fuel_used += nf.steps;
        if nf.status != TraceStatus::Normalized {
            self.remark(format!("no normal form for {t} within {} steps", nf.steps));
            return Ok(Status::Unknown);
        }
        match check(&Context::new(), &nf.term, a) {
            Ok(_) => Ok(Status::Certified),
            Err(e) => Err(Box::new(Counterexample {
                substitution: Vec::new(),
                probes: probes.to_vec(),
                failing_term: t.clone(),
                failing_formula: a.clone(),
                normal_form: Some(nf.term),
                reason: e.to_string(),
            })),
        }
    }

    /// A derivation-backed reason for membership: `t` is derivable, or it
    /// is a constant-headed spine whose normal form is derivable.
    pub(crate) fn certifies(&mut self, t: &Term, a: &Formula) -> bool {
        if check(&Context::new(), t, a).is_ok() {
            return true;
        }
        if !t.is_constant_headed() {
            return false;
        }
        let nf = normal_form(t, self.budget.fuel);
        self.fuel_used += nf.steps;
        nf.status == TraceStatus::Normalized && check(&Context::new(), &nf.term, a).is_ok()
    }

    /// Packages a probing outcome with its evidence.
    pub(crate) fn verdict(
        self,
        t: &Term,
        a: &Formula,
        found: Result<Status, Box<Counterexample>>,
        substitution: Vec<(crate::syntax::VarName, Term)>,
    ) -> Verdict {
        let fuel = self.budget.fuel;
        let mut evidence = Evidence {
            witnesses_tried: self.tried,
            fuel_used: self.fuel_used,
            truncated: self.truncated,
            note: self.note,
            ..Evidence::default()
        };
        let status = match found {
            Err(mut cex) => {
                cex.substitution = substitution;
                let trace = normalize(&cex.failing_term, fuel);
                evidence.fuel_used += trace.len() as u64;
                evidence.trace = Some(trace);
                evidence.counterexample = Some(*cex);
                evidence.note = None;
                Status::Refuted
            }
            Ok(Status::Certified) => {
                let trace = normalize(t, fuel);
                evidence.fuel_used += trace.len() as u64;
                evidence.derivation = check(&Context::new(), t, a)
                    .or_else(|_| check(&Context::new(), trace.last(), a))
                    .ok();
                evidence.trace = Some(trace);
                Status::Certified
            }
            Ok(status) => status,
        };
        if status == Status::BoundedOk && evidence.note.is_none() {
            evidence.note = Some("passed every witness tried; no derivation found".into());
        }
        Verdict {
            status,
            formula: a.clone(),
            term: t.clone(),
            flavor: Some(self.flavor),
            evidence,
        }
    }
}
