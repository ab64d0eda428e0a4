//! Second-order encodings of ⊥, ¬, ∧, ∨ and ∃, with introduction and
//! elimination combinators.
//!
//! Eliminations are compiled down to atomic instantiations: when the
//! result formula is compound, the combinator abstracts over its
//! arguments (and atom binders) until an atom is reached, which is the
//! only kind of formula `@` may instantiate.

use std::collections::BTreeSet;

use crate::syntax::{self, Atom, Context, Formula, ParseError, Sequent, Term, VarName};

/// A formula that may use the encoded connectives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sugared {
    Atom(Atom),
    Arrow(Box<Sugared>, Box<Sugared>),
    Forall(Atom, Box<Sugared>),
    Bot,
    Neg(Box<Sugared>),
    And(Box<Sugared>, Box<Sugared>),
    Or(Box<Sugared>, Box<Sugared>),
    Exists(Atom, Box<Sugared>),
}

const BINDER_PREFERENCE: &[&str] = &["Z", "Y", "X", "W", "V", "U"];

fn fresh_binder(avoid: &BTreeSet<Atom>) -> Atom {
    BINDER_PREFERENCE
        .iter()
        .find(|n| !avoid.contains(**n))
        .map(|n| Atom::new(n))
        .unwrap_or_else(|| Atom::new("Z").freshen(|n| avoid.contains(n)))
}

pub fn bot() -> Formula {
    let z = fresh_binder(&BTreeSet::new());
    Formula::forall(z.clone(), Formula::Atom(z))
}

pub fn neg(a: Formula) -> Formula {
    Formula::arrow(a, bot())
}

pub fn and(a: Formula, b: Formula) -> Formula {
    let mut avoid = a.free_atoms();
    avoid.extend(b.free_atoms());
    let zn = fresh_binder(&avoid);
    let z = Formula::Atom(zn.clone());
    Formula::forall(zn, Formula::arrow(Formula::arrows([a, b], z.clone()), z))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    let mut avoid = a.free_atoms();
    avoid.extend(b.free_atoms());
    let zn = fresh_binder(&avoid);
    let z = Formula::Atom(zn.clone());
    Formula::forall(
        zn,
        Formula::arrows(
            [Formula::arrow(a, z.clone()), Formula::arrow(b, z.clone())],
            z,
        ),
    )
}

pub fn exists(x: Atom, a: Formula) -> Formula {
    let mut avoid = a.free_atoms();
    avoid.insert(x.clone());
    let yn = fresh_binder(&avoid);
    let y = Formula::Atom(yn.clone());
    Formula::forall(
        yn,
        Formula::arrow(Formula::forall(x, Formula::arrow(a, y.clone())), y),
    )
}

impl Sugared {
    /// Macro-expand into a core formula.
    pub fn expand(&self) -> Formula {
        match self {
            Sugared::Atom(a) => Formula::Atom(a.clone()),
            Sugared::Arrow(l, r) => Formula::arrow(l.expand(), r.expand()),
            Sugared::Forall(x, b) => Formula::forall(x.clone(), b.expand()),
            Sugared::Bot => bot(),
            Sugared::Neg(a) => neg(a.expand()),
            Sugared::And(a, b) => and(a.expand(), b.expand()),
            Sugared::Or(a, b) => or(a.expand(), b.expand()),
            Sugared::Exists(x, a) => exists(x.clone(), a.expand()),
        }
    }
}

pub fn parse_sugared(src: &str) -> Result<Sugared, ParseError> {
    syntax::parse_sugared_formula(src)
}

/// Parse a formula in the sugared grammar and expand it.
pub fn expand_str(src: &str) -> Result<Formula, ParseError> {
    Ok(parse_sugared(src)?.expand())
}

/// Parse a term whose constants and annotations may use sugared formulas.
pub fn parse_sugared_term(src: &str) -> Result<Term, ParseError> {
    syntax::parse_term_in(src, true)
}

pub fn parse_sugared_sequent(src: &str) -> Result<Sequent, ParseError> {
    syntax::parse_sequent_in(src, true)
}

/// Fresh-name supply that avoids every name seen in its inputs.
struct Supply {
    vars: BTreeSet<VarName>,
    atoms: BTreeSet<Atom>,
}

impl Supply {
    fn new(ctx: &Context, terms: &[&Term], formulas: &[&Formula]) -> Supply {
        let mut vars = BTreeSet::new();
        let mut atoms = ctx.free_atoms();
        for (x, a) in ctx.entries() {
            vars.insert(x.clone());
            a.all_atoms(&mut atoms);
        }
        for t in terms {
            t.all_vars(&mut vars);
            t.all_atoms(&mut atoms);
        }
        for f in formulas {
            f.all_atoms(&mut atoms);
        }
        Supply { vars, atoms }
    }

    fn var(&mut self, base: &str) -> VarName {
        let v = VarName::new(base).freshen(|n| self.vars.contains(n));
        self.vars.insert(v.clone());
        v
    }

    fn atom(&mut self, base: &Atom) -> Atom {
        let a = base.freshen(|n| self.atoms.contains(n));
        self.atoms.insert(a.clone());
        a
    }
}

/// Instantiation overflow: from `t : ∀X.X` build a term of any formula.
pub fn io_elab(t: &Term, target: &Formula, ctx: &Context) -> Term {
    let mut supply = Supply::new(ctx, &[t], &[]);
    // Binders of the target may be reused as long as they do not clash
    // with atoms of t or the context.
    let mut reserved = t.free_atoms();
    reserved.extend(ctx.free_atoms());
    io_elab_in(t, target, &mut supply, &reserved)
}

fn io_elab_in(t: &Term, target: &Formula, supply: &mut Supply, reserved: &BTreeSet<Atom>) -> Term {
    match target {
        Formula::Atom(y) => Term::tapp(t.clone(), y.clone()),
        Formula::Arrow(_, c) => {
            let x = supply.var("x");
            Term::lam(x, io_elab_in(t, c, supply, reserved))
        }
        Formula::Forall(x, b) => {
            if reserved.contains(x) {
                let fresh = supply.atom(x);
                let body = b.subst_atom(x, &fresh);
                Term::tlam(fresh, io_elab_in(t, &body, supply, reserved))
            } else {
                Term::tlam(x.clone(), io_elab_in(t, b, supply, reserved))
            }
        }
    }
}

/// `⊥`-elimination: `abort(t) : A` for `t : ⊥`.
pub fn abort(t: &Term, target: &Formula, ctx: &Context) -> Term {
    io_elab(t, target, ctx)
}

/// `⟨t, s⟩ : A ∧ B`.
pub fn pair(t: &Term, a: &Formula, s: &Term, b: &Formula, ctx: &Context) -> Term {
    let mut supply = Supply::new(ctx, &[t, s], &[a, b]);
    let z = supply.atom(&Atom::new("Z"));
    let f = supply.var("f");
    let body = Term::app(Term::app(Term::Var(f.clone()), t.clone()), s.clone());
    let handler = Formula::arrows([a.clone(), b.clone()], Formula::Atom(z.clone()));
    Term::tlam(z, Term::lam_ann(f, handler, body))
}

type Handler2<'a> = &'a dyn Fn(Term, Term) -> Term;

fn elim_and(p: &Term, target: &Formula, handler: Handler2<'_>, supply: &mut Supply) -> Term {
    match target {
        Formula::Atom(y) => {
            let a = supply.var("a");
            let b = supply.var("b");
            let body = handler(Term::Var(a.clone()), Term::Var(b.clone()));
            Term::app(
                Term::tapp(p.clone(), y.clone()),
                Term::lam(a, Term::lam(b, body)),
            )
        }
        Formula::Arrow(_, d) => {
            let c = supply.var("c");
            let cv = Term::Var(c.clone());
            let next = move |x: Term, y: Term| Term::app(handler(x, y), cv.clone());
            Term::lam(c, elim_and(p, d, &next, supply))
        }
        Formula::Forall(w, d) => {
            let fresh = supply.atom(w);
            let body = d.subst_atom(w, &fresh);
            let at = fresh.clone();
            let next = move |x: Term, y: Term| Term::tapp(handler(x, y), at.clone());
            Term::tlam(fresh, elim_and(p, &body, &next, supply))
        }
    }
}

/// First projection of `p : A ∧ B`.
pub fn proj1(p: &Term, a: &Formula, b: &Formula, ctx: &Context) -> Term {
    let mut supply = Supply::new(ctx, &[p], &[a, b]);
    elim_and(p, a, &|x, _| x, &mut supply)
}

/// Second projection of `p : A ∧ B`.
pub fn proj2(p: &Term, a: &Formula, b: &Formula, ctx: &Context) -> Term {
    let mut supply = Supply::new(ctx, &[p], &[a, b]);
    elim_and(p, b, &|_, y| y, &mut supply)
}

fn inject(t: &Term, a: &Formula, b: &Formula, ctx: &Context, left: bool) -> Term {
    let mut supply = Supply::new(ctx, &[t], &[a, b]);
    let z = supply.atom(&Atom::new("Z"));
    let f = supply.var("f");
    let g = supply.var("g");
    let chosen = if left { &f } else { &g };
    let body = Term::app(Term::Var(chosen.clone()), t.clone());
    let zf = Formula::Atom(z.clone());
    let (fa, gb) = (
        Formula::arrow(a.clone(), zf.clone()),
        Formula::arrow(b.clone(), zf),
    );
    Term::tlam(z, Term::lam_ann(f, fa, Term::lam_ann(g, gb, body)))
}

/// Left injection `t : A` into `A ∨ B`.
pub fn inl(t: &Term, a: &Formula, b: &Formula, ctx: &Context) -> Term {
    inject(t, a, b, ctx, true)
}

/// Right injection `t : B` into `A ∨ B`.
pub fn inr(t: &Term, a: &Formula, b: &Formula, ctx: &Context) -> Term {
    inject(t, a, b, ctx, false)
}

type Handler1<'a> = &'a dyn Fn(Term) -> Term;

fn elim_or(
    t: &Term,
    target: &Formula,
    left: Handler1<'_>,
    right: Handler1<'_>,
    supply: &mut Supply,
) -> Term {
    match target {
        Formula::Atom(y) => {
            let a = supply.var("a");
            let b = supply.var("b");
            let l = Term::lam(a.clone(), left(Term::Var(a)));
            let r = Term::lam(b.clone(), right(Term::Var(b)));
            Term::app(Term::app(Term::tapp(t.clone(), y.clone()), l), r)
        }
        Formula::Arrow(_, d) => {
            let c = supply.var("c");
            let cv = Term::Var(c.clone());
            let cv2 = cv.clone();
            let l = move |x: Term| Term::app(left(x), cv.clone());
            let r = move |x: Term| Term::app(right(x), cv2.clone());
            Term::lam(c, elim_or(t, d, &l, &r, supply))
        }
        Formula::Forall(w, d) => {
            let fresh = supply.atom(w);
            let body = d.subst_atom(w, &fresh);
            let (a1, a2) = (fresh.clone(), fresh.clone());
            let l = move |x: Term| Term::tapp(left(x), a1.clone());
            let r = move |x: Term| Term::tapp(right(x), a2.clone());
            Term::tlam(fresh, elim_or(t, &body, &l, &r, supply))
        }
    }
}

/// Case analysis on `t : A ∨ B` with `f : A → C` and `g : B → C`.
#[allow(clippy::too_many_arguments)]
pub fn case(
    t: &Term,
    a: &Formula,
    b: &Formula,
    f: &Term,
    g: &Term,
    c: &Formula,
    ctx: &Context,
) -> Term {
    let mut supply = Supply::new(ctx, &[t, f, g], &[a, b, c]);
    elim_or(
        t,
        c,
        &|x| Term::app(f.clone(), x),
        &|y| Term::app(g.clone(), y),
        &mut supply,
    )
}

/// Pack `t : A[X := witness]` into `∃X.A`.
pub fn ex_intro(witness: &Atom, t: &Term, x: &Atom, a: &Formula, ctx: &Context) -> Term {
    let mut supply = Supply::new(ctx, &[t], &[a]);
    supply.atoms.insert(x.clone());
    supply.atoms.insert(witness.clone());
    let y = supply.atom(&Atom::new("Y"));
    let h = supply.var("h");
    let body = Term::app(Term::tapp(Term::Var(h.clone()), witness.clone()), t.clone());
    Term::tlam(y, Term::lam(h, body))
}

type HandlerAtom<'a> = &'a dyn Fn(&Atom, Term) -> Term;

fn elim_exists(p: &Term, target: &Formula, handler: HandlerAtom<'_>, supply: &mut Supply) -> Term {
    match target {
        Formula::Atom(y) => {
            let xa = supply.atom(&Atom::new("X"));
            let z = supply.var("z");
            let h = Term::tlam(xa.clone(), Term::lam(z.clone(), handler(&xa, Term::Var(z))));
            Term::app(Term::tapp(p.clone(), y.clone()), h)
        }
        Formula::Arrow(_, e) => {
            let d = supply.var("d");
            let dv = Term::Var(d.clone());
            let next = move |xa: &Atom, z: Term| Term::app(handler(xa, z), dv.clone());
            Term::lam(d, elim_exists(p, e, &next, supply))
        }
        Formula::Forall(w, e) => {
            let fresh = supply.atom(w);
            let body = e.subst_atom(w, &fresh);
            let at = fresh.clone();
            let next = move |xa: &Atom, z: Term| Term::tapp(handler(xa, z), at.clone());
            Term::tlam(fresh, elim_exists(p, &body, &next, supply))
        }
    }
}

/// Unpack `p : ∃X.A` with `h : ∀X.(A → C)`, where X is not free in C.
pub fn ex_elim(p: &Term, x: &Atom, a: &Formula, h: &Term, c: &Formula, ctx: &Context) -> Term {
    let mut supply = Supply::new(ctx, &[p, h], &[a, c]);
    supply.atoms.insert(x.clone());
    elim_exists(
        p,
        c,
        &|xa, z| Term::app(Term::tapp(h.clone(), xa.clone()), z),
        &mut supply,
    )
}
