use std::fmt::{self, Write};

use super::{Formula, Term};

// Minimal parenthesization: only the left operand of an arrow ever needs
// parentheses, because `forall` extends maximally right.
fn write_formula(f: &Formula, out: &mut impl Write) -> fmt::Result {
    match f {
        Formula::Atom(a) => out.write_str(a.as_str()),
        Formula::Arrow(l, r) => {
            if matches!(**l, Formula::Atom(_)) {
                write_formula(l, out)?;
            } else {
                out.write_char('(')?;
                write_formula(l, out)?;
                out.write_char(')')?;
            }
            out.write_str(" -> ")?;
            write_formula(r, out)
        }
        Formula::Forall(x, b) => {
            write!(out, "forall {x}. ")?;
            write_formula(b, out)
        }
    }
}

fn write_explicit(f: &Formula, top: bool, out: &mut impl Write) -> fmt::Result {
    match f {
        Formula::Atom(a) => out.write_str(a.as_str()),
        _ if !top => {
            out.write_char('(')?;
            write_explicit(f, true, out)?;
            out.write_char(')')
        }
        Formula::Arrow(l, r) => {
            write_explicit(l, false, out)?;
            out.write_str(" -> ")?;
            write_explicit(r, false, out)
        }
        Formula::Forall(x, b) => {
            write!(out, "forall {x}. ")?;
            write_explicit(b, false, out)
        }
    }
}

impl Formula {
    /// Fully parenthesized rendering: every compound proper subformula is
    /// wrapped. Parses back to the same formula.
    pub fn to_explicit_string(&self) -> String {
        let mut s = String::new();
        write_explicit(self, true, &mut s).expect("writing to a String");
        s
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pos {
    Top,
    Head,
    Arg,
}

fn write_term(t: &Term, pos: Pos, out: &mut impl Write) -> fmt::Result {
    let wrap = match t {
        Term::Var(_) | Term::Const { .. } => false,
        Term::Lam { .. } | Term::TLam { .. } => pos != Pos::Top,
        Term::App(..) | Term::TApp(..) => pos == Pos::Arg,
    };
    if wrap {
        out.write_char('(')?;
    }
    match t {
        Term::Var(x) => out.write_str(x.as_str())?,
        Term::Const { formula, tag } => {
            out.write_str("c{")?;
            write_formula(formula, out)?;
            out.write_char('}')?;
            if let Some(tag) = tag {
                write!(out, "#{tag}")?;
            }
        }
        Term::Lam {
            binder,
            annotation,
            body,
        } => {
            write!(out, "\\{binder}")?;
            if let Some(a) = annotation {
                out.write_char(':')?;
                write_formula(a, out)?;
            }
            out.write_str(". ")?;
            write_term(body, Pos::Top, out)?;
        }
        Term::TLam { binder, body } => {
            write!(out, "/\\{binder}. ")?;
            write_term(body, Pos::Top, out)?;
        }
        Term::App(f, a) => {
            write_term(f, Pos::Head, out)?;
            out.write_char(' ')?;
            write_term(a, Pos::Arg, out)?;
        }
        Term::TApp(f, y) => {
            write_term(f, Pos::Head, out)?;
            write!(out, " @{y}")?;
        }
    }
    if wrap {
        out.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, Pos::Top, f)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, Pos::Top, f)
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::{parse_formula, parse_term};

    fn roundtrip_formula(s: &str) {
        assert_eq!(parse_formula(s).unwrap().to_string(), s);
    }

    fn roundtrip_term(s: &str) {
        assert_eq!(parse_term(s).unwrap().to_string(), s);
    }

    #[test]
    fn canonical_formula_text() {
        roundtrip_formula("X -> Y -> X");
        roundtrip_formula("(X -> Y) -> X");
        roundtrip_formula("forall X. (X -> X) -> X");
        roundtrip_formula("(forall X. X) -> Y");
        roundtrip_formula("X -> forall Y. Y");
        assert_eq!(parse_formula("((X))").unwrap().to_string(), "X");
    }

    #[test]
    fn canonical_term_text() {
        roundtrip_term("\\x. x");
        roundtrip_term("(\\x. x x) c{X}");
        roundtrip_term("/\\X. \\x:X. x");
        roundtrip_term("c{forall X. X} @Y");
        roundtrip_term("f (g x) @X");
        roundtrip_term("(/\\X. \\x:X. x) @Y");
        roundtrip_term("c{X}#2");
        roundtrip_term("f (\\x. x)");
    }

    #[test]
    fn explicit_rendering() {
        let f = parse_formula("forall Z. (X -> Y -> Z) -> Z").unwrap();
        assert_eq!(f.to_explicit_string(), "forall Z. ((X -> (Y -> Z)) -> Z)");
        assert_eq!(parse_formula(&f.to_explicit_string()).unwrap(), f);
    }
}
