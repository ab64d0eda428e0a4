//! Recursive-descent parser for formulas, terms and sequents.
//!
//! The same parser serves the core grammar and the sugared grammar of
//! the encodings layer; in core mode the connective tokens `&`, `|`,
//! `~` and the `exists` binder are rejected and `Bot` is an ordinary atom.

use thiserror::Error;

use super::names::{Atom, VarName};
use super::{Context, Formula, Term};
use crate::encodings::Sugared;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Number(u32),
    Forall,
    Exists,
    Arrow,
    Turnstile,
    Dot,
    Colon,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Hash,
    At,
    Lambda,
    BigLambda,
    Amp,
    Bar,
    Tilde,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Hash => "`#`".into(),
            Tok::At => "`@`".into(),
            Tok::Lambda => "`\\`".into(),
            Tok::BigLambda => "`/\\`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let err = |message: String| ParseError {
            line: start.0,
            col: start.1,
            message,
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let (tok, width) = match two.as_str() {
            "->" => (Tok::Arrow, 2),
            "|-" => (Tok::Turnstile, 2),
            "/\\" => (Tok::BigLambda, 2),
            _ => match c {
                '.' => (Tok::Dot, 1),
                ':' => (Tok::Colon, 1),
                ',' => (Tok::Comma, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                '#' => (Tok::Hash, 1),
                '@' => (Tok::At, 1),
                '\\' => (Tok::Lambda, 1),
                '&' => (Tok::Amp, 1),
                '|' => (Tok::Bar, 1),
                '~' => (Tok::Tilde, 1),
                c if c.is_ascii_alphabetic() => {
                    let len = chars[i..]
                        .iter()
                        .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                        .count();
                    let word: String = chars[i..i + len].iter().collect();
                    let tok = match word.as_str() {
                        "forall" => Tok::Forall,
                        "exists" => Tok::Exists,
                        _ if c.is_ascii_uppercase() => Tok::Upper(word),
                        _ => Tok::Lower(word),
                    };
                    (tok, len)
                }
                c if c.is_ascii_digit() => {
                    let len = chars[i..].iter().take_while(|c| c.is_ascii_digit()).count();
                    let word: String = chars[i..i + len].iter().collect();
                    let n = word
                        .parse()
                        .map_err(|_| err(format!("number `{word}` out of range")))?;
                    (Tok::Number(n), len)
                }
                other => return Err(err(format!("unexpected character `{other}`"))),
            },
        };
        out.push(Spanned { tok, line, col });
        i += width;
        col += width;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    sugar: bool,
}

impl Parser {
    fn new(src: &str, sugar: bool) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            sugar,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            col: s.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            other => Err(self.error_here(format!("unexpected {} after input", other.describe()))),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        match self.peek().clone() {
            Tok::Upper(name) => {
                self.bump();
                Ok(Atom::new(&name))
            }
            Tok::Lower(name) => Err(self.error_here(format!(
                "expected an atom, found lowercase identifier `{name}` (atoms start with an uppercase letter)"
            ))),
            other => Err(self.error_here(format!("expected an atom, found {}", other.describe()))),
        }
    }

    fn var(&mut self) -> Result<VarName, ParseError> {
        match self.peek().clone() {
            Tok::Lower(name) => {
                self.bump();
                Ok(VarName::new(&name))
            }
            Tok::Upper(name) => Err(self.error_here(format!(
                "expected a variable, found uppercase identifier `{name}`"
            ))),
            other => {
                Err(self.error_here(format!("expected a variable, found {}", other.describe())))
            }
        }
    }

    fn sugar_only(&self, what: &str) -> Result<(), ParseError> {
        if self.sugar {
            Ok(())
        } else {
            Err(self.error_here(format!("{what} is only available in the sugared grammar")))
        }
    }

    // formula := quant | arrow
    fn formula(&mut self) -> Result<Sugared, ParseError> {
        match self.peek() {
            Tok::Forall | Tok::Exists => self.quantified(),
            _ => self.arrow(),
        }
    }

    fn quantified(&mut self) -> Result<Sugared, ParseError> {
        let is_exists = *self.peek() == Tok::Exists;
        if is_exists {
            self.sugar_only("`exists`")?;
        }
        self.bump();
        let binder = self.atom()?;
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        Ok(if is_exists {
            Sugared::Exists(binder, Box::new(body))
        } else {
            Sugared::Forall(binder, Box::new(body))
        })
    }

    // A right operand may be a quantifier, which then extends maximally.
    fn rhs(
        &mut self,
        next: fn(&mut Parser) -> Result<Sugared, ParseError>,
    ) -> Result<Sugared, ParseError> {
        match self.peek() {
            Tok::Forall | Tok::Exists => self.quantified(),
            _ => next(self),
        }
    }

    fn arrow(&mut self) -> Result<Sugared, ParseError> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.formula()?;
            Ok(Sugared::Arrow(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Sugared, ParseError> {
        let left = self.conjunction()?;
        if *self.peek() == Tok::Bar {
            self.sugar_only("`|`")?;
            self.bump();
            let right = self.rhs(Parser::disjunction)?;
            Ok(Sugared::Or(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn conjunction(&mut self) -> Result<Sugared, ParseError> {
        let left = self.negation()?;
        if *self.peek() == Tok::Amp {
            self.sugar_only("`&`")?;
            self.bump();
            let right = self.rhs(Parser::conjunction)?;
            Ok(Sugared::And(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn negation(&mut self) -> Result<Sugared, ParseError> {
        if *self.peek() == Tok::Tilde {
            self.sugar_only("`~`")?;
            self.bump();
            let inner = self.rhs(Parser::negation)?;
            Ok(Sugared::Neg(Box::new(inner)))
        } else {
            self.formula_primary()
        }
    }

    fn formula_primary(&mut self) -> Result<Sugared, ParseError> {
        match self.peek().clone() {
            Tok::Upper(name) if self.sugar && name == "Bot" => {
                self.bump();
                Ok(Sugared::Bot)
            }
            Tok::Upper(_) | Tok::Lower(_) => Ok(Sugared::Atom(self.atom()?)),
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => {
                Err(self.error_here(format!("expected a formula, found {}", other.describe())))
            }
        }
    }

    fn core_formula(&mut self) -> Result<Formula, ParseError> {
        Ok(self.formula()?.expand())
    }

    fn starts_term_atom(&self) -> bool {
        matches!(self.peek(), Tok::Lower(_) | Tok::LParen)
    }

    // term := "\" var [":" formula] "." term | "/\" atom "." term | app
    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Lambda => {
                self.bump();
                let binder = self.var()?;
                let annotation = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.core_formula()?)
                } else {
                    None
                };
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(Term::Lam {
                    binder,
                    annotation,
                    body: Box::new(body),
                })
            }
            Tok::BigLambda => {
                self.bump();
                let binder = self.atom()?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(Term::tlam(binder, body))
            }
            _ => self.application(),
        }
    }

    fn application(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.term_atom()?;
        loop {
            if *self.peek() == Tok::At {
                self.bump();
                if *self.peek() == Tok::LParen {
                    return Err(self.error_here(
                        "atom application takes a single atom, not a composite formula",
                    ));
                }
                let y = self.atom()?;
                acc = Term::tapp(acc, y);
            } else if self.starts_term_atom() {
                let arg = self.term_atom()?;
                acc = Term::app(acc, arg);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term_atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Lower(name) if name == "c" && *self.peek2() == Tok::LBrace => {
                self.bump();
                self.bump();
                let formula = self.core_formula()?;
                self.expect(Tok::RBrace)?;
                let tag = if *self.peek() == Tok::Hash {
                    self.bump();
                    match self.bump() {
                        Tok::Number(n) => Some(n),
                        other => {
                            return Err(self.error_here(format!(
                                "expected a constant tag number, found {}",
                                other.describe()
                            )))
                        }
                    }
                } else {
                    None
                };
                Ok(Term::Const { formula, tag })
            }
            Tok::Lower(_) => Ok(Term::Var(self.var()?)),
            Tok::LParen => {
                self.bump();
                let inner = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Upper(name) => Err(self.error_here(format!(
                "expected a term, found atom `{name}` (atom application is written `t @{name}`)"
            ))),
            other => Err(self.error_here(format!("expected a term, found {}", other.describe()))),
        }
    }

    fn context(&mut self) -> Result<Context, ParseError> {
        let mut ctx = Context::new();
        if *self.peek() == Tok::Turnstile {
            self.bump();
            return Ok(ctx);
        }
        loop {
            let x = self.var()?;
            self.expect(Tok::Colon)?;
            let a = self.core_formula()?;
            ctx = ctx
                .extend(x, a)
                .map_err(|e| self.error_here(e.to_string()))?;
            match self.bump() {
                Tok::Comma => continue,
                Tok::Turnstile => return Ok(ctx),
                other => {
                    self.pos -= 1;
                    return Err(self
                        .error_here(format!("expected `,` or `|-`, found {}", other.describe())));
                }
            }
        }
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src, false)?;
    let f = p.core_formula()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    parse_term_in(src, false)
}

pub(crate) fn parse_term_in(src: &str, sugar: bool) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, sugar)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub(crate) fn parse_sugared_formula(src: &str) -> Result<Sugared, ParseError> {
    let mut p = Parser::new(src, true)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// A judgment `Γ |- t : A` as written in input files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub context: Context,
    pub term: Term,
    pub formula: Formula,
}

/// Parse `x:A, y:B |- t : C`. An empty context is written `|- t : C`.
pub fn parse_sequent(src: &str) -> Result<Sequent, ParseError> {
    parse_sequent_in(src, false)
}

pub(crate) fn parse_sequent_in(src: &str, sugar: bool) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(src, sugar)?;
    let context = p.context()?;
    let term = p.term()?;
    p.expect(Tok::Colon)?;
    let formula = p.core_formula()?;
    p.expect_eof()?;
    Ok(Sequent {
        context,
        term,
        formula,
    })
}

/// Parse `Γ |- t` (no formula), as used by synthesis.
pub fn parse_open_term(src: &str) -> Result<(Context, Term), ParseError> {
    let mut p = Parser::new(src, false)?;
    let context = p.context()?;
    let term = p.term()?;
    p.expect_eof()?;
    Ok((context, term))
}

/// Parse `Γ |- A` or a bare formula `A`.
pub fn parse_goal(src: &str) -> Result<(Context, Formula), ParseError> {
    let mut p = Parser::new(src, false)?;
    let has_turnstile = p.toks.iter().any(|s| s.tok == Tok::Turnstile);
    let context = if has_turnstile {
        p.context()?
    } else {
        Context::new()
    };
    let formula = p.core_formula()?;
    p.expect_eof()?;
    Ok((context, formula))
}
