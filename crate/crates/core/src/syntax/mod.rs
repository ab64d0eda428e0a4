//! Formulas, terms and contexts: representation, parsing, printing,
//! α-equivalence and capture-avoiding substitution.

mod context;
mod formula;
mod names;
mod parse;
mod print;
mod term;

pub use context::{Context, DuplicateVariable};
pub use formula::Formula;
pub use names::{Atom, VarName, KEYWORDS};
pub use parse::{
    parse_formula, parse_goal, parse_open_term, parse_sequent, parse_term, ParseError, Sequent,
};
pub(crate) use parse::{parse_sequent_in, parse_sugared_formula, parse_term_in};
pub use term::{SpineArg, Term};

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

// Terms and formulas travel through JSON as their canonical text.

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Formula, D::Error> {
        let text = String::deserialize(d)?;
        parse_formula(&text).map_err(de::Error::custom)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Term, D::Error> {
        let text = String::deserialize(d)?;
        parse_term(&text).map_err(de::Error::custom)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Atom, D::Error> {
        let text = String::deserialize(d)?;
        Atom::try_new(&text).ok_or_else(|| de::Error::custom(format!("illegal atom `{text}`")))
    }
}

impl Serialize for VarName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl Serialize for Context {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.entries().iter().map(|(x, a)| format!("{x} : {a}")))
    }
}
