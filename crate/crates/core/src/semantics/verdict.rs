use std::fmt;

use serde::{Serialize, Serializer};

use crate::reduction::ReductionTrace;
use crate::syntax::{Atom, Formula, Term, VarName};
use crate::typing::Derivation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Status {
    Certified,
    BoundedOk,
    Unknown,
    Refuted,
}

impl Status {
    /// Aggregation order: a refutation dominates, then an unknown, then a
    /// bounded pass. Certified is the identity.
    pub fn join(self, other: Status) -> Status {
        self.max(other)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Certified => "Certified",
            Status::BoundedOk => "BoundedOk",
            Status::Unknown => "Unknown",
            Status::Refuted => "Refuted",
        })
    }
}

/// Which phase model a membership question is asked in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Flavor {
    /// Elimination-based interpretation (`A*`).
    E,
    /// Introduction-based interpretation with one top η-expansion (`A†`).
    I,
}

impl std::str::FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Flavor, String> {
        match s {
            "E" | "e" => Ok(Flavor::E),
            "I" | "i" => Ok(Flavor::I),
            other => Err(format!("unknown flavor `{other}` (expected E or I)")),
        }
    }
}

/// An argument fed to the term under test while unfolding a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Probe {
    Term(Term),
    Atom(Atom),
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probe::Term(t) => write!(f, "{t}"),
            Probe::Atom(a) => write!(f, "@{a}"),
        }
    }
}

impl Serialize for Probe {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A concrete failing instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Closed terms substituted for the context variables, if any.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub substitution: Vec<(VarName, Term)>,
    /// Witnesses applied, outermost first.
    pub probes: Vec<Probe>,
    /// The closed term at an atomic formula that fails.
    pub failing_term: Term,
    pub failing_formula: Formula,
    /// Its normal form, when one was reached.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<Term>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<ReductionTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivation: Option<Derivation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Every probe evaluated, as canonical text (`t s1 @Y s2 ...`).
    pub witnesses_tried: Vec<String>,
    pub fuel_used: u64,
    /// Set when a probe or instance cap cut the search short.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
    /// Free-form explanation for Unknown and BoundedOk.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub formula: Formula,
    pub term: Term,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flavor: Option<Flavor>,
    pub evidence: Evidence,
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let mut s = format!("{}: {} : {}", self.status, self.term, self.formula);
        if let Some(c) = &self.evidence.counterexample {
            let probes: Vec<String> = c.probes.iter().map(|p| p.to_string()).collect();
            s.push_str(" -- counterexample");
            if !c.substitution.is_empty() {
                let subst: Vec<String> = c
                    .substitution
                    .iter()
                    .map(|(x, t)| format!("{x} := {t}"))
                    .collect();
                s.push_str(&format!(" [{}]", subst.join(", ")));
            }
            if !probes.is_empty() {
                s.push_str(&format!(" applied to {}", probes.join(" ")));
            }
            s.push_str(&format!(": {}", c.reason));
        } else if let Some(note) = &self.evidence.note {
            s.push_str(&format!(" -- {note}"));
        }
        s.push_str(&format!(
            " ({} witnesses, {} steps)",
            self.evidence.witnesses_tried.len(),
            self.evidence.fuel_used
        ));
        s
    }
}
