use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;

/// A propositional variable. Always starts with an uppercase ASCII letter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

/// A term variable. Always starts with a lowercase ASCII letter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarName(Arc<str>);

fn tail_ok(s: &str) -> bool {
    s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Words reserved by the surface grammar; never valid as variable names.
pub const KEYWORDS: &[&str] = &["forall", "exists"];

impl Atom {
    /// Panics if `name` is not a legal atom identifier.
    pub fn new(name: &str) -> Atom {
        Atom::try_new(name).unwrap_or_else(|| panic!("illegal atom name `{name}`"))
    }

    pub fn try_new(name: &str) -> Option<Atom> {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_uppercase() && tail_ok(chars.as_str()) => Some(Atom(name.into())),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl VarName {
    /// Panics if `name` is not a legal variable identifier.
    pub fn new(name: &str) -> VarName {
        VarName::try_new(name).unwrap_or_else(|| panic!("illegal variable name `{name}`"))
    }

    pub fn try_new(name: &str) -> Option<VarName> {
        let mut chars = name.chars();
        match chars.next() {
            Some(c)
                if c.is_ascii_lowercase()
                    && tail_ok(chars.as_str())
                    && !KEYWORDS.contains(&name) =>
            {
                Some(VarName(name.into()))
            }
            _ => None,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Atom {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for VarName {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Produce a name derived from `base` for which `taken` is false.
///
/// Trailing digits of `base` are stripped and replaced by the smallest
/// numeric suffix that is free, so `y` becomes `y1`, `y1` becomes `y2`
/// (if `y` is also taken), and so on. `base` itself is returned if free.
pub(crate) fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_owned();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { base } else { stem };
    (1u64..)
        .map(|i| format!("{stem}{i}"))
        .find(|cand| !taken(cand))
        .expect("unbounded suffix search")
}

impl Atom {
    /// A variant of `self` not rejected by `taken`.
    pub fn freshen(&self, taken: impl Fn(&str) -> bool) -> Atom {
        Atom(fresh_name(self.as_str(), taken).into())
    }
}

impl VarName {
    /// A variant of `self` not rejected by `taken`.
    pub fn freshen(&self, taken: impl Fn(&str) -> bool) -> VarName {
        let name = fresh_name(self.as_str(), |s| KEYWORDS.contains(&s) || taken(s));
        VarName(name.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_case() {
        assert!(Atom::try_new("X1_a").is_some());
        assert!(Atom::try_new("x").is_none());
        assert!(VarName::try_new("x'").is_none());
        assert!(VarName::try_new("forall").is_none());
        assert!(VarName::try_new("Xy").is_none());
    }

    #[test]
    fn freshening_strips_digits() {
        let taken = ["y", "y1"];
        assert_eq!(fresh_name("y", |s| taken.contains(&s)), "y2");
        assert_eq!(fresh_name("y1", |s| taken.contains(&s)), "y2");
        assert_eq!(fresh_name("z", |s| taken.contains(&s)), "z");
    }
}
