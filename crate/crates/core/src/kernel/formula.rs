//! Atomic propositions and the modal formula AST.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::KernelError;

/// An atomic proposition, compared by name only.
///
/// Names follow the identifier rule `[A-Za-z_][A-Za-z0-9_]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Proposition(String);

impl Proposition {
    pub fn new(name: impl Into<String>) -> Result<Self, KernelError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(Proposition(name))
        } else {
            Err(KernelError::InvalidProposition(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Proposition {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Proposition::new(s)
    }
}

impl TryFrom<String> for Proposition {
    type Error = KernelError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Proposition::new(s)
    }
}

impl From<Proposition> for String {
    fn from(p: Proposition) -> String {
        p.0
    }
}

/// A modal formula over atomic propositions.
///
/// `Box` is necessity ("in all accessible worlds"), `Diamond` possibility
/// ("in at least one accessible world"). The concrete text syntax lives in
/// [`crate::syntax`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Atom(Proposition),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Diamond(Box<Formula>),
}

impl Formula {
    pub fn atom(p: Proposition) -> Self {
        Formula::Atom(p)
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Necessity: `[] f`.
    pub fn necessarily(f: Formula) -> Self {
        Formula::Box(Box::new(f))
    }

    /// Possibility: `<> f`.
    pub fn possibly(f: Formula) -> Self {
        Formula::Diamond(Box::new(f))
    }

    /// Every atom occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<&Proposition> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a Proposition>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p);
            }
            Formula::Not(g) | Formula::Box(g) | Formula::Diamond(g) => g.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}
