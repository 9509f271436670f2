//! Labeled axiom sets: the guardrails a committed belief must satisfy.

use super::{Formula, KernelError};

/// An ordered list of uniquely labeled axioms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AxiomSet {
    entries: Vec<(String, Formula)>,
}

impl AxiomSet {
    pub fn new(entries: Vec<(String, Formula)>) -> Result<Self, KernelError> {
        let mut seen = std::collections::BTreeSet::new();
        for (label, _) in &entries {
            if !seen.insert(label.as_str()) {
                return Err(KernelError::DuplicateAxiomLabel(label.clone()));
            }
        }
        Ok(AxiomSet { entries })
    }

    pub fn empty() -> Self {
        AxiomSet::default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.entries.iter().map(|(l, f)| (l.as_str(), f))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn get(&self, label: &str) -> Option<&Formula> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, f)| f)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
