//! Line-oriented axiom files: `label: formula`, `#` comments.

use thiserror::Error;

use crate::kernel::{AxiomSet, Formula};

use super::parser::parse;
use super::ParseError;

/// One parsed axiom entry with its original source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomEntry {
    pub label: String,
    pub source: String,
    pub formula: Formula,
}

/// A parsed axiom file, entry order preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomFile {
    pub entries: Vec<AxiomEntry>,
}

/// Axiom file errors, located by 1-based line (and column for formulas).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomFileError {
    #[error("line {line}: missing `:` between label and formula")]
    MissingColon { line: usize },
    #[error("line {line}: invalid label {label:?}")]
    BadLabel { line: usize, label: String },
    #[error("line {line}: duplicate label {label:?}")]
    DuplicateLabel { line: usize, label: String },
    #[error("line {line}, column {column}: {source}")]
    Formula {
        line: usize,
        column: usize,
        source: ParseError,
    },
}

impl AxiomFile {
    /// Parse axiom file text. `#` starts a comment anywhere in a line;
    /// blank lines are skipped; labels must be unique.
    pub fn parse(text: &str) -> Result<Self, AxiomFileError> {
        let mut entries: Vec<AxiomEntry> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            if body.trim().is_empty() {
                continue;
            }
            let colon = body
                .find(':')
                .ok_or(AxiomFileError::MissingColon { line })?;
            let label = body[..colon].trim();
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(AxiomFileError::BadLabel {
                    line,
                    label: label.to_string(),
                });
            }
            if entries.iter().any(|e| e.label == label) {
                return Err(AxiomFileError::DuplicateLabel {
                    line,
                    label: label.to_string(),
                });
            }
            let source = body[colon + 1..].trim().to_string();
            let formula = parse(&source).map_err(|e| {
                // Column within the original line, 1-based: text before the
                // formula plus leading whitespace plus the error offset.
                let lead = body[colon + 1..].len() - body[colon + 1..].trim_start().len();
                AxiomFileError::Formula {
                    line,
                    column: colon + 1 + lead + e.offset() + 1,
                    source: e,
                }
            })?;
            entries.push(AxiomEntry {
                label: label.to_string(),
                source,
                formula,
            });
        }
        Ok(AxiomFile { entries })
    }

    /// Convert to the kernel's axiom set.
    pub fn into_axiom_set(self) -> AxiomSet {
        AxiomSet::new(
            self.entries
                .into_iter()
                .map(|e| (e.label, e.formula))
                .collect(),
        )
        .expect("duplicate labels rejected at parse")
    }
}
