//! Text syntax for modal formulas and axiom files.
//!
//! Grammar (tightest first): unary `!` `[]` `<>`, then `&`, then `|`, then
//! right-associative `->`; parentheses group; atoms are identifiers;
//! whitespace is insignificant. Files are ASCII-canonical; the renderer can
//! optionally emit the Unicode operators.

mod axiom_file;
mod lexer;
mod parser;
mod render;

pub use axiom_file::{AxiomEntry, AxiomFile, AxiomFileError};
pub use parser::parse;
pub use render::{render, render_styled, RenderStyle};

use thiserror::Error;

/// Formula text errors. Every variant reports a character offset.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty formula")]
    Empty,
    #[error("unexpected character {ch:?} at offset {offset}")]
    Lexical { ch: char, offset: usize },
    #[error("expected {expected} at offset {offset}, found {found}")]
    Syntax {
        expected: &'static str,
        found: String,
        offset: usize,
    },
}

impl ParseError {
    /// Character offset of the error within the input (0 for empty input).
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Empty => 0,
            ParseError::Lexical { offset, .. } | ParseError::Syntax { offset, .. } => *offset,
        }
    }
}
