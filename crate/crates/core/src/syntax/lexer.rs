//! Tokenizer for the formula grammar.

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    BoxOp,
    DiamondOp,
    LParen,
    RParen,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier {name:?}"),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::BoxOp => "`[]`".into(),
            Tok::DiamondOp => "`<>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub offset: usize,
}

/// Two-character operators (`->`, `[]`, `<>`) must be complete; a lone
/// first character is a lexical error at its own offset.
pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let offset = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => out.push(Spanned { tok: Tok::Bang, offset }),
            '&' => out.push(Spanned { tok: Tok::Amp, offset }),
            '|' => out.push(Spanned { tok: Tok::Pipe, offset }),
            '(' => out.push(Spanned { tok: Tok::LParen, offset }),
            ')' => out.push(Spanned { tok: Tok::RParen, offset }),
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Spanned { tok: Tok::Arrow, offset });
                i += 1;
            }
            '[' if chars.get(i + 1) == Some(&']') => {
                out.push(Spanned { tok: Tok::BoxOp, offset });
                i += 1;
            }
            '<' if chars.get(i + 1) == Some(&'>') => {
                out.push(Spanned { tok: Tok::DiamondOp, offset });
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                out.push(Spanned {
                    tok: Tok::Ident(name),
                    offset: start,
                });
                continue;
            }
            c => return Err(ParseError::Lexical { ch: c, offset }),
        }
        i += 1;
    }
    Ok(out)
}
