//! Recursive-descent parser for the formula grammar.

use crate::kernel::{Formula, Proposition};

use super::lexer::{lex, Spanned, Tok};
use super::ParseError;

/// Parse a formula from text.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.chars().count(),
    };
    let f = p.implies()?;
    match p.peek() {
        None => Ok(f),
        Some(s) => Err(ParseError::Syntax {
            expected: "end of input",
            found: s.tok.describe(),
            offset: s.offset,
        }),
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<Spanned> {
        let s = self.tokens.get(self.pos).cloned();
        if s.is_some() {
            self.pos += 1;
        }
        s
    }

    fn eat(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(s) if s.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(s) => Err(ParseError::Syntax {
                expected,
                found: s.tok.describe(),
                offset: s.offset,
            }),
            None => Err(ParseError::Syntax {
                expected,
                found: "end of input".into(),
                offset: self.end,
            }),
        }
    }

    // implies := or ('->' implies)?     right-associative
    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if matches!(self.peek(), Some(s) if s.tok == Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    // or := and ('|' and)*              left-associative
    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while matches!(self.peek(), Some(s) if s.tok == Tok::Pipe) {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    // and := unary ('&' unary)*         left-associative
    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Some(s) if s.tok == Tok::Amp) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    // unary := ('!' | '[]' | '<>') unary | primary
    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().map(|s| s.tok.clone()) {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::BoxOp) => {
                self.pos += 1;
                Ok(Formula::necessarily(self.unary()?))
            }
            Some(Tok::DiamondOp) => {
                self.pos += 1;
                Ok(Formula::possibly(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    // primary := ident | '(' implies ')'
    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.advance() {
            Some(Spanned {
                tok: Tok::Ident(name),
                offset,
            }) => Proposition::new(name.clone())
                .map(Formula::atom)
                .map_err(|_| ParseError::Syntax {
                    expected: "atom",
                    found: format!("identifier {name:?}"),
                    offset,
                }),
            Some(Spanned {
                tok: Tok::LParen, ..
            }) => {
                let f = self.implies()?;
                self.eat(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(s) => Err(ParseError::Syntax {
                expected: "atom, `!`, `[]`, `<>`, or `(`",
                found: s.tok.describe(),
                offset: s.offset,
            }),
            None => Err(ParseError::Syntax {
                expected: "atom, `!`, `[]`, `<>`, or `(`",
                found: "end of input".into(),
                offset: self.end,
            }),
        }
    }
}
