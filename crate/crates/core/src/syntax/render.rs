//! Canonical renderer: minimal parentheses, `parse(render(f)) == f`.

use std::fmt;

use crate::kernel::Formula;

/// Operator spelling for rendered output. Files are ASCII-canonical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderStyle {
    #[default]
    Ascii,
    Unicode,
}

/// Render with ASCII operators and minimal parentheses.
pub fn render(f: &Formula) -> String {
    render_styled(f, RenderStyle::Ascii)
}

pub fn render_styled(f: &Formula, style: RenderStyle) -> String {
    let mut out = String::new();
    write_prec(f, PREC_IMPLIES, style, &mut out);
    out
}

const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Atom(_) => PREC_ATOM,
        Formula::Not(_) | Formula::Box(_) | Formula::Diamond(_) => PREC_UNARY,
        Formula::And(_, _) => PREC_AND,
        Formula::Or(_, _) => PREC_OR,
        Formula::Implies(_, _) => PREC_IMPLIES,
    }
}

// `min` is the loosest precedence printable without parentheses here.
// Left-associative operators require their right child one level tighter;
// right-associative `->` is the mirror case.
fn write_prec(f: &Formula, min: u8, style: RenderStyle, out: &mut String) {
    let unicode = style == RenderStyle::Unicode;
    let parens = prec(f) < min;
    if parens {
        out.push('(');
    }
    match f {
        Formula::Atom(p) => out.push_str(p.as_str()),
        Formula::Not(g) => {
            out.push_str(if unicode { "¬" } else { "!" });
            write_prec(g, PREC_UNARY, style, out);
        }
        Formula::Box(g) => {
            out.push_str(if unicode { "□" } else { "[]" });
            write_prec(g, PREC_UNARY, style, out);
        }
        Formula::Diamond(g) => {
            out.push_str(if unicode { "◇" } else { "<>" });
            write_prec(g, PREC_UNARY, style, out);
        }
        Formula::And(a, b) => {
            write_prec(a, PREC_AND, style, out);
            out.push_str(if unicode { " ∧ " } else { " & " });
            write_prec(b, PREC_AND + 1, style, out);
        }
        Formula::Or(a, b) => {
            write_prec(a, PREC_OR, style, out);
            out.push_str(if unicode { " ∨ " } else { " | " });
            write_prec(b, PREC_OR + 1, style, out);
        }
        Formula::Implies(a, b) => {
            write_prec(a, PREC_IMPLIES + 1, style, out);
            out.push_str(if unicode { " → " } else { " -> " });
            write_prec(b, PREC_IMPLIES, style, out);
        }
    }
    if parens {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
