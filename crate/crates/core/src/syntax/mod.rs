//! Concrete and abstract syntax.
//!
//! ```text
//! G ::= A | /n | G , G | D => G | /n : { M } => G | link => G | exists X. G
//! D ::= A | /n | A :- G | forall X. D | { D. D. ... }
//! M ::= /n = G.  |  /n = D. D. ...
//! ```
//!
//! Module files are sequences of macro definitions. A definition extends
//! until the next `/name =` header. A body consisting of one goal statement
//! is a goal macro; otherwise each statement is a clause closed over its
//! free variables and the statements are joined by clause conjunction.

mod ast;
mod lexer;
mod parser;
mod render;

use std::fmt;

pub use ast::*;
pub use render::{render_clause, render_goal, render_macro_def, render_module, render_query, render_term};

use parser::Parser;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{origin}:{line}:{col}: {kind}")]
pub struct ParseError {
    pub origin: String,
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("macro header `/{0} =` has no body")]
    EmptyMacro(String),
    #[error("unterminated clause (missing `.`)")]
    Unterminated,
    #[error("negative proof bound {0}")]
    NegativeBound(i64),
}

impl ParseError {
    pub(crate) fn syntax(origin: &str, line: usize, col: usize, msg: String) -> Self {
        ParseError { origin: origin.to_string(), line, col, kind: ParseErrorKind::Syntax(msg) }
    }
}

/// Parses a page: macro definitions in file order.
pub fn parse_module_file(text: &str, origin: &str) -> Result<Vec<MacroDef>, ParseError> {
    let mut p = Parser::new(text, origin)?;
    p.module_file()
}

/// Parses `?- [(N)] goal.`
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(text, "<query>")?;
    p.query()
}

/// Parses a goal with no surrounding `?-` or terminator.
pub fn parse_goal(text: &str) -> Result<Goal, ParseError> {
    let mut p = Parser::new(text, "<goal>")?;
    let g = p.goal()?;
    p.expect_eof()?;
    Ok(g)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, "<term>")?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses one top-level clause statement; the trailing `.` is optional. The
/// result is closed over its free variables.
pub fn parse_clause(text: &str) -> Result<Clause, ParseError> {
    let trimmed = text.trim_end();
    let owned;
    let src = if trimmed.ends_with('.') {
        trimmed
    } else {
        owned = format!("{trimmed}.");
        &owned
    };
    let mut p = Parser::new(src, "<clause>")?;
    let c = p.top_clause()?;
    p.expect_eof()?;
    Ok(c)
}

/// Parses a plain program: a sequence of top-level clause statements with no
/// macro headers.
pub fn parse_program(text: &str, origin: &str) -> Result<Vec<Clause>, ParseError> {
    let mut p = Parser::new(text, origin)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.top_clause()?);
    }
    Ok(out)
}

/// Parses macro definitions written back to back, as rendered by
/// [`render_macro_def`] and [`render_module`].
pub fn parse_macro_defs(text: &str) -> Result<Vec<MacroDef>, ParseError> {
    let mut p = Parser::new(text, "<macros>")?;
    p.macro_defs(&lexer::Tok::Eof)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_goal(self))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_clause(self))
    }
}

impl fmt::Display for MacroDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_macro_def(self))
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_query(self))
    }
}

#[cfg(test)]
mod tests;
