use std::collections::HashSet;
use std::sync::Arc;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, ParseErrorKind};

type PResult<T> = Result<T, ParseError>;

pub(crate) struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    origin: &'a str,
    taken_names: HashSet<String>,
    anon: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &str, origin: &'a str) -> PResult<Self> {
        let toks = tokenize(src, origin)?;
        let taken_names = toks
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Var(v) => Some(v.clone()),
                _ => None,
            })
            .collect();
        Ok(Parser { toks, pos: 0, origin, taken_names, anon: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError { origin: self.origin.to_string(), line: t.line, col: t.col, kind }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        if *self.peek() == Tok::Eof && wanted.contains("`.`") {
            return self.error_here(ParseErrorKind::Unterminated);
        }
        self.error_here(ParseErrorKind::Syntax(format!(
            "expected {wanted}, found {}",
            self.peek().describe()
        )))
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn anon_var(&mut self) -> Var {
        loop {
            self.anon += 1;
            let name = format!("_{}", self.anon);
            if !self.taken_names.contains(&name) {
                return Var::named(name);
            }
        }
    }

    fn var(&mut self) -> PResult<Var> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(if v == "_" { self.anon_var() } else { Var::named(v) })
            }
            _ => Err(self.unexpected("a variable")),
        }
    }

    // ---- terms ----

    pub(crate) fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Var(_) => Ok(Term::Var(self.var()?)),
            Tok::Int(i) => {
                self.bump();
                Ok(Term::int(i))
            }
            Tok::Ident(_) => self.atom(),
            Tok::LBrack => self.list(),
            _ => Err(self.unexpected("a term")),
        }
    }

    fn list(&mut self) -> PResult<Term> {
        self.expect(Tok::LBrack)?;
        if self.eat(&Tok::RBrack) {
            return Ok(Term::nil());
        }
        let mut items = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            items.push(self.term()?);
        }
        let tail = if self.eat(&Tok::Bar) { self.term()? } else { Term::nil() };
        self.expect(Tok::RBrack)?;
        Ok(Term::list(items, tail))
    }

    /// `name` or `name(t1, .., tn)`.
    fn atom(&mut self) -> PResult<Term> {
        let name = match self.peek().clone() {
            Tok::Ident(n) => n,
            _ => return Err(self.unexpected("an atom")),
        };
        self.bump();
        if !self.eat(&Tok::LParen) {
            return Ok(Term::constant(&name));
        }
        let mut args = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(Term::app(&name, args))
    }

    // ---- goals ----

    pub(crate) fn goal(&mut self) -> PResult<Goal> {
        let left = self.goal_item()?;
        if matches!(self.peek(), Tok::Comma | Tok::And) {
            self.bump();
            let right = self.goal()?;
            Ok(Goal::conj(left, right))
        } else {
            Ok(left)
        }
    }

    fn is_binder(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(k) if k == kw) && matches!(self.peek_at(1), Tok::Var(_))
    }

    fn goal_item(&mut self) -> PResult<Goal> {
        if self.is_binder("exists") {
            self.bump();
            let v = self.var()?;
            self.expect(Tok::Dot)?;
            let body = self.goal()?;
            return Ok(Goal::exists(v, body));
        }
        match self.peek().clone() {
            Tok::Link(origin) => {
                self.bump();
                self.expect(Tok::Arrow)?;
                let body = self.goal()?;
                Ok(Goal::Link { origin: origin.into(), body: Arc::new(body) })
            }
            Tok::Macro(name) => {
                self.bump();
                if self.eat(&Tok::Colon) {
                    let (line, col) = (self.toks[self.pos - 2].line, self.toks[self.pos - 2].col);
                    self.expect(Tok::LBrace)?;
                    let defs = self.macro_defs(&Tok::RBrace)?;
                    self.expect(Tok::RBrace)?;
                    if !defs.iter().any(|d| *d.name == *name) {
                        return Err(ParseError {
                            origin: self.origin.to_string(),
                            line,
                            col,
                            kind: ParseErrorKind::Syntax(format!(
                                "root macro `/{name}` is not defined in its page"
                            )),
                        });
                    }
                    self.expect(Tok::Arrow)?;
                    let body = self.goal()?;
                    Ok(Goal::LinkImpl(LinkImpl {
                        root: name.into(),
                        defs: defs.into(),
                        body: Arc::new(body),
                    }))
                } else if self.eat(&Tok::Arrow) {
                    let body = self.goal()?;
                    Ok(Goal::implies(Clause::MacroRef(name.into()), body))
                } else {
                    Ok(Goal::MacroRef(name.into()))
                }
            }
            Tok::LBrace => {
                let c = self.block()?;
                self.expect(Tok::Arrow)?;
                let body = self.goal()?;
                Ok(Goal::implies(c, body))
            }
            Tok::LParen => {
                self.bump();
                let g = self.goal()?;
                self.expect(Tok::RParen)?;
                if *self.peek() == Tok::Arrow {
                    return Err(self.error_here(ParseErrorKind::Syntax(
                        "the left side of `=>` must be a clause; use `{ ... }`".into(),
                    )));
                }
                Ok(g)
            }
            Tok::Ident(_) => {
                let a = self.atom()?;
                if self.eat(&Tok::Arrow) {
                    let body = self.goal()?;
                    Ok(Goal::implies(Clause::Fact(a), body))
                } else {
                    Ok(Goal::Atom(a))
                }
            }
            _ => Err(self.unexpected("a goal")),
        }
    }

    // ---- clauses ----

    /// A clause as written, without closing over free variables.
    pub(crate) fn clause(&mut self) -> PResult<Clause> {
        if self.is_binder("forall") {
            self.bump();
            let v = self.var()?;
            self.expect(Tok::Dot)?;
            let body = self.clause()?;
            return Ok(Clause::forall(v, body));
        }
        match self.peek().clone() {
            Tok::LBrace => self.block(),
            Tok::Macro(name) => {
                self.bump();
                Ok(Clause::MacroRef(name.into()))
            }
            Tok::Ident(_) => {
                let head = self.atom()?;
                if self.eat(&Tok::Neck) {
                    let body = self.goal()?;
                    Ok(Clause::rule(head, body))
                } else {
                    Ok(Clause::Fact(head))
                }
            }
            _ => Err(self.unexpected("a clause")),
        }
    }

    /// `{ c1. c2. ... }`, folded into a right-nested conjunction.
    fn block(&mut self) -> PResult<Clause> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while *self.peek() != Tok::RBrace {
            let c = self.clause()?;
            self.expect(Tok::Dot)?;
            stmts.push(c);
        }
        if stmts.is_empty() {
            return Err(self.error_here(ParseErrorKind::Syntax("empty clause block".into())));
        }
        self.expect(Tok::RBrace)?;
        Ok(fold_conj(stmts))
    }

    /// A top-level clause statement: the clause, its terminating `.`, and
    /// universal closure over its free variables.
    pub(crate) fn top_clause(&mut self) -> PResult<Clause> {
        let c = self.clause()?;
        self.expect(Tok::Dot)?;
        Ok(c.close())
    }

    // ---- macro definitions ----

    fn at_header(&self) -> bool {
        matches!(self.peek(), Tok::Macro(_)) && *self.peek_at(1) == Tok::Eq
    }

    fn at_def_end(&self, end: &Tok) -> bool {
        self.peek() == end || self.at_header()
    }

    /// Macro definitions up to (not including) `end`.
    pub(crate) fn macro_defs(&mut self, end: &Tok) -> PResult<Vec<MacroDef>> {
        let mut defs = Vec::new();
        while self.peek() != end {
            if !self.at_header() {
                return Err(self.unexpected("a macro header `/name =`"));
            }
            let name = match self.bump() {
                Tok::Macro(n) => n,
                _ => unreachable!(),
            };
            self.bump();
            if self.at_def_end(end) {
                return Err(self.error_here(ParseErrorKind::EmptyMacro(name)));
            }
            let body = self.macro_body(end)?;
            defs.push(MacroDef { name: name.into(), body });
        }
        Ok(defs)
    }

    /// A single goal statement becomes a goal macro; anything else is read as
    /// a sequence of closed clause statements.
    fn macro_body(&mut self, end: &Tok) -> PResult<MacroBody> {
        let start = self.pos;
        let goal_attempt = self.goal().and_then(|g| {
            self.expect(Tok::Dot)?;
            if self.at_def_end(end) {
                Ok(g)
            } else {
                Err(self.unexpected("another macro header"))
            }
        });
        let goal_err = match goal_attempt {
            Ok(g) => return Ok(MacroBody::Goal(Arc::new(g))),
            Err(e) => (self.pos, e),
        };
        self.pos = start;
        let clause_attempt = (|| {
            let mut stmts = Vec::new();
            while !self.at_def_end(end) {
                stmts.push(self.top_clause()?);
            }
            Ok(fold_conj(stmts))
        })();
        match clause_attempt {
            Ok(c) => Ok(MacroBody::Clause(Arc::new(c))),
            Err(e) => {
                // Report whichever reading got further.
                if goal_err.0 > self.pos {
                    Err(goal_err.1)
                } else {
                    Err(e)
                }
            }
        }
    }

    pub(crate) fn module_file(&mut self) -> PResult<Vec<MacroDef>> {
        // A leading `name.` line names the page and carries no meaning.
        if matches!(self.peek(), Tok::Link(_) | Tok::Ident(_)) && *self.peek_at(1) == Tok::Dot {
            self.bump();
            self.bump();
        }
        if !self.at_eof() && !self.at_header() {
            return Err(self.error_here(ParseErrorKind::Syntax(
                "clause outside of a macro definition".into(),
            )));
        }
        self.macro_defs(&Tok::Eof)
    }

    pub(crate) fn query(&mut self) -> PResult<Query> {
        self.expect(Tok::QueryMark)?;
        let mut bound = None;
        if *self.peek() == Tok::LParen && matches!(self.peek_at(1), Tok::Int(_)) && *self.peek_at(2) == Tok::RParen {
            self.bump();
            let n = match self.bump() {
                Tok::Int(n) => n,
                _ => unreachable!(),
            };
            if n < 0 {
                self.pos -= 1;
                return Err(self.error_here(ParseErrorKind::NegativeBound(n)));
            }
            self.bump();
            bound = Some(n as u64);
        }
        let goal = self.goal()?;
        self.expect(Tok::Dot)?;
        self.expect_eof()?;
        Ok(Query { bound, goal })
    }
}

pub(crate) fn fold_conj(mut stmts: Vec<Clause>) -> Clause {
    let mut acc = stmts.pop().expect("at least one clause");
    while let Some(c) = stmts.pop() {
        acc = Clause::conj(c, acc);
    }
    acc
}
