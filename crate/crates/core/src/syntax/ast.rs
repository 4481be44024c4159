//! Abstract syntax: terms, goals (G-formulas), clauses (D-formulas), macro
//! definitions (M-formulas), programs and queries.

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Interned-ish identifier. Cheap to clone.
pub type Name = Arc<str>;

/// Functor of the list constructor `[H|T]`.
pub const CONS: &str = ".";
/// The empty list `[]`.
pub const NIL: &str = "[]";

/// A logic variable.
///
/// Variables read from source text carry `id == 0`. Variables minted while
/// renaming apart carry a positive id that never occurs in parsed input; their
/// name is kept only for display.
#[derive(Clone, Debug)]
pub struct Var {
    name: Name,
    id: u64,
}

impl Var {
    pub fn named(name: impl Into<Name>) -> Self {
        Var { name: name.into(), id: 0 }
    }

    pub(crate) fn with_id(name: Name, id: u64) -> Self {
        debug_assert!(id > 0);
        Var { name, id }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn is_fresh(&self) -> bool {
        self.id != 0
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && (self.id != 0 || self.name == other.name)
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
        if self.id == 0 {
            self.name.hash(state);
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.id == 0 {
            f.write_str(&self.name)
        } else {
            write!(f, "_G{}", self.id)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Name(Name),
    Int(i64),
}

/// First-order term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Const(Constant),
    /// Functor applied to one or more arguments.
    Compound(Name, Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::named(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Constant::Name(name.into()))
    }

    pub fn int(i: i64) -> Term {
        Term::Const(Constant::Int(i))
    }

    /// `functor(args..)`; a constant when `args` is empty, so the compound
    /// arity is always at least one.
    pub fn app(functor: &str, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::constant(functor)
        } else {
            Term::Compound(functor.into(), args.into())
        }
    }

    pub fn nil() -> Term {
        Term::constant(NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Compound(CONS.into(), vec![head, tail].into())
    }

    /// `[a, b | tail]`
    pub fn list(items: Vec<Term>, tail: Term) -> Term {
        items.into_iter().rev().fold(tail, |acc, t| Term::cons(t, acc))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Predicate name and arity, for atoms.
    pub fn predicate(&self) -> Option<(&str, usize)> {
        match self {
            Term::Const(Constant::Name(n)) => Some((n, 0)),
            Term::Compound(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(_, args) => args,
            _ => &[],
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Const(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    /// Appends variables in first-occurrence order, skipping ones already seen.
    pub fn collect_vars(&self, seen: &mut HashSet<Var>, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::Compound(_, args) => {
                for a in args.iter() {
                    a.collect_vars(seen, out);
                }
            }
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut HashSet::new(), &mut out);
        out
    }
}

/// A page attached to a goal: `/root : { defs } => body`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinkImpl {
    pub root: Name,
    pub defs: Arc<[MacroDef]>,
    pub body: Arc<Goal>,
}

/// G-formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Goal {
    Atom(Term),
    MacroRef(Name),
    Conj(Arc<Goal>, Arc<Goal>),
    /// `D => G`
    ClauseImpl(Arc<Clause>, Arc<Goal>),
    /// `/n:M => G`
    LinkImpl(LinkImpl),
    /// A hyperlink `origin => G` that the loader has not resolved yet.
    Link { origin: Arc<str>, body: Arc<Goal> },
    Exists(Var, Arc<Goal>),
}

impl Goal {
    pub fn atom(t: Term) -> Goal {
        debug_assert!(!t.is_var());
        Goal::Atom(t)
    }

    pub fn conj(l: Goal, r: Goal) -> Goal {
        Goal::Conj(Arc::new(l), Arc::new(r))
    }

    pub fn implies(c: Clause, g: Goal) -> Goal {
        Goal::ClauseImpl(Arc::new(c), Arc::new(g))
    }

    pub fn exists(v: Var, g: Goal) -> Goal {
        Goal::Exists(v, Arc::new(g))
    }

    pub fn macro_ref(name: &str) -> Goal {
        Goal::MacroRef(name.into())
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut HashSet::new(), &mut out);
        out
    }

    pub(crate) fn collect_free(
        &self,
        bound: &mut Vec<Var>,
        seen: &mut HashSet<Var>,
        out: &mut Vec<Var>,
    ) {
        match self {
            Goal::Atom(t) => collect_term_free(t, bound, seen, out),
            Goal::MacroRef(_) => {}
            Goal::Conj(l, r) => {
                l.collect_free(bound, seen, out);
                r.collect_free(bound, seen, out);
            }
            Goal::ClauseImpl(c, g) => {
                c.collect_free(bound, seen, out);
                g.collect_free(bound, seen, out);
            }
            // Page definitions are closed text; only the body can mention
            // variables of the surrounding goal.
            Goal::LinkImpl(l) => l.body.collect_free(bound, seen, out),
            Goal::Link { body, .. } => body.collect_free(bound, seen, out),
            Goal::Exists(v, g) => {
                bound.push(v.clone());
                g.collect_free(bound, seen, out);
                bound.pop();
            }
        }
    }
}

fn collect_term_free(t: &Term, bound: &[Var], seen: &mut HashSet<Var>, out: &mut Vec<Var>) {
    for v in t.vars() {
        if !bound.contains(&v) && seen.insert(v.clone()) {
            out.push(v);
        }
    }
}

/// D-formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    Fact(Term),
    MacroRef(Name),
    /// `head :- body`
    Rule(Term, Arc<Goal>),
    Forall(Var, Arc<Clause>),
    Conj(Arc<Clause>, Arc<Clause>),
}

impl Clause {
    pub fn fact(t: Term) -> Clause {
        debug_assert!(!t.is_var());
        Clause::Fact(t)
    }

    pub fn rule(head: Term, body: Goal) -> Clause {
        Clause::Rule(head, Arc::new(body))
    }

    pub fn forall(v: Var, c: Clause) -> Clause {
        Clause::Forall(v, Arc::new(c))
    }

    pub fn conj(l: Clause, r: Clause) -> Clause {
        Clause::Conj(Arc::new(l), Arc::new(r))
    }

    pub fn macro_ref(name: &str) -> Clause {
        Clause::MacroRef(name.into())
    }

    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut HashSet::new(), &mut out);
        out
    }

    pub(crate) fn collect_free(
        &self,
        bound: &mut Vec<Var>,
        seen: &mut HashSet<Var>,
        out: &mut Vec<Var>,
    ) {
        match self {
            Clause::Fact(t) => collect_term_free(t, bound, seen, out),
            Clause::MacroRef(_) => {}
            Clause::Rule(h, b) => {
                collect_term_free(h, bound, seen, out);
                b.collect_free(bound, seen, out);
            }
            Clause::Forall(v, c) => {
                bound.push(v.clone());
                c.collect_free(bound, seen, out);
                bound.pop();
            }
            Clause::Conj(l, r) => {
                l.collect_free(bound, seen, out);
                r.collect_free(bound, seen, out);
            }
        }
    }

    /// Universal closure over the free variables, outermost binder first.
    pub fn close(self) -> Clause {
        let fv = self.free_vars();
        fv.into_iter().rev().fold(self, |c, v| Clause::forall(v, c))
    }

    /// Every head atom reachable without expanding macros.
    pub fn heads(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            match c {
                Clause::Fact(t) | Clause::Rule(t, _) => out.push(t),
                Clause::MacroRef(_) => {}
                Clause::Forall(_, c) => stack.push(c),
                Clause::Conj(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MacroKind {
    Goal,
    Clause,
}

impl fmt::Display for MacroKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MacroKind::Goal => f.write_str("goal"),
            MacroKind::Clause => f.write_str("clause"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MacroBody {
    Goal(Arc<Goal>),
    Clause(Arc<Clause>),
}

impl MacroBody {
    pub fn kind(&self) -> MacroKind {
        match self {
            MacroBody::Goal(_) => MacroKind::Goal,
            MacroBody::Clause(_) => MacroKind::Clause,
        }
    }
}

/// `/name = body`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MacroDef {
    pub name: Name,
    pub body: MacroBody,
}

impl MacroDef {
    pub fn goal(name: &str, g: Goal) -> MacroDef {
        MacroDef { name: name.into(), body: MacroBody::Goal(Arc::new(g)) }
    }

    pub fn clause(name: &str, c: Clause) -> MacroDef {
        MacroDef { name: name.into(), body: MacroBody::Clause(Arc::new(c)) }
    }
}

/// Persistent singly linked list. Pushing shares the tail, so extended copies
/// never disturb the original.
pub struct PList<T>(Option<Arc<PNode<T>>>);

struct PNode<T> {
    head: T,
    tail: PList<T>,
}

impl<T> PList<T> {
    pub fn new() -> Self {
        PList(None)
    }

    pub fn push(&self, head: T) -> Self {
        PList(Some(Arc::new(PNode { head, tail: self.clone() })))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    /// Address of the front node; 0 for the empty list.
    pub(crate) fn ptr_id(&self) -> usize {
        self.0.as_ref().map_or(0, |n| Arc::as_ptr(n) as *const () as usize)
    }

    pub fn first(&self) -> Option<&T> {
        self.0.as_ref().map(|n| &n.head)
    }

    pub fn rest(&self) -> Option<&PList<T>> {
        self.0.as_ref().map(|n| &n.tail)
    }

    pub fn iter(&self) -> PListIter<'_, T> {
        PListIter(self)
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    /// Pushes `items` so that `items[0]` ends up in front.
    pub fn extend_front<I>(&self, items: I) -> Self
    where
        I: IntoIterator<Item = T>,
        I::IntoIter: DoubleEndedIterator,
    {
        items.into_iter().rev().fold(self.clone(), |acc, x| acc.push(x))
    }
}

impl<T> Clone for PList<T> {
    fn clone(&self) -> Self {
        PList(self.0.clone())
    }
}

impl<T> Default for PList<T> {
    fn default() -> Self {
        PList::new()
    }
}

impl<T> Drop for PList<T> {
    fn drop(&mut self) {
        // Unlink iteratively so long lists do not recurse on drop.
        let mut cur = self.0.take();
        while let Some(node) = cur {
            match Arc::try_unwrap(node) {
                Ok(mut n) => cur = n.tail.0.take(),
                Err(_) => break,
            }
        }
    }
}

impl<T: PartialEq> PartialEq for PList<T> {
    fn eq(&self, other: &Self) -> bool {
        self.iter().eq(other.iter())
    }
}

impl<T: fmt::Debug> fmt::Debug for PList<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl<T> FromIterator<T> for PList<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let items: Vec<T> = iter.into_iter().collect();
        PList::new().extend_front(items)
    }
}

pub struct PListIter<'a, T>(&'a PList<T>);

impl<'a, T> Iterator for PListIter<'a, T> {
    type Item = &'a T;

    fn next(&mut self) -> Option<&'a T> {
        let node = self.0 .0.as_ref()?;
        self.0 = &node.tail;
        Some(&node.head)
    }
}

/// The pair of clause set and macro list threaded through proof search.
///
/// Clauses are tried front to back; `macros[0]` is the most recent definition.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub clauses: PList<Clause>,
    pub macros: PList<MacroDef>,
}

impl Program {
    pub fn new(clauses: impl IntoIterator<Item = Clause>, macros: impl IntoIterator<Item = MacroDef>) -> Self {
        Program { clauses: clauses.into_iter().collect(), macros: macros.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Program::default()
    }

    /// `{D} ∪ 𝒟`, with `D` tried first.
    pub fn with_clause(&self, c: Clause) -> Program {
        Program { clauses: self.clauses.push(c), macros: self.macros.clone() }
    }

    /// `M :: ℳ`, keeping `defs` in their given order at the front.
    pub fn with_macros(&self, defs: &[MacroDef]) -> Program {
        Program {
            clauses: self.clauses.clone(),
            macros: self.macros.extend_front(defs.iter().cloned()),
        }
    }
}

/// `?- (bound) goal.`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub bound: Option<u64>,
    pub goal: Goal,
}
