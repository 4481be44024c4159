//! Proof search over programs `⟨𝒟, ℳ⟩`.
//!
//! [`Engine::solve`] runs the unbounded procedure: depth-first, clauses in
//! program order, conjuncts left to right, macro list front to back. It may
//! not terminate. [`Engine::exec`] runs the length-bounded procedure, where
//! every rule application costs one step and a derivation may use at most
//! `m` of them.

mod bounded;
mod machine;
mod trace;

use std::sync::Arc;
use std::time::Instant;

pub use bounded::{Budget, ProofLength, SolveOutcome};
pub use trace::{Rule, Trace, TraceEvent};

use crate::builtins::{BuiltinError, BuiltinTable};
use crate::loader::{LinkResolver, LoadError};
use crate::syntax::{Clause, Goal, MacroBody, MacroDef, MacroKind, PList, Program, Term};
use crate::unify::Substitution;
use machine::{Config, Machine, Start};

#[derive(Clone, Debug, thiserror::Error)]
pub enum SolveError {
    #[error("no macro named /{0}")]
    MacroNotFound(String),
    #[error("macro /{name} cannot be used as a {want}")]
    IllTaggedMacro { name: String, want: MacroKind },
    #[error(transparent)]
    Builtin(#[from] BuiltinError),
    #[error("atomic goal is an unbound variable: {0}")]
    UnboundGoal(String),
    #[error("link `{0}` reached during search with no loader configured")]
    UnresolvedLink(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("wall-clock limit reached")]
    WallClock,
    #[error("search stack limit reached ({frames} frames)")]
    ResourceLimit { frames: usize },
}

impl SolveError {
    /// True for the errors that stop a run that could otherwise go on
    /// (deadline and memory guard), as opposed to malformed input.
    pub fn is_resource(&self) -> bool {
        matches!(self, SolveError::WallClock | SolveError::ResourceLimit { .. })
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub occurs_check: bool,
    /// Record a trace for every solution.
    pub trace: bool,
    pub deadline: Option<Instant>,
    /// Upper bound on pending tasks plus choicepoints.
    pub max_frames: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { occurs_check: true, trace: false, deadline: None, max_frames: None }
    }
}

/// A distinguished clause to backchain on, with the atom it must prove.
#[derive(Clone, Debug)]
pub struct BackchainState {
    pub distinguished: Clause,
    pub program: Program,
    pub goal_atom: Term,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    /// Bindings for the query's free variables.
    pub answer: Substitution,
    /// Rule applications in the derivation.
    pub length: ProofLength,
    pub trace: Option<Trace>,
}

/// Lazily produced answers; each `next` searches only as far as needed.
pub struct Solutions {
    machine: Machine,
}

impl Solutions {
    /// Whether any branch explored so far was cut by the budget.
    pub fn bound_cut(&self) -> bool {
        self.machine.was_cut()
    }
}

impl Iterator for Solutions {
    type Item = Result<Solution, SolveError>;

    fn next(&mut self) -> Option<Self::Item> {
        let raw = self.machine.next_solution()?;
        Some(raw.map(|r| Solution { answer: r.answer, length: ProofLength(r.length), trace: r.trace }))
    }
}

/// Proof search configuration: builtins, a link resolver for hyperlinks met
/// during search, and per-run options.
#[derive(Clone)]
pub struct Engine {
    builtins: Arc<BuiltinTable>,
    resolver: Option<Arc<dyn LinkResolver>>,
    options: SolveOptions,
}

impl Default for Engine {
    fn default() -> Self {
        Engine { builtins: Arc::new(BuiltinTable::default()), resolver: None, options: SolveOptions::default() }
    }
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builtins(mut self, builtins: Arc<BuiltinTable>) -> Self {
        self.builtins = builtins;
        self
    }

    pub fn with_resolver(mut self, resolver: Arc<dyn LinkResolver>) -> Self {
        self.resolver = Some(resolver);
        self
    }

    pub fn with_options(mut self, options: SolveOptions) -> Self {
        self.options = options;
        self
    }

    pub fn options(&self) -> &SolveOptions {
        &self.options
    }

    pub fn builtins(&self) -> &BuiltinTable {
        &self.builtins
    }

    fn config(&self) -> Config {
        Config {
            builtins: self.builtins.clone(),
            resolver: self.resolver.clone(),
            occurs_check: self.options.occurs_check,
            trace: self.options.trace,
            deadline: self.options.deadline,
            max_frames: self.options.max_frames,
        }
    }

    /// Unbounded search for `g` against `p`.
    pub fn solve(&self, p: &Program, g: &Goal) -> Solutions {
        Solutions { machine: Machine::new(self.config(), Start::Goal(g.clone(), p.clone()), None) }
    }

    /// Unbounded backchaining on a distinguished clause.
    pub fn backchain(&self, bs: &BackchainState) -> Solutions {
        let start = Start::Backchain(bs.distinguished.clone(), bs.goal_atom.clone(), bs.program.clone());
        Solutions { machine: Machine::new(self.config(), start, None) }
    }

    /// Every derivation of `g` using at most `m` steps, in depth-first order.
    pub fn pv_bounded(&self, p: &Program, g: &Goal, m: impl Into<Budget>) -> Solutions {
        let m = m.into();
        Solutions { machine: Machine::new(self.config(), Start::Goal(g.clone(), p.clone()), Some(m.0)) }
    }
}

/// The front-most definition of `name`, as a body of kind `want`.
///
/// A definition of the other kind is converted when it has the shape of both
/// kinds (atoms, macro references and conjunctions of these); a goal read as
/// a clause is universally closed. Other shapes are ill-tagged.
pub fn lookup_macro(macros: &PList<MacroDef>, name: &str, want: MacroKind) -> Result<MacroBody, SolveError> {
    let def = macros.iter().find(|d| &*d.name == name).ok_or_else(|| SolveError::MacroNotFound(name.to_string()))?;
    let ill = || SolveError::IllTaggedMacro { name: name.to_string(), want };
    match (&def.body, want) {
        (MacroBody::Goal(_), MacroKind::Goal) | (MacroBody::Clause(_), MacroKind::Clause) => Ok(def.body.clone()),
        (MacroBody::Goal(g), MacroKind::Clause) => {
            goal_as_clause(g).map(|c| MacroBody::Clause(Arc::new(c.close()))).ok_or_else(ill)
        }
        (MacroBody::Clause(c), MacroKind::Goal) => clause_as_goal(c).map(|g| MacroBody::Goal(Arc::new(g))).ok_or_else(ill),
    }
}

fn goal_as_clause(g: &Goal) -> Option<Clause> {
    match g {
        Goal::Atom(t) => Some(Clause::Fact(t.clone())),
        Goal::MacroRef(n) => Some(Clause::MacroRef(n.clone())),
        Goal::Conj(l, r) => Some(Clause::conj(goal_as_clause(l)?, goal_as_clause(r)?)),
        _ => None,
    }
}

fn clause_as_goal(c: &Clause) -> Option<Goal> {
    match c {
        Clause::Fact(t) => Some(Goal::Atom(t.clone())),
        Clause::MacroRef(n) => Some(Goal::MacroRef(n.clone())),
        Clause::Conj(l, r) => Some(Goal::conj(clause_as_goal(l)?, clause_as_goal(r)?)),
        _ => None,
    }
}

/// [`Engine::solve`] with default settings.
pub fn solve(p: &Program, g: &Goal) -> Solutions {
    Engine::default().solve(p, g)
}

/// [`Engine::backchain`] with default settings.
pub fn backchain(bs: &BackchainState) -> Solutions {
    Engine::default().backchain(bs)
}

/// [`Engine::exec`] with default settings.
pub fn exec(p: &Program, g: &Goal, m: impl Into<Budget>) -> Result<SolveOutcome, SolveError> {
    Engine::default().exec(p, g, m)
}

/// [`Engine::min_proof_length`] with default settings.
pub fn min_proof_length(p: &Program, g: &Goal, cap: u64) -> Result<Option<ProofLength>, SolveError> {
    Engine::default().min_proof_length(p, g, cap)
}

#[cfg(test)]
mod tests;
