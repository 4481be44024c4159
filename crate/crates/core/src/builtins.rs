//! Built-in predicates. Each call is a single proof step.

use std::collections::HashMap;

use crate::syntax::{Clause, Term};
use crate::unify::{unify, Substitute, Substitution};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BuiltinError {
    #[error("instantiation error: {name}/{arity} needs ground arguments, got {args}")]
    Instantiation { name: String, arity: usize, args: String },
    #[error("unknown builtin {0}/{1}")]
    Unknown(String, usize),
    #[error("builtin {0}/{1} cannot be defined by a clause")]
    Redefined(String, usize),
}

/// What a builtin sees of the current bindings.
pub trait TermEnv {
    /// The term with all bound variables replaced.
    fn resolve(&self, t: &Term) -> Term;
    /// Unifies, extending the bindings on success.
    fn unify_terms(&mut self, a: &Term, b: &Term) -> bool;
}

impl TermEnv for Substitution {
    fn resolve(&self, t: &Term) -> Term {
        t.apply(self)
    }

    fn unify_terms(&mut self, a: &Term, b: &Term) -> bool {
        match unify(a, b, self, true) {
            Some(s) => {
                *self = s;
                true
            }
            None => false,
        }
    }
}

pub type BuiltinFn = fn(&[Term], &mut dyn TermEnv) -> Result<bool, BuiltinError>;

pub struct BuiltinTable {
    table: HashMap<(String, usize), BuiltinFn>,
}

impl Default for BuiltinTable {
    fn default() -> Self {
        let mut table: HashMap<(String, usize), BuiltinFn> = HashMap::new();
        table.insert(("neq".into(), 2), neq);
        table.insert(("eq".into(), 2), eq);
        BuiltinTable { table }
    }
}

impl BuiltinTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// A table with no builtins at all.
    pub fn empty() -> Self {
        BuiltinTable { table: HashMap::new() }
    }

    pub fn get(&self, name: &str, arity: usize) -> Option<BuiltinFn> {
        self.table.get(&(name.to_string(), arity)).copied()
    }

    pub fn is_builtin(&self, atom: &Term) -> bool {
        match atom.predicate() {
            Some((n, a)) => self.table.contains_key(&(n.to_string(), a)),
            None => false,
        }
    }

    /// Rejects clauses whose heads would redefine a builtin.
    pub fn check_clause(&self, c: &Clause) -> Result<(), BuiltinError> {
        for h in c.heads() {
            if self.is_builtin(h) {
                let (n, a) = h.predicate().unwrap();
                return Err(BuiltinError::Redefined(n.to_string(), a));
            }
        }
        Ok(())
    }

    /// Runs a builtin over `env`.
    pub fn call(&self, atom: &Term, env: &mut dyn TermEnv) -> Result<bool, BuiltinError> {
        let (name, arity) = atom.predicate().expect("builtin call on a variable");
        let f = self.get(name, arity).ok_or_else(|| BuiltinError::Unknown(name.to_string(), arity))?;
        f(atom.args(), env)
    }
}

/// Ground syntactic disequality.
fn neq(args: &[Term], env: &mut dyn TermEnv) -> Result<bool, BuiltinError> {
    let a = env.resolve(&args[0]);
    let b = env.resolve(&args[1]);
    if !a.is_ground() || !b.is_ground() {
        return Err(BuiltinError::Instantiation {
            name: "neq".into(),
            arity: 2,
            args: format!("{a}, {b}"),
        });
    }
    Ok(a != b)
}

fn eq(args: &[Term], env: &mut dyn TermEnv) -> Result<bool, BuiltinError> {
    Ok(env.unify_terms(&args[0], &args[1]))
}

/// Evaluates `name(args)` under `s`: `Ok(Some(s'))` on success, `Ok(None)` on
/// failure.
pub fn eval_builtin(
    table: &BuiltinTable,
    name: &str,
    args: &[Term],
    s: &Substitution,
) -> Result<Option<Substitution>, BuiltinError> {
    let atom = Term::app(name, args.to_vec());
    let mut env = s.clone();
    if table.call(&atom, &mut env)? {
        Ok(Some(env))
    } else {
        Ok(None)
    }
}
