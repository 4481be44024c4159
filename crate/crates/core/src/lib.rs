//! LWeb^B: Horn clauses with embedded implications, macro modules, web-page
//! modules and length-bounded proof search.
//!
//! ```
//! use lwebb::{exec, parse_clause, parse_goal, Program, SolveOutcome};
//!
//! let p = Program::new([parse_clause("p :- q").unwrap(), parse_clause("q").unwrap()], []);
//! let out = exec(&p, &parse_goal("p").unwrap(), 10).unwrap();
//! assert_eq!(out.length().unwrap().0, 4);
//! assert_eq!(exec(&p, &parse_goal("p").unwrap(), 3).unwrap(), SolveOutcome::BoundExhausted);
//! ```

pub mod builtins;
pub mod cli;
pub mod engine;
pub mod loader;
pub mod syntax;
pub mod unify;

pub use builtins::{BuiltinError, BuiltinTable};
pub use engine::{
    backchain, exec, lookup_macro, min_proof_length, solve, BackchainState, Budget, Engine, ProofLength, Rule,
    Solution, Solutions, SolveError, SolveOptions, SolveOutcome, Trace, TraceEvent,
};
pub use loader::{LinkResolver, LoadError, Loader, ModulePage, ResolutionMap};
pub use syntax::{
    parse_clause, parse_goal, parse_macro_defs, parse_module_file, parse_program, parse_query, parse_term, Clause,
    Goal, MacroBody, MacroDef, MacroKind, ParseError, Program, Query, Term, Var,
};
pub use unify::{rename_apart, unify, FreshSource, Substitute, Substitution};
