//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use lwebb::syntax::Name;
use lwebb::{Clause, Goal, MacroDef, Program, Substitute, Substitution, Term, Var};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRng, TestRunner};

/// Deterministic sampler over proptest strategies.
pub struct Sampler {
    runner: TestRunner,
}

impl Sampler {
    pub fn new(seed: u8) -> Self {
        let rng = TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &[seed; 32]);
        Sampler { runner: TestRunner::new_with_rng(Config::default(), rng) }
    }

    pub fn sample<S: Strategy>(&mut self, s: &S) -> S::Value {
        s.new_tree(&mut self.runner).expect("strategy").current()
    }
}

pub fn fixtures() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

// ---------------------------------------------------------------------------
// Function-free Horn programs and the bottom-up fixpoint.

pub const PREDS: [&str; 3] = ["p", "q", "r"];
pub const CONSTS: [&str; 2] = ["a", "b"];
pub const VARS: [&str; 2] = ["X", "Y"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Arg {
    Const(usize),
    Var(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HAtom {
    pub pred: usize,
    pub args: Vec<Arg>,
}

#[derive(Clone, Debug)]
pub struct HClause {
    pub head: HAtom,
    pub body: Vec<HAtom>,
}

#[derive(Clone, Debug)]
pub struct Horn {
    pub arity: [usize; 3],
    pub consts: usize,
    pub clauses: Vec<HClause>,
}

/// A ground atom: predicate index and constant indices.
pub type Ground = (usize, Vec<usize>);

fn arb_atom(arity: [usize; 3], consts: usize) -> impl Strategy<Value = HAtom> {
    let arg = prop_oneof![(0..consts).prop_map(Arg::Const), (0..VARS.len()).prop_map(Arg::Var)];
    (0..PREDS.len()).prop_flat_map(move |pred| {
        prop::collection::vec(arg.clone(), arity[pred]).prop_map(move |args| HAtom { pred, args })
    })
}

/// At most `max_clauses` clauses, at most two constants, predicates of arity
/// at most two, bodies of at most two atoms.
pub fn arb_horn(max_clauses: usize) -> impl Strategy<Value = Horn> {
    ([0..=2usize, 0..=2usize, 0..=2usize], 1..=CONSTS.len()).prop_flat_map(move |(arity, consts)| {
        let clause = (arb_atom(arity, consts), prop::collection::vec(arb_atom(arity, consts), 0..=2))
            .prop_map(|(head, body)| HClause { head, body });
        prop::collection::vec(clause, 1..=max_clauses).prop_map(move |clauses| Horn { arity, consts, clauses })
    })
}

impl Horn {
    pub fn atom_text(&self, a: &HAtom) -> String {
        let args: Vec<&str> = a
            .args
            .iter()
            .map(|x| match x {
                Arg::Const(c) => CONSTS[*c],
                Arg::Var(v) => VARS[*v],
            })
            .collect();
        if args.is_empty() {
            PREDS[a.pred].to_string()
        } else {
            format!("{}({})", PREDS[a.pred], args.join(","))
        }
    }

    pub fn clause_text(&self, c: &HClause) -> String {
        let head = self.atom_text(&c.head);
        if c.body.is_empty() {
            head
        } else {
            let body: Vec<String> = c.body.iter().map(|a| self.atom_text(a)).collect();
            format!("{head} :- {}", body.join(", "))
        }
    }

    pub fn text(&self) -> String {
        self.clauses.iter().map(|c| format!("{}.\n", self.clause_text(c))).collect()
    }

    pub fn program(&self) -> Program {
        Program::new(self.clauses.iter().map(|c| lwebb::parse_clause(&self.clause_text(c)).unwrap()), [])
    }

    pub fn ground_text(&self, g: &Ground) -> String {
        let args: Vec<Arg> = g.1.iter().map(|c| Arg::Const(*c)).collect();
        self.atom_text(&HAtom { pred: g.0, args })
    }

    /// Every ground atom over the program's signature.
    pub fn herbrand_base(&self) -> Vec<Ground> {
        let mut out = Vec::new();
        for (pred, &n) in self.arity.iter().enumerate() {
            for tuple in tuples(self.consts, n) {
                out.push((pred, tuple));
            }
        }
        out
    }

    /// Least model by naive bottom-up iteration over all ground instances.
    pub fn fixpoint(&self) -> BTreeSet<Ground> {
        let mut model = BTreeSet::new();
        loop {
            let mut grew = false;
            for c in &self.clauses {
                for env in tuples(self.consts, VARS.len()) {
                    let inst = |a: &HAtom| -> Ground {
                        let args = a
                            .args
                            .iter()
                            .map(|x| match *x {
                                Arg::Const(k) => k,
                                Arg::Var(v) => env[v],
                            })
                            .collect();
                        (a.pred, args)
                    };
                    if c.body.iter().all(|b| model.contains(&inst(b))) && model.insert(inst(&c.head)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                return model;
            }
        }
    }
}

fn tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| (0..k).map(move |c| [t.clone(), vec![c]].concat())).collect();
    }
    out
}

// ---------------------------------------------------------------------------
// Goals over a Horn signature, for budget properties.

fn arb_goal_atom(arity: [usize; 3]) -> impl Strategy<Value = String> + Clone {
    let arg = prop::sample::select(vec!["a", "b", "X", "Y", "Z"]);
    (0..PREDS.len()).prop_flat_map(move |pred| {
        prop::collection::vec(arg.clone(), arity[pred]).prop_map(move |args| {
            if args.is_empty() {
                PREDS[pred].to_string()
            } else {
                format!("{}({})", PREDS[pred], args.join(","))
            }
        })
    })
}

/// Goal text mixing conjunction, existentials and embedded implications.
pub fn arb_goal_text(arity: [usize; 3]) -> BoxedStrategy<String> {
    let leaf = arb_goal_atom(arity);
    leaf
        .prop_recursive(3, 10, 2, move |inner| {
            let atom = arb_goal_atom(arity);
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("({l}, {r})")),
                inner.clone().prop_map(|g| format!("(exists Z. {g})")),
                (atom.clone(), inner.clone()).prop_map(|(d, g)| format!("({d} => {g})")),
                (atom.clone(), atom, inner).prop_map(|(h, b, g)| format!("({{ {h} :- {b}. }} => {g})")),
            ]
        })
        .boxed()
}

// ---------------------------------------------------------------------------
// Unification: terms over f/2, g/1, a, b and the variables X, Y, Z.

pub fn uvars() -> Vec<Var> {
    ["X", "Y", "Z"].iter().map(|v| Var::named(*v)).collect()
}

pub fn arb_uterm() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        2 => prop::sample::select(vec!["X", "Y", "Z"]).prop_map(Term::var),
        1 => prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("g", vec![t])),
            (inner.clone(), inner).prop_map(|(l, r)| Term::app("f", vec![l, r])),
        ]
    })
}

/// Pairs biased towards unifiable ones: the second term is sometimes an
/// instance of the first, and sometimes a variable of the first.
pub fn arb_upair() -> impl Strategy<Value = (Term, Term)> {
    prop_oneof![
        (arb_uterm(), arb_uterm()),
        (arb_uterm(), prop::collection::vec(arb_uterm(), 3)).prop_map(|(t, sub)| {
            let s = Substitution::from_bindings(uvars().into_iter().zip(sub).filter(|(v, t)| !t.occurs(v)));
            let inst = t.apply(&s);
            (t, inst)
        }),
        (prop::sample::select(vec!["X", "Y", "Z"]), arb_uterm()).prop_map(|(v, t)| (Term::var(v), t)),
    ]
}

/// All ground terms of depth at most one.
pub fn ground_universe() -> Vec<Term> {
    let base = [Term::constant("a"), Term::constant("b")];
    let mut out = base.to_vec();
    for x in &base {
        out.push(Term::app("g", vec![x.clone()]));
    }
    for x in &base {
        for y in &base {
            out.push(Term::app("f", vec![x.clone(), y.clone()]));
        }
    }
    out
}

/// Every assignment of `universe` terms to X, Y, Z that makes `t1` and `t2`
/// syntactically equal.
pub fn ground_unifiers(t1: &Term, t2: &Term, universe: &[Term]) -> Vec<Substitution> {
    let vars = uvars();
    let mut out = Vec::new();
    for x in universe {
        for y in universe {
            for z in universe {
                let theta = Substitution::from_bindings(
                    vars.iter().cloned().zip([x.clone(), y.clone(), z.clone()]),
                );
                if t1.apply(&theta) == t2.apply(&theta) {
                    out.push(theta);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Arbitrary ASTs for parser round trips.

fn arb_var() -> impl Strategy<Value = Var> {
    prop::sample::select(vec!["X", "Y", "Z", "L"]).prop_map(Var::named)
}

pub fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        arb_var().prop_map(Term::Var),
        prop::sample::select(vec!["a", "b", "tokyo", "exists"]).prop_map(Term::constant),
        (-3i64..20).prop_map(Term::int),
        Just(Term::nil()),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (prop::sample::select(vec!["f", "g", "edge"]), prop::collection::vec(inner.clone(), 1..3))
                .prop_map(|(f, args)| Term::app(f, args)),
            (inner.clone(), inner).prop_map(|(h, t)| Term::cons(h, t)),
        ]
    })
}

fn arb_ast_atom() -> impl Strategy<Value = Term> {
    (prop::sample::select(vec!["p", "q", "memb", "forall"]), prop::collection::vec(arb_term(), 0..3))
        .prop_map(|(f, args)| Term::app(f, args))
}

fn arb_macro_name() -> impl Strategy<Value = Name> {
    prop::sample::select(vec!["m", "lists", "arcs"]).prop_map(Name::from)
}

pub fn arb_goal() -> BoxedStrategy<Goal> {
    let leaf = prop_oneof![arb_ast_atom().prop_map(Goal::Atom), arb_macro_name().prop_map(Goal::MacroRef)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Goal::conj(l, r)),
            (arb_var(), inner.clone()).prop_map(|(v, g)| Goal::exists(v, g)),
            (arb_inner_clause(), inner.clone()).prop_map(|(c, g)| Goal::implies(c, g)),
            (prop::sample::select(vec!["www.d.com/lists", "./x/y.lw"]), inner)
                .prop_map(|(o, g)| Goal::Link { origin: o.into(), body: g.into() }),
        ]
    })
    .boxed()
}

pub fn arb_inner_clause() -> BoxedStrategy<Clause> {
    let leaf = prop_oneof![
        arb_ast_atom().prop_map(Clause::Fact),
        arb_macro_name().prop_map(Clause::MacroRef),
        (arb_ast_atom(), arb_ast_atom()).prop_map(|(h, b)| Clause::rule(h, Goal::Atom(b))),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (arb_var(), inner.clone()).prop_map(|(v, c)| Clause::forall(v, c)),
            (inner.clone(), inner).prop_map(|(l, r)| Clause::conj(l, r)),
        ]
    })
    .boxed()
}

pub fn arb_macro_def() -> impl Strategy<Value = MacroDef> {
    prop_oneof![
        (arb_macro_name(), arb_goal()).prop_map(|(n, g)| MacroDef::goal(&n, g)),
        (arb_macro_name(), prop::collection::vec(arb_inner_clause(), 1..4)).prop_map(|(n, cs)| {
            let mut closed: Vec<Clause> = cs.into_iter().map(Clause::close).collect();
            let mut acc = closed.pop().unwrap();
            while let Some(c) = closed.pop() {
                acc = Clause::conj(c, acc);
            }
            MacroDef::clause(&n, acc)
        }),
    ]
}

pub fn arc<T>(t: T) -> Arc<T> {
    Arc::new(t)
}
