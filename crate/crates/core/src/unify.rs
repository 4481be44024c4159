//! First-order unification, substitutions and standardization apart.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::syntax::{Clause, Goal, LinkImpl, Term, Var};

/// An idempotent substitution: no variable in the domain occurs in any
/// binding.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: HashMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    /// Binds `v` to `t` and composes eagerly so the result stays idempotent.
    /// Callers must ensure `v` does not occur in `t` after applying `self`.
    pub(crate) fn bind(&mut self, v: Var, t: Term) {
        let single = Substitution { map: HashMap::from([(v.clone(), t.clone())]) };
        for range in self.map.values_mut() {
            if range.occurs(&v) {
                *range = range.apply(&single);
            }
        }
        if Term::Var(v.clone()) != t {
            self.map.insert(v, t);
        }
    }

    /// Builds a substitution from bindings that are already in solved form.
    pub fn from_bindings(pairs: impl IntoIterator<Item = (Var, Term)>) -> Self {
        let mut s = Substitution::new();
        for (v, t) in pairs {
            let t = t.apply(&s);
            s.bind(v, t);
        }
        s
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut map: HashMap<Var, Term> =
            self.map.iter().map(|(v, t)| (v.clone(), t.apply(other))).collect();
        for (v, t) in &other.map {
            map.entry(v.clone()).or_insert_with(|| t.clone());
        }
        map.retain(|v, t| Term::Var(v.clone()) != *t);
        Substitution { map }
    }

    /// Restricts the domain to `vars`.
    pub fn restrict(&self, vars: &[Var]) -> Substitution {
        Substitution {
            map: self.map.iter().filter(|(v, _)| vars.contains(v)).map(|(v, t)| (v.clone(), t.clone())).collect(),
        }
    }

    fn range_mentions(&self, v: &Var) -> bool {
        self.map.values().any(|t| t.occurs(v))
    }

    fn without(&self, v: &Var) -> Substitution {
        let mut s = self.clone();
        s.map.remove(v);
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pairs: Vec<String> = self.map.iter().map(|(v, t)| format!("{v} = {t}")).collect();
        pairs.sort();
        write!(f, "{{{}}}", pairs.join(", "))
    }
}

/// Most general unifier of `t1` and `t2` extending `s`, or `None`.
///
/// With `occurs_check` off, a variable may be bound to a term containing it;
/// the result is then no longer idempotent.
pub fn unify(t1: &Term, t2: &Term, s: &Substitution, occurs_check: bool) -> Option<Substitution> {
    let mut out = s.clone();
    let mut work = vec![(t1.apply(s), t2.apply(s))];
    while let Some((a, b)) = work.pop() {
        let a = a.apply(&out);
        let b = b.apply(&out);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if occurs_check && t.occurs(&x) {
                    return None;
                }
                if t.occurs(&x) {
                    out.map.insert(x, t);
                } else {
                    out.bind(x, t);
                }
            }
            (Term::Const(c1), Term::Const(c2)) => {
                if c1 != c2 {
                    return None;
                }
            }
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                for (x, y) in xs.iter().zip(ys.iter()).rev() {
                    work.push((x.clone(), y.clone()));
                }
            }
            _ => return None,
        }
    }
    Some(out)
}

/// Applying a substitution. Quantified variables are shielded, and binders
/// are renamed when a binding would otherwise be captured.
pub trait Substitute: Sized {
    fn apply(&self, s: &Substitution) -> Self;
}

impl Substitute for Term {
    fn apply(&self, s: &Substitution) -> Term {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| a.apply(s)).collect()),
        }
    }
}

/// Handles a binder `v` over some body: returns the (possibly renamed) binder
/// and the substitution to apply to the body.
fn enter_binder(v: &Var, s: &Substitution, taken: impl Fn(&Var) -> bool) -> (Var, Substitution) {
    let inner = s.without(v);
    if !inner.range_mentions(v) {
        return (v.clone(), inner);
    }
    let mut k = 1;
    let renamed = loop {
        let cand = Var::named(format!("{}_{k}", v.name()));
        if !taken(&cand) && !inner.range_mentions(&cand) && inner.get(&cand).is_none() {
            break cand;
        }
        k += 1;
    };
    let mut inner = inner;
    inner.map.insert(v.clone(), Term::Var(renamed.clone()));
    (renamed, inner)
}

impl Substitute for Goal {
    fn apply(&self, s: &Substitution) -> Goal {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Goal::Atom(t) => Goal::Atom(t.apply(s)),
            Goal::MacroRef(_) => self.clone(),
            Goal::Conj(l, r) => Goal::conj(l.apply(s), r.apply(s)),
            Goal::ClauseImpl(c, g) => Goal::implies(c.apply(s), g.apply(s)),
            Goal::LinkImpl(l) => Goal::LinkImpl(LinkImpl {
                root: l.root.clone(),
                defs: l.defs.clone(),
                body: Arc::new(l.body.apply(s)),
            }),
            Goal::Link { origin, body } => Goal::Link { origin: origin.clone(), body: Arc::new(body.apply(s)) },
            Goal::Exists(v, body) => {
                let names: HashSet<Var> = all_goal_vars(body);
                let (v2, inner) = enter_binder(v, s, |c| names.contains(c));
                Goal::exists(v2, body.apply(&inner))
            }
        }
    }
}

impl Substitute for Clause {
    fn apply(&self, s: &Substitution) -> Clause {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Clause::Fact(t) => Clause::Fact(t.apply(s)),
            Clause::MacroRef(_) => self.clone(),
            Clause::Rule(h, b) => Clause::rule(h.apply(s), b.apply(s)),
            Clause::Forall(v, body) => {
                let names: HashSet<Var> = all_clause_vars(body);
                let (v2, inner) = enter_binder(v, s, |c| names.contains(c));
                Clause::forall(v2, body.apply(&inner))
            }
            Clause::Conj(l, r) => Clause::conj(l.apply(s), r.apply(s)),
        }
    }
}

fn all_goal_vars(g: &Goal) -> HashSet<Var> {
    let mut out = HashSet::new();
    visit_goal_vars(g, &mut |v| {
        out.insert(v.clone());
    });
    out
}

fn all_clause_vars(c: &Clause) -> HashSet<Var> {
    let mut out = HashSet::new();
    visit_clause_vars(c, &mut |v| {
        out.insert(v.clone());
    });
    out
}

fn visit_term_vars(t: &Term, f: &mut dyn FnMut(&Var)) {
    match t {
        Term::Var(v) => f(v),
        Term::Const(_) => {}
        Term::Compound(_, args) => args.iter().for_each(|a| visit_term_vars(a, f)),
    }
}

fn visit_goal_vars(g: &Goal, f: &mut dyn FnMut(&Var)) {
    match g {
        Goal::Atom(t) => visit_term_vars(t, f),
        Goal::MacroRef(_) => {}
        Goal::Conj(l, r) => {
            visit_goal_vars(l, f);
            visit_goal_vars(r, f);
        }
        Goal::ClauseImpl(c, g) => {
            visit_clause_vars(c, f);
            visit_goal_vars(g, f);
        }
        Goal::LinkImpl(l) => visit_goal_vars(&l.body, f),
        Goal::Link { body, .. } => visit_goal_vars(body, f),
        Goal::Exists(v, g) => {
            f(v);
            visit_goal_vars(g, f);
        }
    }
}

fn visit_clause_vars(c: &Clause, f: &mut dyn FnMut(&Var)) {
    match c {
        Clause::Fact(t) => visit_term_vars(t, f),
        Clause::MacroRef(_) => {}
        Clause::Rule(h, b) => {
            visit_term_vars(h, f);
            visit_goal_vars(b, f);
        }
        Clause::Forall(v, c) => {
            f(v);
            visit_clause_vars(c, f);
        }
        Clause::Conj(l, r) => {
            visit_clause_vars(l, f);
            visit_clause_vars(r, f);
        }
    }
}

/// Mints variables that never occur in parsed input.
#[derive(Debug)]
pub struct FreshSource {
    next: u64,
}

impl Default for FreshSource {
    fn default() -> Self {
        FreshSource { next: 1 }
    }
}

impl FreshSource {
    pub fn new() -> Self {
        Self::default()
    }

    /// A fresh variable displayed after `base`.
    pub fn mint(&mut self, base: &Var) -> Var {
        let id = self.next;
        self.next += 1;
        Var::with_id(Arc::from(base.name()), id)
    }

    /// Number of variables minted so far.
    pub fn minted(&self) -> u64 {
        self.next - 1
    }
}

/// Strips every leading universal binder, replacing each bound variable with
/// a fresh one.
pub fn rename_apart(c: &Clause, fs: &mut FreshSource) -> Clause {
    let mut binders = Vec::new();
    let mut cur = c;
    while let Clause::Forall(v, body) = cur {
        binders.push(v);
        cur = body;
    }
    if binders.is_empty() {
        return c.clone();
    }
    // An inner binder shadows an outer one with the same name.
    let mut map = HashMap::new();
    for v in binders {
        map.insert(v.clone(), Term::Var(fs.mint(v)));
    }
    cur.apply(&Substitution { map })
}
