//! Explicit-stack proof search shared by the bounded and unbounded procedures.
//!
//! Search state is a continuation (persistent list of pending tasks), a stack
//! of choicepoints and a trail-backed binding store. Nothing recurses on the
//! native stack except term traversal.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::rc::Rc;
use std::sync::Arc;
use std::time::Instant;

use rustc_hash::FxHashMap;
use xxhash_rust::xxh3::xxh3_128;

use super::trace::{Rule, Trace, TraceEvent};
use super::{lookup_macro, SolveError};
use crate::builtins::{BuiltinTable, TermEnv};
use crate::loader::{desugar_link, LinkResolver};
use crate::syntax::{
    render_clause, render_goal, render_term, Clause, Constant, Goal, MacroBody, MacroDef, MacroKind, PList, Program,
    Term, Var,
};
use crate::unify::{FreshSource, Substitute, Substitution};

/// How often (in loop iterations) the deadline and frame limit are checked.
const GUARD_INTERVAL: u64 = 4096;

#[derive(Clone)]
pub(crate) struct Config {
    pub builtins: Arc<BuiltinTable>,
    pub resolver: Option<Arc<dyn LinkResolver>>,
    pub occurs_check: bool,
    pub trace: bool,
    pub deadline: Option<Instant>,
    pub max_frames: Option<usize>,
}

pub(crate) enum Start {
    Goal(Goal, Program),
    Backchain(Clause, Term, Program),
}

pub(crate) struct RawSolution {
    pub answer: Substitution,
    pub length: u64,
    pub trace: Option<Trace>,
}

// ---------------------------------------------------------------------------
// Bindings

#[derive(Default)]
struct Store {
    fresh: Vec<Option<Term>>,
    named: FxHashMap<Var, Term>,
    trail: Vec<Var>,
}

impl Store {
    fn lookup(&self, v: &Var) -> Option<&Term> {
        if v.is_fresh() {
            self.fresh.get(v.id() as usize).and_then(Option::as_ref)
        } else {
            self.named.get(v)
        }
    }

    fn bind(&mut self, v: Var, t: Term) {
        if v.is_fresh() {
            let i = v.id() as usize;
            if self.fresh.len() <= i {
                self.fresh.resize(i + 1, None);
            }
            self.fresh[i] = Some(t);
        } else {
            self.named.insert(v.clone(), t);
        }
        self.trail.push(v);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            if v.is_fresh() {
                self.fresh[v.id() as usize] = None;
            } else {
                self.named.remove(&v);
            }
        }
    }

    fn deref<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.lookup(v) {
                Some(b) => t = b,
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: &Var, t: &Term) -> bool {
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            match self.deref(t) {
                Term::Var(w) => {
                    if w == v {
                        return true;
                    }
                }
                Term::Const(_) => {}
                Term::Compound(_, args) => stack.extend(args.iter()),
            }
        }
        false
    }

    /// Unifies under the current bindings. On `Ok(false)` the caller undoes
    /// the trail. `Err` means the deadline passed (only reachable on cyclic
    /// terms without the occurs check).
    fn unify(&mut self, a: &Term, b: &Term, occurs_check: bool, deadline: Option<Instant>) -> Result<bool, ()> {
        let mut work = vec![(a.clone(), b.clone())];
        let mut iters: u64 = 0;
        while let Some((x, y)) = work.pop() {
            iters += 1;
            if iters % (GUARD_INTERVAL * 16) == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(());
            }
            let x = self.deref(&x).clone();
            let y = self.deref(&y).clone();
            match (&x, &y) {
                (Term::Var(v), Term::Var(w)) if v == w => {}
                (Term::Var(v), t) | (t, Term::Var(v)) => {
                    if occurs_check && self.occurs(v, t) {
                        return Ok(false);
                    }
                    self.bind(v.clone(), t.clone());
                }
                (Term::Const(c1), Term::Const(c2)) => {
                    if c1 != c2 {
                        return Ok(false);
                    }
                }
                (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return Ok(false);
                    }
                    if !Arc::ptr_eq(xs, ys) {
                        work.extend(xs.iter().cloned().zip(ys.iter().cloned()).rev());
                    }
                }
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Fully applies the bindings. A variable met again while resolving its
    /// own binding (a cyclic term) is left as is.
    fn resolve(&self, t: &Term) -> Term {
        self.resolve_in(t, &mut Vec::new())
    }

    fn resolve_in(&self, t: &Term, visiting: &mut Vec<Var>) -> Term {
        match t {
            Term::Var(v) => {
                if visiting.contains(v) {
                    return t.clone();
                }
                match self.lookup(v) {
                    Some(b) => {
                        visiting.push(v.clone());
                        let r = self.resolve_in(b, visiting);
                        visiting.pop();
                        r
                    }
                    None => t.clone(),
                }
            }
            Term::Const(_) => t.clone(),
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| self.resolve_in(a, visiting)).collect()),
        }
    }

    /// A substitution covering `vars`, for rendering goals and clauses.
    fn view(&self, vars: &[Var]) -> Substitution {
        Substitution::from_bindings(vars.iter().map(|v| (v.clone(), self.resolve(&Term::Var(v.clone())))))
    }
}

struct StoreEnv<'a> {
    store: &'a mut Store,
    occurs_check: bool,
}

impl TermEnv for StoreEnv<'_> {
    fn resolve(&self, t: &Term) -> Term {
        self.store.resolve(t)
    }

    fn unify_terms(&mut self, a: &Term, b: &Term) -> bool {
        let mark = self.store.trail.len();
        let ok = self.store.unify(a, b, self.occurs_check, None).unwrap_or(false);
        if !ok {
            self.store.undo_to(mark);
        }
        ok
    }
}

// ---------------------------------------------------------------------------
// Continuations, trace lists, choicepoints

#[derive(Clone)]
enum Task {
    Goal { goal: Goal, prog: Program, depth: u32 },
    Backchain { clause: Clause, atom: Term, prog: Program, depth: u32 },
}

struct Frame {
    task: Task,
    len: usize,
    next: Cont,
}

#[derive(Clone, Default)]
struct Cont(Option<Rc<Frame>>);

impl Cont {
    fn push(&self, task: Task) -> Cont {
        Cont(Some(Rc::new(Frame { task, len: self.len() + 1, next: self.clone() })))
    }

    fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |f| f.len)
    }

    fn pop(&mut self) -> Option<Task> {
        let frame = self.0.take()?;
        let task = frame.task.clone();
        *self = frame.next.clone();
        Some(task)
    }

    fn iter(&self) -> impl Iterator<Item = &Task> {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let f = cur?;
            cur = f.next.0.as_deref();
            Some(&f.task)
        })
    }
}

impl Drop for Cont {
    fn drop(&mut self) {
        let mut cur = self.0.take();
        while let Some(rc) = cur {
            match Rc::try_unwrap(rc) {
                Ok(mut f) => cur = f.next.0.take(),
                Err(_) => break,
            }
        }
    }
}

struct EventNode {
    event: TraceEvent,
    prev: Events,
}

/// Trace of the current branch, newest first.
#[derive(Clone, Default)]
struct Events(Option<Rc<EventNode>>);

impl Events {
    fn push(&self, event: TraceEvent) -> Events {
        Events(Some(Rc::new(EventNode { event, prev: self.clone() })))
    }

    fn to_vec(&self) -> Vec<TraceEvent> {
        let mut out = Vec::new();
        let mut cur = self.0.as_deref();
        while let Some(n) = cur {
            out.push(n.event.clone());
            cur = n.prev.0.as_deref();
        }
        out.reverse();
        out
    }
}

impl Drop for Events {
    fn drop(&mut self) {
        let mut cur = self.0.take();
        while let Some(rc) = cur {
            match Rc::try_unwrap(rc) {
                Ok(mut n) => cur = n.prev.0.take(),
                Err(_) => break,
            }
        }
    }
}

enum Alt {
    /// Remaining program clauses for a decide step.
    Clauses { rest: PList<Clause>, atom: Term, prog: Program, depth: u32 },
    /// Right conjunct of a distinguished clause conjunction.
    Right { clause: Arc<Clause>, atom: Term, prog: Program, depth: u32 },
}

enum Choice {
    Alt { alt: Alt, cont: Cont, mark: usize, used: u64, trace: Events },
    /// Entry of a memoizable state; popping it means the state's whole
    /// subtree has been explored.
    Marker { key: u128, budget: u64, successes: u64, cuts: u64 },
}

// ---------------------------------------------------------------------------
// Failure memo

#[derive(Default, Clone, Copy)]
struct FailInfo {
    /// Smallest budget at which the state failed without any cut.
    clean_min: Option<u64>,
    /// Largest budget at which the state failed with a cut.
    cut_max: Option<u64>,
}

/// Bounded-mode record of states whose subtree held no success.
///
/// A state that failed cleanly at budget `r` fails identically at any larger
/// budget; one that failed with a cut at `r` also fails with a cut at any
/// smaller budget. Both facts follow from the budget only ever pruning.
#[derive(Default)]
struct FailMemo {
    map: FxHashMap<u128, FailInfo>,
    /// Open variables per clause-list node. Holding the list keeps the node
    /// address from being reused while it is part of a key.
    open: FxHashMap<usize, (PList<Clause>, Rc<[Var]>)>,
    macros: FxHashMap<usize, PList<MacroDef>>,
}

impl FailMemo {
    /// `Some(cut)` if a state with remaining budget `r` is known to fail.
    fn lookup(&self, key: u128, r: u64) -> Option<bool> {
        let info = self.map.get(&key)?;
        if info.clean_min.is_some_and(|m| m <= r) {
            Some(false)
        } else if info.cut_max.is_some_and(|m| m >= r) {
            Some(true)
        } else {
            None
        }
    }

    fn record(&mut self, key: u128, r: u64, cut: bool) {
        let info = self.map.entry(key).or_default();
        if cut {
            info.cut_max = Some(info.cut_max.map_or(r, |m| m.max(r)));
        } else {
            info.clean_min = Some(info.clean_min.map_or(r, |m| m.min(r)));
        }
    }

    fn open_vars(&mut self, clauses: &PList<Clause>) -> Rc<[Var]> {
        let mut pending = Vec::new();
        let mut cur = clauses.clone();
        let mut base: Rc<[Var]> = Rc::from(Vec::new());
        loop {
            let id = cur.ptr_id();
            if id == 0 {
                break;
            }
            if let Some((_, vs)) = self.open.get(&id) {
                base = vs.clone();
                break;
            }
            let next = cur.rest().cloned().unwrap_or_default();
            pending.push(cur);
            cur = next;
        }
        for node in pending.into_iter().rev() {
            let fv = node.first().unwrap().free_vars();
            if !fv.is_empty() {
                let mut vs: Vec<Var> = base.to_vec();
                for v in fv {
                    if !vs.contains(&v) {
                        vs.push(v);
                    }
                }
                base = Rc::from(vs);
            }
            self.open.insert(node.ptr_id(), (node, base.clone()));
        }
        base
    }

    fn keep_macros(&mut self, macros: &PList<MacroDef>) -> usize {
        let id = macros.ptr_id();
        if id != 0 {
            self.macros.entry(id).or_insert_with(|| macros.clone());
        }
        id
    }
}

/// Serializes `Hash` input into a byte buffer.
#[derive(Default)]
struct ByteSink(Vec<u8>);

impl Hasher for ByteSink {
    fn write(&mut self, bytes: &[u8]) {
        self.0.extend_from_slice(bytes);
    }

    fn finish(&self) -> u64 {
        unreachable!("digested with xxh3_128")
    }
}

/// 128-bit fingerprint of a search state, with variables numbered by first
/// occurrence so that renamed-apart copies of a state collide.
struct KeyBuilder<'a> {
    store: &'a Store,
    sink: ByteSink,
    fresh: FxHashMap<u64, u32>,
    named: Vec<(Var, u32)>,
    binders: Vec<Var>,
    /// Clause list, macro list and open variables of the last program seen.
    last_prog: Option<(usize, usize, Rc<[Var]>)>,
}

impl<'a> KeyBuilder<'a> {
    fn new(store: &'a Store) -> Self {
        KeyBuilder {
            store,
            sink: ByteSink(Vec::with_capacity(512)),
            fresh: FxHashMap::default(),
            named: Vec::new(),
            binders: Vec::new(),
            last_prog: None,
        }
    }

    fn put<T: Hash + ?Sized>(&mut self, x: &T) {
        x.hash(&mut self.sink);
    }

    fn finish(self) -> u128 {
        xxh3_128(&self.sink.0)
    }

    fn var(&mut self, v: &Var) {
        let n = (self.fresh.len() + self.named.len()) as u32;
        let id = if v.is_fresh() {
            *self.fresh.entry(v.id()).or_insert(n)
        } else if let Some((_, i)) = self.named.iter().find(|(w, _)| w == v) {
            *i
        } else {
            self.named.push((v.clone(), n));
            n
        };
        self.put(&(b'v', id));
    }

    fn term(&mut self, t: &Term) {
        match t {
            Term::Var(v) => {
                if let Some(i) = self.binders.iter().rposition(|b| b == v) {
                    self.put(&(b'b', i));
                    return;
                }
                let store = self.store;
                match store.deref(t) {
                    Term::Var(w) => self.var(w),
                    d => self.term(d),
                }
            }
            Term::Const(Constant::Name(n)) => self.put(&(b'c', &**n)),
            Term::Const(Constant::Int(i)) => self.put(&(b'i', *i)),
            Term::Compound(f, args) => {
                self.put(&(b'f', &**f, args.len()));
                for a in args.iter() {
                    self.term(a);
                }
            }
        }
    }

    fn goal(&mut self, g: &Goal) {
        match g {
            Goal::Atom(t) => {
                self.put(&b'A');
                self.term(t);
            }
            Goal::MacroRef(n) => self.put(&(b'M', &**n)),
            Goal::Conj(l, r) => {
                self.put(&b'&');
                self.goal(l);
                self.goal(r);
            }
            Goal::ClauseImpl(c, g) => {
                self.put(&b'>');
                self.clause(c);
                self.goal(g);
            }
            Goal::LinkImpl(l) => {
                self.put(&(b'L', &*l.root));
                l.defs.hash(&mut self.sink);
                self.goal(&l.body);
            }
            Goal::Link { origin, body } => {
                self.put(&(b'U', &**origin));
                self.goal(body);
            }
            Goal::Exists(v, g) => {
                self.put(&b'E');
                self.binders.push(v.clone());
                self.goal(g);
                self.binders.pop();
            }
        }
    }

    fn clause(&mut self, c: &Clause) {
        match c {
            Clause::Fact(t) => {
                self.put(&b'F');
                self.term(t);
            }
            Clause::MacroRef(n) => self.put(&(b'm', &**n)),
            Clause::Rule(h, b) => {
                self.put(&b'R');
                self.term(h);
                self.goal(b);
            }
            Clause::Forall(v, c) => {
                self.put(&b'V');
                self.binders.push(v.clone());
                self.clause(c);
                self.binders.pop();
            }
            Clause::Conj(l, r) => {
                self.put(&b'^');
                self.clause(l);
                self.clause(r);
            }
        }
    }

    fn program(&mut self, p: &Program, memo: &mut FailMemo) {
        let (clauses, macros) = (p.clauses.ptr_id(), p.macros.ptr_id());
        let open = match &self.last_prog {
            Some((c, m, open)) if *c == clauses && *m == macros => open.clone(),
            _ => {
                let open = memo.open_vars(&p.clauses);
                memo.keep_macros(&p.macros);
                self.last_prog = Some((clauses, macros, open.clone()));
                open
            }
        };
        self.put(&(b'P', clauses, macros, open.len()));
        for v in open.iter() {
            self.term(&Term::Var(v.clone()));
        }
    }
}

// ---------------------------------------------------------------------------
// The machine

pub(crate) struct Machine {
    cfg: Config,
    bound: Option<u64>,
    used: u64,
    /// Sticky: some branch was cut by the budget.
    cut: bool,
    cuts: u64,
    successes: u64,
    store: Store,
    fresh: FreshSource,
    cont: Cont,
    choices: Vec<Choice>,
    trace: Events,
    query_vars: Vec<(Var, Var)>,
    memo: Option<FailMemo>,
    ticks: u64,
    started: bool,
    done: bool,
}

type Step = Result<bool, SolveError>;

impl Machine {
    pub(crate) fn new(cfg: Config, start: Start, bound: Option<u64>) -> Machine {
        // Cyclic bindings would make state fingerprints loop.
        let memo = (bound.is_some() && cfg.occurs_check).then(FailMemo::default);
        let mut m = Machine {
            cfg,
            bound,
            used: 0,
            cut: false,
            cuts: 0,
            successes: 0,
            store: Store::default(),
            fresh: FreshSource::new(),
            cont: Cont::default(),
            choices: Vec::new(),
            trace: Events::default(),
            query_vars: Vec::new(),
            memo,
            ticks: 0,
            started: false,
            done: false,
        };
        let task = match start {
            Start::Goal(goal, prog) => {
                let s = m.rename_free(&goal.free_vars());
                Task::Goal { goal: goal.apply(&s), prog, depth: 0 }
            }
            Start::Backchain(clause, atom, prog) => {
                let s = m.rename_free(&atom.vars());
                Task::Backchain { clause, atom: atom.apply(&s), prog, depth: 0 }
            }
        };
        m.cont = m.cont.push(task);
        m
    }

    /// Renames the query variables apart and remembers them for answers.
    fn rename_free(&mut self, vars: &[Var]) -> Substitution {
        let mut pairs = Vec::new();
        for v in vars {
            let f = self.fresh.mint(v);
            self.query_vars.push((v.clone(), f.clone()));
            pairs.push((v.clone(), Term::Var(f)));
        }
        Substitution::from_bindings(pairs)
    }

    pub(crate) fn was_cut(&self) -> bool {
        self.cut
    }

    pub(crate) fn next_solution(&mut self) -> Option<Result<RawSolution, SolveError>> {
        if self.done {
            return None;
        }
        if self.started {
            if !self.backtrack() {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        loop {
            if let Err(e) = self.guard() {
                self.done = true;
                return Some(Err(e));
            }
            let Some(task) = self.cont.pop() else {
                self.successes += 1;
                return Some(Ok(self.solution()));
            };
            let r = match task {
                Task::Goal { goal, prog, depth } => self.reduce(goal, prog, depth),
                Task::Backchain { clause, atom, prog, depth } => self.backchain(clause, atom, prog, depth),
            };
            match r {
                Ok(true) => {}
                Ok(false) => {
                    if !self.backtrack() {
                        self.done = true;
                        return None;
                    }
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
    }

    fn guard(&mut self) -> Result<(), SolveError> {
        self.ticks += 1;
        if self.ticks % GUARD_INTERVAL != 0 {
            return Ok(());
        }
        if let Some(d) = self.cfg.deadline {
            if Instant::now() >= d {
                return Err(SolveError::WallClock);
            }
        }
        if let Some(max) = self.cfg.max_frames {
            let frames = self.cont.len() + self.choices.len();
            if frames > max {
                return Err(SolveError::ResourceLimit { frames });
            }
        }
        Ok(())
    }

    fn solution(&self) -> RawSolution {
        let back = Substitution::from_bindings(
            self.query_vars.iter().map(|(orig, f)| (f.clone(), Term::Var(orig.clone()))),
        );
        let pairs: Vec<(Var, Term)> = self
            .query_vars
            .iter()
            .map(|(orig, f)| (orig.clone(), self.store.resolve(&Term::Var(f.clone())).apply(&back)))
            .filter(|(orig, t)| *t != Term::Var(orig.clone()))
            .collect();
        RawSolution {
            answer: Substitution::from_bindings(pairs),
            length: self.used,
            trace: self.cfg.trace.then(|| Trace::from_preorder(self.trace.to_vec())),
        }
    }

    /// Checks that `k` more rule applications fit the budget; records a cut
    /// otherwise.
    fn room(&mut self, k: u64) -> bool {
        match self.bound {
            Some(b) if self.used + k > b => {
                self.cut = true;
                self.cuts += 1;
                false
            }
            _ => true,
        }
    }

    fn fire(&mut self, rule: Rule, depth: u32, describe: impl FnOnce(&Self) -> String) {
        if self.cfg.trace {
            let event = TraceEvent {
                rule,
                depth,
                goal: describe(self),
                m_before: self.bound.map(|b| b - self.used),
                n_after: 0,
            };
            self.trace = self.trace.push(event);
        }
        self.used += 1;
    }

    fn push(&mut self, task: Task) {
        self.cont = self.cont.push(task);
    }

    fn unify(&mut self, a: &Term, b: &Term) -> Result<bool, SolveError> {
        let mark = self.store.trail.len();
        match self.store.unify(a, b, self.cfg.occurs_check, self.cfg.deadline) {
            Ok(true) => Ok(true),
            Ok(false) => {
                self.store.undo_to(mark);
                Ok(false)
            }
            Err(()) => Err(SolveError::WallClock),
        }
    }

    fn backtrack(&mut self) -> bool {
        while let Some(ch) = self.choices.pop() {
            match ch {
                Choice::Marker { key, budget, successes, cuts } => {
                    if successes == self.successes {
                        if let Some(memo) = &mut self.memo {
                            memo.record(key, budget, cuts != self.cuts);
                        }
                    }
                }
                Choice::Alt { alt, cont, mark, used, trace } => {
                    self.store.undo_to(mark);
                    self.cont = cont;
                    self.used = used;
                    self.trace = trace;
                    match alt {
                        Alt::Clauses { rest, atom, prog, depth } => self.decide(rest, atom, prog, depth),
                        Alt::Right { clause, atom, prog, depth } => {
                            self.fire(Rule::ConjRight, depth, |m| m.describe_backchain(&atom, &clause));
                            self.push(Task::Backchain { clause: (*clause).clone(), atom, prog, depth: depth + 1 });
                        }
                    }
                    return true;
                }
            }
        }
        false
    }

    fn save(&mut self, alt: Alt) {
        self.choices.push(Choice::Alt {
            alt,
            cont: self.cont.clone(),
            mark: self.store.trail.len(),
            used: self.used,
            trace: self.trace.clone(),
        });
    }

    /// Picks the first clause of the non-empty `clauses` and leaves the rest
    /// as a choicepoint.
    fn decide(&mut self, clauses: PList<Clause>, atom: Term, prog: Program, depth: u32) {
        let first = clauses.first().expect("decide over an empty program").clone();
        if let Some(rest) = clauses.rest().filter(|r| !r.is_empty()) {
            self.save(Alt::Clauses { rest: rest.clone(), atom: atom.clone(), prog: prog.clone(), depth });
        }
        self.fire(Rule::Decide, depth, |m| render_term(&m.store.resolve(&atom)));
        self.push(Task::Backchain { clause: first, atom, prog, depth: depth + 1 });
    }

    // ---- goal reduction ----

    fn reduce(&mut self, goal: Goal, prog: Program, depth: u32) -> Step {
        match goal {
            Goal::Atom(a) => self.solve_atom(a, prog, depth),
            Goal::MacroRef(name) => {
                if !self.room(1) {
                    return Ok(false);
                }
                let MacroBody::Goal(body) = lookup_macro(&prog.macros, &name, MacroKind::Goal)? else {
                    unreachable!()
                };
                let fv = body.free_vars();
                let body = if fv.is_empty() {
                    (*body).clone()
                } else {
                    let s = Substitution::from_bindings(fv.iter().map(|v| (v.clone(), Term::Var(self.fresh.mint(v)))));
                    body.apply(&s)
                };
                self.fire(Rule::MacroGoal, depth, |_| format!("/{name}"));
                self.push(Task::Goal { goal: body, prog, depth: depth + 1 });
                Ok(true)
            }
            Goal::Conj(l, r) => {
                if !self.room(1) {
                    return Ok(false);
                }
                self.fire(Rule::ConjGoal, depth, |m| m.describe_goal(&Goal::Conj(l.clone(), r.clone())));
                self.push(Task::Goal { goal: (*r).clone(), prog: prog.clone(), depth: depth + 1 });
                self.push(Task::Goal { goal: (*l).clone(), prog, depth: depth + 1 });
                Ok(true)
            }
            Goal::ClauseImpl(c, g) => {
                if !self.room(1) {
                    return Ok(false);
                }
                self.cfg.builtins.check_clause(&c)?;
                self.fire(Rule::ClauseImpl, depth, |m| m.describe_goal(&Goal::ClauseImpl(c.clone(), g.clone())));
                let inner = prog.with_clause((*c).clone());
                self.push(Task::Goal { goal: (*g).clone(), prog: inner, depth: depth + 1 });
                Ok(true)
            }
            Goal::LinkImpl(l) => {
                if !self.room(1) {
                    return Ok(false);
                }
                self.fire(Rule::LinkImpl, depth, |m| {
                    format!("/{} : {{..}} => {}", l.root, m.describe_goal(&l.body))
                });
                let inner = prog.with_clause(Clause::MacroRef(l.root.clone())).with_macros(&l.defs);
                self.push(Task::Goal { goal: (*l.body).clone(), prog: inner, depth: depth + 1 });
                Ok(true)
            }
            Goal::Link { origin, body } => {
                let resolver = self.cfg.resolver.clone().ok_or_else(|| SolveError::UnresolvedLink(origin.to_string()))?;
                let page = resolver.resolve_link(&origin)?;
                self.reduce(desugar_link(&page, (*body).clone()), prog, depth)
            }
            Goal::Exists(v, g) => {
                if !self.room(1) {
                    return Ok(false);
                }
                let f = self.fresh.mint(&v);
                let body = g.apply(&Substitution::from_bindings([(v.clone(), Term::Var(f))]));
                self.fire(Rule::Exists, depth, |m| m.describe_goal(&Goal::Exists(v.clone(), g.clone())));
                self.push(Task::Goal { goal: body, prog, depth: depth + 1 });
                Ok(true)
            }
        }
    }

    fn solve_atom(&mut self, atom: Term, prog: Program, depth: u32) -> Step {
        if self.store.deref(&atom).is_var() {
            return Err(SolveError::UnboundGoal(render_term(&self.store.resolve(&atom))));
        }
        if self.cfg.builtins.is_builtin(&atom) {
            if !self.room(1) {
                return Ok(false);
            }
            self.fire(Rule::Builtin, depth, |m| render_term(&m.store.resolve(&atom)));
            let mark = self.store.trail.len();
            let builtins = self.cfg.builtins.clone();
            let mut env = StoreEnv { store: &mut self.store, occurs_check: self.cfg.occurs_check };
            if builtins.call(&atom, &mut env)? {
                return Ok(true);
            }
            self.store.undo_to(mark);
            return Ok(false);
        }
        if prog.clauses.is_empty() {
            return Ok(false);
        }
        if !self.room(1) {
            return Ok(false);
        }
        if let Some(b) = self.bound {
            if self.memo.is_some() {
                let remaining = b - self.used;
                let key = self.state_key(&atom, &prog);
                let memo = self.memo.as_ref().unwrap();
                if let Some(cut) = memo.lookup(key, remaining) {
                    if cut {
                        self.cut = true;
                        self.cuts += 1;
                    }
                    return Ok(false);
                }
                self.choices.push(Choice::Marker { key, budget: remaining, successes: self.successes, cuts: self.cuts });
            }
        }
        self.decide(prog.clauses.clone(), atom, prog, depth);
        Ok(true)
    }

    fn state_key(&mut self, atom: &Term, prog: &Program) -> u128 {
        let memo = self.memo.as_mut().unwrap();
        let mut kb = KeyBuilder::new(&self.store);
        kb.program(prog, memo);
        kb.term(atom);
        for task in self.cont.iter() {
            match task {
                Task::Goal { goal, prog, .. } => {
                    kb.put(&b'G');
                    kb.program(prog, memo);
                    kb.goal(goal);
                }
                Task::Backchain { clause, atom, prog, .. } => {
                    kb.put(&b'B');
                    kb.program(prog, memo);
                    kb.clause(clause);
                    kb.term(atom);
                }
            }
        }
        kb.finish()
    }

    // ---- backchaining ----

    fn backchain(&mut self, clause: Clause, atom: Term, prog: Program, depth: u32) -> Step {
        match clause {
            Clause::Fact(h) => {
                if !self.unify(&h, &atom)? {
                    return Ok(false);
                }
                if !self.room(1) {
                    return Ok(false);
                }
                self.fire(Rule::Leaf, depth, |m| render_term(&m.store.resolve(&atom)));
                Ok(true)
            }
            Clause::Rule(h, body) => {
                if !self.unify(&h, &atom)? {
                    return Ok(false);
                }
                if !self.room(1) {
                    return Ok(false);
                }
                self.fire(Rule::Backchain, depth, |m| {
                    format!("{} :- {}", render_term(&m.store.resolve(&atom)), m.describe_goal(&body))
                });
                self.push(Task::Goal { goal: (*body).clone(), prog, depth: depth + 1 });
                Ok(true)
            }
            Clause::Forall(..) => {
                let mut binders = Vec::new();
                let mut cur = &clause;
                while let Clause::Forall(v, body) = cur {
                    binders.push(v.clone());
                    cur = body;
                }
                let k = binders.len() as u64;
                if !self.room(k) {
                    return Ok(false);
                }
                let pairs: Vec<(Var, Term)> = binders.iter().map(|v| (v.clone(), Term::Var(self.fresh.mint(v)))).collect();
                let mut map: HashMap<Var, Term> = HashMap::new();
                for (v, t) in pairs {
                    // Inner binders shadow outer ones of the same name.
                    map.insert(v, t);
                }
                let body = cur.apply(&Substitution::from_bindings(map));
                for (i, v) in binders.iter().enumerate() {
                    self.fire(Rule::Instantiate, depth + i as u32, |m| {
                        format!("forall {v}. .. for {}", render_term(&m.store.resolve(&atom)))
                    });
                }
                self.push(Task::Backchain { clause: body, atom, prog, depth: depth + k as u32 });
                Ok(true)
            }
            Clause::Conj(l, r) => {
                if !self.room(1) {
                    return Ok(false);
                }
                self.save(Alt::Right { clause: r, atom: atom.clone(), prog: prog.clone(), depth });
                self.fire(Rule::ConjLeft, depth, |m| m.describe_backchain(&atom, &l));
                self.push(Task::Backchain { clause: (*l).clone(), atom, prog, depth: depth + 1 });
                Ok(true)
            }
            Clause::MacroRef(name) => {
                if !self.room(1) {
                    return Ok(false);
                }
                let MacroBody::Clause(body) = lookup_macro(&prog.macros, &name, MacroKind::Clause)? else {
                    unreachable!()
                };
                self.fire(Rule::ClauseMacro, depth, |m| format!("{} via /{name}", render_term(&m.store.resolve(&atom))));
                self.push(Task::Backchain { clause: (*body).clone(), atom, prog, depth: depth + 1 });
                Ok(true)
            }
        }
    }

    // ---- trace snapshots ----

    fn describe_goal(&self, g: &Goal) -> String {
        render_goal(&g.apply(&self.store.view(&g.free_vars())))
    }

    fn describe_backchain(&self, atom: &Term, c: &Clause) -> String {
        let c = c.apply(&self.store.view(&c.free_vars()));
        format!("{} <- {}", render_term(&self.store.resolve(atom)), render_clause(&c))
    }
}
