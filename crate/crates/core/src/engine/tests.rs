use super::*;
use crate::syntax::{parse_clause, parse_goal, parse_macro_defs, parse_module_file, parse_term, Var};

fn prog(clauses: &[&str]) -> Program {
    Program::new(clauses.iter().map(|c| parse_clause(c).unwrap()), [])
}

fn goal(s: &str) -> Goal {
    parse_goal(s).unwrap()
}

fn length(out: &SolveOutcome) -> u64 {
    out.length().expect("expected success").0
}

fn fixture_defs(name: &str) -> Vec<MacroDef> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    parse_module_file(&std::fs::read_to_string(path).unwrap(), name).unwrap()
}

#[test]
fn step_goldens() {
    assert_eq!(length(&exec(&prog(&["p"]), &goal("p"), 10).unwrap()), 2);
    assert_eq!(length(&exec(&prog(&["p :- q", "q"]), &goal("p"), 10).unwrap()), 4);
    assert_eq!(length(&exec(&prog(&["p", "q"]), &goal("p, q"), 10).unwrap()), 5);
    let p = Program::new([parse_clause("p").unwrap()], parse_macro_defs("/g = p.").unwrap());
    assert_eq!(length(&exec(&p, &goal("/g"), 10).unwrap()), 3);
}

#[test]
fn budget_cuts() {
    assert_eq!(exec(&prog(&["p :- q", "q"]), &goal("p"), 3).unwrap(), SolveOutcome::BoundExhausted);
    assert_eq!(exec(&prog(&["p", "q"]), &goal("p, q"), 4).unwrap(), SolveOutcome::BoundExhausted);
    assert_eq!(exec(&prog(&["p"]), &goal("p"), 0).unwrap(), SolveOutcome::BoundExhausted);
    assert_eq!(exec(&prog(&["p"]), &goal("p, p, p"), 7).unwrap(), SolveOutcome::BoundExhausted);
    assert_eq!(length(&exec(&prog(&["p"]), &goal("p, p, p"), 8).unwrap()), 8);
}

#[test]
fn failure_is_not_exhaustion() {
    assert_eq!(exec(&prog(&["p"]), &goal("q"), 10).unwrap(), SolveOutcome::Failure);
    assert_eq!(exec(&Program::empty(), &goal("p"), 10).unwrap(), SolveOutcome::Failure);
}

#[test]
fn min_length_examples() {
    assert_eq!(min_proof_length(&prog(&["p"]), &goal("p"), 10).unwrap(), Some(ProofLength(2)));
    assert_eq!(min_proof_length(&Program::empty(), &goal("p"), 10).unwrap(), None);
    assert_eq!(min_proof_length(&prog(&["p :- q", "q"]), &goal("p"), 10).unwrap(), Some(ProofLength(4)));
}

#[test]
fn unbounded_examples() {
    let sols: Vec<_> = solve(&prog(&["p :- q", "q"]), &goal("p")).collect::<Result<_, _>>().unwrap();
    assert_eq!(sols.len(), 1);
    assert!(sols[0].answer.is_empty());
    assert_eq!(sols[0].length, ProofLength(4));

    let sols: Vec<_> = solve(&Program::empty(), &goal("a => a")).collect::<Result<_, _>>().unwrap();
    assert_eq!(sols.len(), 1);
}

#[test]
fn arcs_exists_edge() {
    let defs = fixture_defs("arcs.lw");
    let p = Program::new([Clause::macro_ref("arcs")], defs);
    let g = goal("exists Z. edge(tokyo, Z)");
    let first = solve(&p, &g).next().unwrap().unwrap();
    // Z is bound inside the existential, so the answer is empty.
    assert!(first.answer.is_empty());
    let g = goal("edge(tokyo, Z)");
    let first = solve(&p, &g).next().unwrap().unwrap();
    assert_eq!(first.answer.get(&Var::named("Z")), Some(&Term::constant("beizing")));
}

#[test]
fn backchain_examples() {
    let run = |c: &str, a: &str, p: Program| {
        let bs = BackchainState { distinguished: parse_clause(c).unwrap(), program: p, goal_atom: parse_term(a).unwrap() };
        backchain(&bs).collect::<Result<Vec<_>, _>>().unwrap()
    };
    assert_eq!(run("p", "p", Program::empty()).len(), 1);
    let sols = run("{ q. p. }", "p", Program::empty());
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0].length, ProofLength(2));

    let lists = fixture_defs("lists.lw");
    let p = Program::new([], lists);
    assert_eq!(run("/mem", "memb(a,[a])", p.clone()).len(), 1);
    let bs = BackchainState {
        distinguished: Clause::macro_ref("mem"),
        program: p,
        goal_atom: parse_term("memb(X,[a,b,c])").unwrap(),
    };
    let first = backchain(&bs).next().unwrap().unwrap();
    assert_eq!(first.answer.get(&Var::named("X")), Some(&Term::constant("a")));
}

#[test]
fn memb_respects_neq() {
    let p = Program::new([Clause::macro_ref("lists")], fixture_defs("lists.lw"));
    let sols: Vec<_> = solve(&p, &goal("memb(c, [a,b,c])")).collect::<Result<_, _>>().unwrap();
    assert_eq!(sols.len(), 1);
    assert!(solve(&p, &goal("memb(d, [a,b,c])")).next().is_none());
    let e = solve(&p, &goal("memb(X, [a,b])")).nth(1).unwrap().unwrap_err();
    assert!(matches!(e, SolveError::Builtin(_)));
}

#[test]
fn lookup_examples() {
    let m: PList<MacroDef> = parse_macro_defs("/p = b. /p = a.").unwrap().into_iter().collect();
    assert_eq!(lookup_macro(&m, "p", MacroKind::Goal).unwrap(), MacroBody::Goal(Arc::new(goal("b"))));
    assert!(matches!(lookup_macro(&m, "q", MacroKind::Goal), Err(SolveError::MacroNotFound(n)) if n == "q"));

    let m: PList<MacroDef> = parse_macro_defs("/p = father(tom,kim). /q = /p.").unwrap().into_iter().collect();
    let MacroBody::Goal(q) = lookup_macro(&m, "q", MacroKind::Goal).unwrap() else { panic!() };
    assert_eq!(*q, Goal::macro_ref("p"));
    let MacroBody::Goal(p) = lookup_macro(&m, "p", MacroKind::Goal).unwrap() else { panic!() };
    assert_eq!(*p, goal("father(tom,kim)"));
    let sol = solve(&Program::new([parse_clause("father(tom,kim)").unwrap()], m.iter().cloned()), &goal("/q"))
        .next()
        .unwrap()
        .unwrap();
    assert_eq!(sol.length, ProofLength(4));
}

#[test]
fn ill_tagged_macro_is_an_error() {
    let m: PList<MacroDef> = parse_macro_defs("/r = { p :- q. }.").unwrap().into_iter().collect();
    assert!(matches!(lookup_macro(&m, "r", MacroKind::Goal), Err(SolveError::IllTaggedMacro { .. })));
    let p = Program { clauses: PList::new(), macros: m };
    assert!(matches!(solve(&p, &goal("/r")).next(), Some(Err(SolveError::IllTaggedMacro { .. }))));
}

#[test]
fn shadowing_and_scope() {
    // Inner /p = b shadows outer /p = a only inside its scope.
    let g = goal("/o : { /o = /p. /p = { a. }. } => (/i : { /i = /p. /p = { b. }. } => b), a");
    assert!(exec(&Program::empty(), &g, 100).unwrap().is_success());
    let g = goal("/o : { /o = /p. /p = { a. }. } => (/i : { /i = /p. /p = { b. }. } => a)");
    // /i is /p which now means b, but /o is also /p, also re-pointed to b.
    assert_eq!(exec(&Program::empty(), &g, 100).unwrap(), SolveOutcome::Failure);
    let g = goal("/o : { /o = /p. /p = { a. }. } => ((/i : { /i = /p. /p = { b. }. } => b), a)");
    assert!(exec(&Program::empty(), &g, 100).unwrap().is_success());

    let p = prog(&["q"]);
    let before = p.clone();
    let _ = exec(&p, &goal("r => r"), 10).unwrap();
    assert_eq!(p, before);
}

#[test]
fn assumption_goes_first() {
    let p = prog(&["p(a)"]);
    let sol = solve(&p, &goal("p(b) => p(X)")).next().unwrap().unwrap();
    assert_eq!(sol.answer.get(&Var::named("X")), Some(&Term::constant("b")));
}

#[test]
fn trace_replays_length() {
    let engine = Engine::new().with_options(SolveOptions { trace: true, ..Default::default() });
    let out = engine.exec(&prog(&["p", "q"]), &goal("p, q"), 10).unwrap();
    let SolveOutcome::Success { length, trace: Some(t), .. } = out else { panic!() };
    assert_eq!(t.length(), length.0);
    assert_eq!(t.events[0].n_after, 5);
    assert_eq!(t.events[0].rule, Rule::ConjGoal);
    assert!(t.export().starts_with("step=1 rule=9 m=10 goal="));
}

#[test]
fn forall_costs_one_step_per_binder() {
    // decide, two instantiations, leaf.
    assert_eq!(length(&exec(&prog(&["p(X,Y)"]), &goal("p(a,b)"), 10).unwrap()), 4);
}

#[test]
fn link_without_resolver_is_an_error() {
    let g = goal("www.d.com/lists => p");
    assert!(matches!(exec(&Program::empty(), &g, 10), Err(SolveError::UnresolvedLink(_))));
}

#[test]
fn left_recursion_terminates_when_bounded() {
    let p = prog(&[
        "path(X,Y) :- path(X,Z), edge(Z,Y)",
        "path(X,Y) :- edge(X,Y)",
        "edge(a,b)",
        "edge(b,a)",
        "edge(b,c)",
        "edge(c,b)",
    ]);
    let out = exec(&p, &goal("path(a,d)"), 300).unwrap();
    assert_eq!(out, SolveOutcome::BoundExhausted);
    assert!(exec(&p, &goal("path(a,c)"), 300).unwrap().is_success());
}
