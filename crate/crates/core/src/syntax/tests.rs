use proptest::prelude::*;

use super::*;

fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn c(name: &str) -> Term {
    Term::constant(name)
}

#[test]
fn arcs_page_is_one_clause_macro() {
    let defs = parse_module_file(&fixture("arcs.lw"), "arcs.lw").unwrap();
    assert_eq!(defs.len(), 1);
    assert_eq!(&*defs[0].name, "arcs");
    let MacroBody::Clause(body) = &defs[0].body else { panic!("expected clause body") };
    let heads: Vec<String> = body.heads().iter().map(|t| t.to_string()).collect();
    assert_eq!(heads[0], "edge(tokyo,beizing)");
    assert_eq!(heads.last().unwrap(), "edge(paris,london)");
    assert!(matches!(&**body, Clause::Conj(..)));
}

#[test]
fn lists_page_has_four_macros() {
    let defs = parse_module_file(&fixture("lists.lw"), "lists.lw").unwrap();
    let names: Vec<&str> = defs.iter().map(|d| &*d.name).collect();
    assert_eq!(names, ["lists", "path", "mem", "app"]);
    assert_eq!(
        defs[0].body,
        MacroBody::Goal(std::sync::Arc::new(parse_goal("/mem /\\ /app /\\ /path").unwrap()))
    );
    for d in &defs[1..] {
        assert_eq!(d.body.kind(), MacroKind::Clause);
    }
}

#[test]
fn empty_file() {
    assert_eq!(parse_module_file("", "e").unwrap(), vec![]);
    assert_eq!(parse_module_file("% only a comment\n", "e").unwrap(), vec![]);
}

#[test]
fn module_file_errors() {
    let e = parse_module_file("/a =\n/b = p.\n", "f").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::EmptyMacro("a".into()));
    assert_eq!((e.line, e.col), (2, 1));

    let e = parse_module_file("/a = p :- q", "f").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::Unterminated);

    let e = parse_module_file("/a = p(.\n", "f").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
    assert_eq!((e.line, e.col), (1, 8));

    let e = parse_module_file("p. q.", "f").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
}

#[test]
fn bounded_paper_query() {
    let q = parse_query("?- (1000) www.d.com/lists => www.d.com/arcs => path(london,boston).").unwrap();
    assert_eq!(q.bound, Some(1000));
    let inner = Goal::Link {
        origin: "www.d.com/arcs".into(),
        body: Goal::atom(Term::app("path", vec![c("london"), c("boston")])).into(),
    };
    assert_eq!(q.goal, Goal::Link { origin: "www.d.com/lists".into(), body: inner.into() });
}

#[test]
fn minimal_queries() {
    assert_eq!(parse_query("?- p.").unwrap(), Query { bound: None, goal: Goal::atom(c("p")) });
    assert_eq!(parse_query("?- (0) p.").unwrap(), Query { bound: Some(0), goal: Goal::atom(c("p")) });
    let e = parse_query("?- (-3) p.").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::NegativeBound(-3));
    assert!(parse_query("p.").is_err());
    assert!(parse_query("?- p").is_err());
}

#[test]
fn conjunction_spellings_agree() {
    let a = parse_goal("p, q, r").unwrap();
    assert_eq!(parse_goal("p /\\ q /\\ r").unwrap(), a);
    assert_eq!(parse_goal("p ∧ q ∧ r").unwrap(), a);
    assert_eq!(a, Goal::conj(Goal::atom(c("p")), Goal::conj(Goal::atom(c("q")), Goal::atom(c("r")))));
}

#[test]
fn implication_is_right_associative_and_greedy() {
    let g = parse_goal("a => b => c, d").unwrap();
    let cd = Goal::conj(Goal::atom(c("c")), Goal::atom(c("d")));
    let expected = Goal::implies(
        Clause::Fact(c("a")),
        Goal::implies(Clause::Fact(c("b")), cd),
    );
    assert_eq!(g, expected);
}

#[test]
fn variable_convention() {
    let t = parse_term("f(X, _y, _, abc, aBC, Xyz)").unwrap();
    let kinds: Vec<bool> = t.args().iter().map(Term::is_var).collect();
    assert_eq!(kinds, [true, true, true, false, false, true]);
    // Each `_` is distinct.
    let t = parse_term("f(_, _)").unwrap();
    assert_ne!(t.args()[0], t.args()[1]);
}

#[test]
fn render_examples() {
    assert_eq!(render_term(&Term::app("edge", vec![c("tokyo"), c("beizing")])), "edge(tokyo,beizing)");
    assert_eq!(render_term(&Term::cons(c("a"), Term::nil())), "[a]");
    let x = Var::named("X");
    let cl = Clause::forall(x.clone(), Clause::Fact(Term::app("p", vec![Term::Var(x)])));
    assert_eq!(render_clause(&cl), "p(X)");
    assert_eq!(parse_clause("p(X)").unwrap(), cl);
}

#[test]
fn list_sugar_round_trips() {
    for s in ["[]", "[a]", "[a,b]", "[X|L]", "[a,b|T]", "[[a],[]]"] {
        assert_eq!(render_term(&parse_term(s).unwrap()), s);
    }
}

#[test]
fn explicit_binders_survive_rendering() {
    for s in ["forall X. p(X,Y)", "p(X) :- exists Y. q(X,Y)", "{ p(X). q. } => r"] {
        let first = if s.contains("=>") {
            render_goal(&parse_goal(s).unwrap())
        } else {
            render_clause(&parse_clause(s).unwrap())
        };
        assert_eq!(first, s);
    }
}

#[test]
fn inline_page_goal() {
    let g = parse_goal("/top : { /top = /a. /a = p. q. } => p").unwrap();
    let Goal::LinkImpl(l) = &g else { panic!() };
    assert_eq!(&*l.root, "top");
    assert_eq!(l.defs.len(), 2);
    assert_eq!(l.defs[1].body.kind(), MacroKind::Clause);
    assert_eq!(parse_goal(&render_goal(&g)).unwrap(), g);
    assert!(parse_goal("/top : { /a = p. } => p").is_err());
}

#[test]
fn fixture_pages_round_trip() {
    for f in ["lists.lw", "arcs.lw", "rlists.lw", "chain.lw"] {
        let defs = parse_module_file(&fixture(f), f).unwrap();
        let text = render_module(&defs);
        assert_eq!(parse_module_file(&text, f).unwrap(), defs, "{f}:\n{text}");
    }
}

#[test]
fn single_fact_clause_macro_keeps_its_tag() {
    let d = MacroDef::clause("m", Clause::Fact(c("p")));
    let text = render_macro_def(&d);
    assert_eq!(parse_macro_defs(&text).unwrap(), vec![d]);
    let g = MacroDef::goal("m", Goal::atom(c("p")));
    assert_eq!(parse_macro_defs(&render_macro_def(&g)).unwrap(), vec![g]);
}

// ---- generated ASTs ----

fn arb_var() -> impl Strategy<Value = Var> {
    prop::sample::select(vec!["X", "Y", "Z", "L"]).prop_map(Var::named)
}

fn arb_term() -> impl Strategy<Value = Term> {
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

fn arb_atom() -> impl Strategy<Value = Term> {
    (prop::sample::select(vec!["p", "q", "memb", "forall"]), prop::collection::vec(arb_term(), 0..3))
        .prop_map(|(f, args)| Term::app(f, args))
}

fn arb_macro_name() -> impl Strategy<Value = Name> {
    prop::sample::select(vec!["m", "lists", "arcs"]).prop_map(Name::from)
}

fn arb_goal() -> BoxedStrategy<Goal> {
    let leaf = prop_oneof![arb_atom().prop_map(Goal::Atom), arb_macro_name().prop_map(Goal::MacroRef)];
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

/// Clauses as they may appear inside goals: no implicit closure.
fn arb_inner_clause() -> BoxedStrategy<Clause> {
    let leaf = prop_oneof![
        arb_atom().prop_map(Clause::Fact),
        arb_macro_name().prop_map(Clause::MacroRef),
        (arb_atom(), arb_atom()).prop_map(|(h, b)| Clause::rule(h, Goal::Atom(b))),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (arb_var(), inner.clone()).prop_map(|(v, c)| Clause::forall(v, c)),
            (inner.clone(), inner).prop_map(|(l, r)| Clause::conj(l, r)),
        ]
    })
    .boxed()
}

fn arb_macro_def() -> impl Strategy<Value = MacroDef> {
    prop_oneof![
        (arb_macro_name(), arb_goal()).prop_map(|(n, g)| MacroDef::goal(&n, g)),
        (arb_macro_name(), prop::collection::vec(arb_inner_clause(), 1..4)).prop_map(|(n, cs)| {
            let closed = cs.into_iter().map(Clause::close).collect();
            MacroDef::clause(&n, parser::fold_conj(closed))
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn term_round_trip(t in arb_term()) {
        prop_assert_eq!(parse_term(&render_term(&t)).unwrap(), t);
    }

    #[test]
    fn goal_round_trip(g in arb_goal()) {
        let text = render_goal(&g);
        prop_assert_eq!(parse_goal(&text).unwrap(), g, "{}", text);
    }

    #[test]
    fn clause_round_trip(c in arb_inner_clause()) {
        let closed = c.close();
        let text = render_clause(&closed);
        prop_assert_eq!(parse_clause(&text).unwrap(), closed, "{}", text);
    }

    #[test]
    fn module_round_trip(defs in prop::collection::vec(arb_macro_def(), 0..4)) {
        let text = render_module(&defs);
        prop_assert_eq!(parse_module_file(&text, "gen").unwrap(), defs, "{}", text);
    }
}
