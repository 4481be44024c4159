//! Pretty-printing. Output re-parses to the same value.

use std::fmt::Write;

use super::ast::*;

pub fn render_term(t: &Term) -> String {
    let mut s = String::new();
    term(t, &mut s);
    s
}

fn term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => write!(out, "{v}").unwrap(),
        Term::Const(Constant::Name(n)) => out.push_str(n),
        Term::Const(Constant::Int(i)) => write!(out, "{i}").unwrap(),
        Term::Compound(f, args) if &**f == CONS && args.len() == 2 => {
            out.push('[');
            term(&args[0], out);
            let mut tail = &args[1];
            loop {
                match tail {
                    Term::Compound(f, a) if &**f == CONS && a.len() == 2 => {
                        out.push(',');
                        term(&a[0], out);
                        tail = &a[1];
                    }
                    Term::Const(Constant::Name(n)) if &**n == NIL => break,
                    other => {
                        out.push('|');
                        term(other, out);
                        break;
                    }
                }
            }
            out.push(']');
        }
        Term::Compound(f, args) => {
            out.push_str(f);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                term(a, out);
            }
            out.push(')');
        }
    }
}

pub fn render_goal(g: &Goal) -> String {
    let mut s = String::new();
    goal(g, false, &mut s);
    s
}

/// `left_of_conj`: the goal sits left of `,`, where anything that extends
/// greedily to the right needs parentheses.
fn goal(g: &Goal, left_of_conj: bool, out: &mut String) {
    let greedy = !matches!(g, Goal::Atom(_) | Goal::MacroRef(_));
    if left_of_conj && greedy {
        out.push('(');
        goal(g, false, out);
        out.push(')');
        return;
    }
    match g {
        Goal::Atom(t) => term(t, out),
        Goal::MacroRef(n) => write!(out, "/{n}").unwrap(),
        Goal::Conj(l, r) => {
            goal(l, true, out);
            out.push_str(", ");
            goal(r, false, out);
        }
        Goal::ClauseImpl(c, body) => {
            antecedent(c, out);
            out.push_str(" => ");
            goal(body, false, out);
        }
        Goal::LinkImpl(l) => {
            write!(out, "/{} : {{ ", l.root).unwrap();
            for d in l.defs.iter() {
                macro_def(d, " ", out);
                out.push(' ');
            }
            out.push_str("} => ");
            goal(&l.body, false, out);
        }
        Goal::Link { origin, body } => {
            out.push_str(origin);
            out.push_str(" => ");
            goal(body, false, out);
        }
        Goal::Exists(v, body) => {
            write!(out, "exists {v}. ").unwrap();
            goal(body, false, out);
        }
    }
}

fn antecedent(c: &Clause, out: &mut String) {
    match c {
        Clause::Fact(t) => term(t, out),
        Clause::MacroRef(n) => write!(out, "/{n}").unwrap(),
        Clause::Conj(..) => inner_clause(c, out),
        _ => {
            out.push_str("{ ");
            inner_clause(c, out);
            out.push_str(". }");
        }
    }
}

/// A clause exactly as structured, binders explicit.
fn inner_clause(c: &Clause, out: &mut String) {
    match c {
        Clause::Fact(t) => term(t, out),
        Clause::MacroRef(n) => write!(out, "/{n}").unwrap(),
        Clause::Rule(h, b) => {
            term(h, out);
            out.push_str(" :- ");
            goal(b, false, out);
        }
        Clause::Forall(v, body) => {
            write!(out, "forall {v}. ").unwrap();
            inner_clause(body, out);
        }
        Clause::Conj(..) => {
            out.push_str("{ ");
            for s in conj_spine(c) {
                inner_clause(s, out);
                out.push_str(". ");
            }
            out.push('}');
        }
    }
}

/// Elements of the right spine of a clause conjunction.
fn conj_spine(c: &Clause) -> Vec<&Clause> {
    let mut out = Vec::new();
    let mut cur = c;
    while let Clause::Conj(l, r) = cur {
        out.push(&**l);
        cur = r;
    }
    out.push(cur);
    out
}

/// Strips the universal closure a top-level statement would receive when
/// parsed, returning the clause as it must be written.
fn strip_closure(c: &Clause) -> &Clause {
    let mut peeled = Vec::new();
    let mut cur = c;
    while let Clause::Forall(_, body) = cur {
        peeled.push(cur);
        cur = body;
    }
    // Largest prefix whose removal is exactly restored by closing.
    for k in (1..=peeled.len()).rev() {
        let candidate = match peeled[k - 1] {
            Clause::Forall(_, body) => &**body,
            _ => unreachable!(),
        };
        if candidate.clone().close() == *c {
            return candidate;
        }
    }
    c
}

fn top_statement(c: &Clause, out: &mut String) {
    inner_clause(strip_closure(c), out);
}

/// A top-level clause statement, without the terminating `.`. Implicit
/// universal quantifiers are left out.
pub fn render_clause(c: &Clause) -> String {
    let mut s = String::new();
    top_statement(c, &mut s);
    s
}

fn macro_def(d: &MacroDef, sep: &str, out: &mut String) {
    write!(out, "/{} =", d.name).unwrap();
    match &d.body {
        MacroBody::Goal(g) => {
            out.push(' ');
            goal(g, false, out);
            out.push('.');
        }
        MacroBody::Clause(c) => {
            let stmts = conj_spine(c);
            for s in &stmts {
                out.push_str(sep);
                let stripped = strip_closure(s);
                // A lone fact or macro reference would read back as a goal.
                if stmts.len() == 1 && matches!(stripped, Clause::Fact(_) | Clause::MacroRef(_)) {
                    out.push_str("{ ");
                    inner_clause(stripped, out);
                    out.push_str(". }");
                } else {
                    inner_clause(stripped, out);
                }
                out.push('.');
            }
        }
    }
}

pub fn render_macro_def(d: &MacroDef) -> String {
    let mut s = String::new();
    macro_def(d, "\n  ", &mut s);
    s
}

/// A whole module file.
pub fn render_module(defs: &[MacroDef]) -> String {
    let mut s = String::new();
    for d in defs {
        macro_def(d, "\n  ", &mut s);
        s.push('\n');
    }
    s
}

pub fn render_query(q: &Query) -> String {
    match q.bound {
        Some(b) => format!("?- ({b}) {}.", render_goal(&q.goal)),
        None => format!("?- {}.", render_goal(&q.goal)),
    }
}
