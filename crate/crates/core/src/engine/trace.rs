use std::fmt;

/// Inference rules of the bounded proof procedure, numbered as in the
/// definition (1 is the `exec` entry and never appears in a derivation).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Distinguished fact matches the goal atom.
    Leaf = 2,
    /// Distinguished `A :- G`: continue with `G`.
    Backchain = 3,
    /// `forall x. D`: instantiate with a fresh variable.
    Instantiate = 4,
    /// `D1 /\ D2`: use `D1`.
    ConjLeft = 5,
    /// `D1 /\ D2`: use `D2`.
    ConjRight = 6,
    /// Distinguished `/n`: expand the clause macro.
    ClauseMacro = 7,
    /// Pick a program clause for an atomic goal.
    Decide = 8,
    /// `G1 , G2`
    ConjGoal = 9,
    /// `exists x. G`
    Exists = 10,
    /// `D => G`
    ClauseImpl = 11,
    /// `/n : M => G`
    LinkImpl = 12,
    /// Goal macro `/n`.
    MacroGoal = 13,
    /// Built-in predicate call; a one-step leaf.
    Builtin = 14,
}

impl Rule {
    pub fn id(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Builtin => f.write_str("builtin"),
            r => write!(f, "{}", r.id()),
        }
    }
}

/// One rule application on a successful derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub rule: Rule,
    /// Depth in the derivation tree; the root rule has depth 0.
    pub depth: u32,
    pub goal: String,
    /// Remaining allowance before the rule fired; `None` when unbounded.
    pub m_before: Option<u64>,
    /// Length of the sub-derivation rooted at this rule.
    pub n_after: u64,
}

/// Rule applications of one derivation, in pre-order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    /// Builds the trace from pre-order events whose `n_after` is not yet
    /// known, filling it in from the depths.
    pub(crate) fn from_preorder(mut events: Vec<TraceEvent>) -> Trace {
        for i in 0..events.len() {
            let d = events[i].depth;
            let size = events[i + 1..].iter().take_while(|e| e.depth > d).count();
            events[i].n_after = size as u64 + 1;
        }
        Trace { events }
    }

    /// Proof length replayed from the trace.
    pub fn length(&self) -> u64 {
        self.events.len() as u64
    }

    /// One line per event: `step=<i> rule=<id> m=<m> goal=<goal>`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.events.iter().enumerate() {
            let m = e.m_before.map_or_else(|| "inf".to_string(), |m| m.to_string());
            out.push_str(&format!("step={} rule={} m={} goal={}\n", i + 1, e.rule, m, e.goal));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(rule: Rule, depth: u32) -> TraceEvent {
        TraceEvent { rule, depth, goal: "g".into(), m_before: Some(9), n_after: 0 }
    }

    #[test]
    fn subtree_lengths_from_depths() {
        // conj(p, q): 9 at depth 0, decide/leaf for each side.
        let t = Trace::from_preorder(vec![
            ev(Rule::ConjGoal, 0),
            ev(Rule::Decide, 1),
            ev(Rule::Leaf, 2),
            ev(Rule::Decide, 1),
            ev(Rule::Leaf, 2),
        ]);
        let ns: Vec<u64> = t.events.iter().map(|e| e.n_after).collect();
        assert_eq!(ns, [5, 2, 1, 2, 1]);
        assert_eq!(t.length(), 5);
        assert!(t.export().lines().last().unwrap().starts_with("step=5 rule=2 m=9"));
    }
}
