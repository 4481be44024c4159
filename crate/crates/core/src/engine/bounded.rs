use std::fmt;

use super::{Engine, SolveError};
use crate::syntax::{Goal, Program};
use crate::unify::Substitution;

use super::trace::Trace;

/// Remaining proof-step allowance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Budget(pub u64);

impl From<u64> for Budget {
    fn from(m: u64) -> Self {
        Budget(m)
    }
}

/// Rule applications in one derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProofLength(pub u64);

impl fmt::Display for ProofLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Success { answer: Substitution, length: ProofLength, trace: Option<Trace> },
    /// No derivation exists: the search finished without any cut.
    Failure,
    /// No derivation within the budget, and some branch was cut by it.
    BoundExhausted,
}

impl SolveOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, SolveOutcome::Success { .. })
    }

    pub fn length(&self) -> Option<ProofLength> {
        match self {
            SolveOutcome::Success { length, .. } => Some(*length),
            _ => None,
        }
    }
}

impl Engine {
    /// First derivation of `g` within `m` steps, in depth-first order.
    pub fn exec(&self, p: &Program, g: &Goal, m: impl Into<Budget>) -> Result<SolveOutcome, SolveError> {
        let mut sols = self.pv_bounded(p, g, m);
        match sols.next() {
            Some(Ok(s)) => Ok(SolveOutcome::Success { answer: s.answer, length: s.length, trace: s.trace }),
            Some(Err(e)) => Err(e),
            None if sols.bound_cut() => Ok(SolveOutcome::BoundExhausted),
            None => Ok(SolveOutcome::Failure),
        }
    }

    /// Smallest `n <= cap` with `exec(p, g, n)` a success, by iterative
    /// deepening. Stops early once a run fails without any cut.
    pub fn min_proof_length(&self, p: &Program, g: &Goal, cap: u64) -> Result<Option<ProofLength>, SolveError> {
        for m in 1..=cap {
            match self.exec(p, g, m)? {
                SolveOutcome::Success { length, .. } => return Ok(Some(length)),
                SolveOutcome::Failure => return Ok(None),
                SolveOutcome::BoundExhausted => {}
            }
        }
        Ok(None)
    }
}
