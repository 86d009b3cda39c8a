//! Lazy SMT-style conditioning engine.
//!
//! A [`TheoryState`] enforces "exactly one value per variable" with a counter
//! and a chosen-atom slot per variable. A [`ClauseState`] tracks the encoded
//! clauses through an occurrence map and per-clause counters. Positive
//! conditioning asks the theory for the sibling negations it implies and feeds
//! them to the clause layer; both layers share one chronological trail
//! discipline so any conditioning can be undone.

mod clauses;
mod theory;

pub use clauses::{ClauseStatus, ClauseState};
pub use theory::{TheoryState, Value};

use theory::TheoryVerdict;

use crate::encode::{Lit, Theory, WeightId, WeightedCnf};
use crate::error::SolverError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Contradiction,
    /// The call had no effect: the literal was already decided.
    Redundant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionOutcome {
    pub status: Status,
    /// Sibling atoms set false by the theory (positive conditioning only).
    pub implied_negations: Vec<Lit>,
    pub fired_weights: Vec<WeightId>,
    pub all_clauses_resolved: bool,
}

/// Trail position returned by [`SolverState::snapshot`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mark {
    theory: usize,
    clauses: usize,
}

#[derive(Debug, Clone)]
pub struct SolverState<'a> {
    theory: &'a Theory,
    pub(crate) theory_state: TheoryState,
    pub(crate) clause_state: ClauseState,
}

impl<'a> SolverState<'a> {
    pub fn new(cnf: &WeightedCnf, theory: &'a Theory) -> Self {
        SolverState {
            theory,
            theory_state: TheoryState::new(theory),
            clause_state: ClauseState::new(cnf, theory.num_atoms()),
        }
    }

    pub fn theory(&self) -> &'a Theory {
        self.theory
    }

    pub fn theory_state(&self) -> &TheoryState {
        &self.theory_state
    }

    pub fn clause_state(&self) -> &ClauseState {
        &self.clause_state
    }

    fn outcome(&self, status: Status, implied: Vec<Lit>, fired: Vec<WeightId>) -> ConditionOutcome {
        ConditionOutcome {
            status,
            implied_negations: implied,
            fired_weights: fired,
            all_clauses_resolved: self.is_fully_resolved(),
        }
    }

    /// Condition on `lit` being true, together with the negations of all its
    /// siblings. Clauses whose counter reaches zero fire their weight; a hard
    /// clause reaching zero is a contradiction.
    pub fn condition_positive(&mut self, lit: Lit) -> ConditionOutcome {
        match self.theory_state.positive(self.theory, lit) {
            TheoryVerdict::Redundant => {
                return self.outcome(Status::Redundant, Vec::new(), Vec::new())
            }
            TheoryVerdict::Contradiction => {
                return self.outcome(Status::Contradiction, Vec::new(), Vec::new())
            }
            TheoryVerdict::Ok => {}
        }
        let mut fired = Vec::new();
        if !self.clause_state.on_true(lit, &mut fired) {
            return self.outcome(Status::Contradiction, Vec::new(), fired);
        }
        let implied = self.theory_state.imply_siblings(self.theory, lit);
        for &s in &implied {
            self.clause_state.on_false(s);
        }
        self.outcome(Status::Ok, implied, fired)
    }

    /// Condition on `lit` being false. Never fires a weight.
    pub fn condition_negative(&mut self, lit: Lit) -> ConditionOutcome {
        match self.theory_state.negative(self.theory, lit) {
            TheoryVerdict::Redundant => self.outcome(Status::Redundant, Vec::new(), Vec::new()),
            TheoryVerdict::Contradiction => {
                // the trail already holds the decrement; keep the clause layer in step
                self.clause_state.on_false(lit);
                self.outcome(Status::Contradiction, Vec::new(), Vec::new())
            }
            TheoryVerdict::Ok => {
                self.clause_state.on_false(lit);
                self.outcome(Status::Ok, Vec::new(), Vec::new())
            }
        }
    }

    pub fn snapshot(&self) -> Mark {
        Mark {
            theory: self.theory_state.trail_len(),
            clauses: self.clause_state.trail_len(),
        }
    }

    pub fn undo_to(&mut self, mark: Mark) -> Result<(), SolverError> {
        if mark.theory > self.theory_state.trail_len() {
            return Err(SolverError::BadMark {
                mark: mark.theory,
                len: self.theory_state.trail_len(),
            });
        }
        if mark.clauses > self.clause_state.trail_len() {
            return Err(SolverError::BadMark {
                mark: mark.clauses,
                len: self.clause_state.trail_len(),
            });
        }
        self.theory_state.undo_to(mark.theory);
        self.clause_state.undo_to(mark.clauses);
        Ok(())
    }

    pub fn is_fully_resolved(&self) -> bool {
        self.clause_state.open_count() == 0
    }

    /// Whether `var` already has an atom conditioned true.
    pub fn is_decided(&self, var: usize) -> bool {
        self.theory_state.chosen(var).is_some()
    }

    /// Theory bookkeeping steps so far (sibling emission excluded).
    pub fn theory_steps(&self) -> u64 {
        self.theory_state.steps()
    }

    /// Clause visits so far.
    pub fn clause_steps(&self) -> u64 {
        self.clause_state.steps()
    }
}
