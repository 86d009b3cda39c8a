use crate::encode::{Lit, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TheoryVerdict {
    Ok,
    Contradiction,
    Redundant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Unassigned,
    True,
    False,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Undo {
    Remaining(u32),
    Chosen(u32),
    Assign(u32),
}

/// Exactly-one constraints over each variable's atoms, kept as counters.
///
/// `remaining[x]` counts atoms of `x` not yet conditioned false; `chosen[x]`
/// holds the atom conditioned true, after which every sibling is redundant.
#[derive(Debug, Clone)]
pub struct TheoryState {
    remaining: Vec<u32>,
    chosen: Vec<Option<Lit>>,
    value: Vec<Value>,
    trail: Vec<Undo>,
    steps: u64,
}

// The step counter is instrumentation and takes no part in equality.
impl PartialEq for TheoryState {
    fn eq(&self, other: &Self) -> bool {
        self.remaining == other.remaining
            && self.chosen == other.chosen
            && self.value == other.value
            && self.trail == other.trail
    }
}

impl Eq for TheoryState {}

impl TheoryState {
    pub fn new(theory: &Theory) -> Self {
        TheoryState {
            remaining: (0..theory.num_vars())
                .map(|v| theory.domain_size(v) as u32)
                .collect(),
            chosen: vec![None; theory.num_vars()],
            value: vec![Value::Unassigned; theory.num_atoms() + 1],
            trail: Vec::new(),
            steps: 0,
        }
    }

    pub fn remaining(&self, v: usize) -> u32 {
        self.remaining[v]
    }

    pub fn chosen(&self, v: usize) -> Option<Lit> {
        self.chosen[v]
    }

    pub fn value(&self, lit: Lit) -> Value {
        self.value[lit.index()]
    }

    /// Bookkeeping steps performed so far, excluding the emission of implied
    /// sibling negations.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub(crate) fn trail_len(&self) -> usize {
        self.trail.len()
    }

    fn assign(&mut self, lit: Lit, value: Value) {
        self.value[lit.index()] = value;
        self.trail.push(Undo::Assign(lit.0));
    }

    pub(crate) fn positive(&mut self, theory: &Theory, lit: Lit) -> TheoryVerdict {
        let v = theory.var(lit);
        self.steps += 1;
        if self.chosen[v].is_some() {
            return TheoryVerdict::Redundant;
        }
        self.steps += 1;
        if self.value[lit.index()] == Value::False {
            return TheoryVerdict::Contradiction;
        }
        self.steps += 1;
        self.chosen[v] = Some(lit);
        self.trail.push(Undo::Chosen(v as u32));
        self.assign(lit, Value::True);
        TheoryVerdict::Ok
    }

    /// Marks every unassigned sibling of `lit` false and returns them. This is
    /// output-sized and not counted in [`TheoryState::steps`].
    pub(crate) fn imply_siblings(&mut self, theory: &Theory, lit: Lit) -> Vec<Lit> {
        let v = theory.var(lit);
        let mut implied = Vec::new();
        for s in theory.atoms(v) {
            if s != lit && self.value[s.index()] == Value::Unassigned {
                self.assign(s, Value::False);
                implied.push(s);
            }
        }
        implied
    }

    pub(crate) fn negative(&mut self, theory: &Theory, lit: Lit) -> TheoryVerdict {
        let v = theory.var(lit);
        self.steps += 1;
        match self.value[lit.index()] {
            Value::False => return TheoryVerdict::Redundant,
            Value::True => return TheoryVerdict::Contradiction,
            Value::Unassigned => {}
        }
        self.steps += 1;
        self.assign(lit, Value::False);
        self.remaining[v] -= 1;
        self.trail.push(Undo::Remaining(v as u32));
        self.steps += 1;
        if self.remaining[v] == 0 {
            TheoryVerdict::Contradiction
        } else {
            TheoryVerdict::Ok
        }
    }

    pub(crate) fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("non-empty trail") {
                Undo::Remaining(v) => self.remaining[v as usize] += 1,
                Undo::Chosen(v) => self.chosen[v as usize] = None,
                Undo::Assign(l) => self.value[l as usize] = Value::Unassigned,
            }
        }
    }
}
