use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encode::{Lit, WeightId, WeightedCnf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseStatus {
    Open,
    /// Some literal of the clause is true (one of its atoms is false).
    Satisfied,
    /// Every literal falsified; the weight has been emitted.
    Fired,
    /// A hard clause with every literal falsified.
    Conflict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Undo {
    Counter(u32),
    Status(u32, ClauseStatus),
}

/// Counter-based conditioner for the encoded clauses.
///
/// `occurrences[l]` lists the clauses containing `¬l`. Since every encoded
/// literal is negative, conditioning `l` true only decrements counters and
/// conditioning it false only satisfies clauses.
#[derive(Debug, Clone)]
pub struct ClauseState {
    occurrences: Vec<Vec<u32>>,
    weight: Vec<Option<WeightId>>,
    counter: Vec<u32>,
    status: Vec<ClauseStatus>,
    open: usize,
    open_bits: Vec<u64>,
    open_hash: u64,
    keys: Vec<u64>,
    trail: Vec<Undo>,
    steps: u64,
}

impl PartialEq for ClauseState {
    fn eq(&self, other: &Self) -> bool {
        self.counter == other.counter
            && self.status == other.status
            && self.open == other.open
            && self.open_bits == other.open_bits
            && self.open_hash == other.open_hash
            && self.trail == other.trail
    }
}

impl Eq for ClauseState {}

impl ClauseState {
    pub fn new(cnf: &WeightedCnf, num_atoms: usize) -> Self {
        let mut occurrences = vec![Vec::new(); num_atoms + 1];
        for (ci, clause) in cnf.clauses.iter().enumerate() {
            for a in &clause.atoms {
                occurrences[a.index()].push(ci as u32);
            }
        }
        let n = cnf.clauses.len();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c1a0);
        let keys: Vec<u64> = (0..n).map(|_| rng.next_u64()).collect();
        let mut open_bits = vec![0u64; n.div_ceil(64)];
        for ci in 0..n {
            open_bits[ci / 64] |= 1 << (ci % 64);
        }
        ClauseState {
            occurrences,
            weight: cnf.clauses.iter().map(|c| c.weight).collect(),
            counter: cnf.clauses.iter().map(|c| c.atoms.len() as u32).collect(),
            status: vec![ClauseStatus::Open; n],
            open: n,
            open_bits,
            open_hash: keys.iter().fold(0, |h, k| h ^ k),
            keys,
            trail: Vec::new(),
            steps: 0,
        }
    }

    pub fn num_clauses(&self) -> usize {
        self.status.len()
    }

    pub fn open_count(&self) -> usize {
        self.open
    }

    pub fn status(&self, clause: usize) -> ClauseStatus {
        self.status[clause]
    }

    pub fn counter(&self, clause: usize) -> u32 {
        self.counter[clause]
    }

    pub fn occurrences(&self, lit: Lit) -> &[u32] {
        &self.occurrences[lit.index()]
    }

    /// Clause visits performed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Order-insensitive hash of the open clause set.
    pub fn open_hash(&self) -> u64 {
        self.open_hash
    }

    /// Bitset of open clauses.
    pub fn open_bits(&self) -> &[u64] {
        &self.open_bits
    }

    pub(crate) fn trail_len(&self) -> usize {
        self.trail.len()
    }

    fn close(&mut self, ci: usize, status: ClauseStatus) {
        self.trail.push(Undo::Status(ci as u32, self.status[ci]));
        self.status[ci] = status;
        self.open -= 1;
        self.open_bits[ci / 64] &= !(1 << (ci % 64));
        self.open_hash ^= self.keys[ci];
    }

    /// Atom `lit` became true. Returns false when a hard clause is violated.
    pub(crate) fn on_true(&mut self, lit: Lit, fired: &mut Vec<WeightId>) -> bool {
        let mut ok = true;
        for k in 0..self.occurrences[lit.index()].len() {
            let ci = self.occurrences[lit.index()][k] as usize;
            self.steps += 1;
            if self.status[ci] != ClauseStatus::Open {
                continue;
            }
            self.counter[ci] -= 1;
            self.trail.push(Undo::Counter(ci as u32));
            if self.counter[ci] == 0 {
                match self.weight[ci] {
                    Some(w) => {
                        fired.push(w);
                        self.close(ci, ClauseStatus::Fired);
                    }
                    None => {
                        self.close(ci, ClauseStatus::Conflict);
                        ok = false;
                    }
                }
            }
        }
        ok
    }

    /// Atom `lit` became false: every clause containing `¬lit` is satisfied.
    pub(crate) fn on_false(&mut self, lit: Lit) {
        for k in 0..self.occurrences[lit.index()].len() {
            let ci = self.occurrences[lit.index()][k] as usize;
            self.steps += 1;
            if self.status[ci] == ClauseStatus::Open {
                self.close(ci, ClauseStatus::Satisfied);
            }
        }
    }

    pub(crate) fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("non-empty trail") {
                Undo::Counter(ci) => self.counter[ci as usize] += 1,
                Undo::Status(ci, old) => {
                    let ci = ci as usize;
                    self.status[ci] = old;
                    self.open += 1;
                    self.open_bits[ci / 64] |= 1 << (ci % 64);
                    self.open_hash ^= self.keys[ci];
                }
            }
        }
    }
}
