//! Literal orderings induced from variable orderings, and a simulated
//! annealing search over variable orderings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encode::{Lit, Theory};
use crate::error::OrderError;

/// Total order on atoms where each variable's atoms form a contiguous block
/// in domain order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiteralOrdering {
    lits: Vec<Lit>,
    // position[lit] (slot 0 unused)
    position: Vec<u32>,
    // var_of[lit]
    var_of: Vec<u32>,
    vars: Vec<usize>,
    // var_rank[v] = position of v in `vars`
    var_rank: Vec<u32>,
    block_start: Vec<u32>,
    // one past the position of v's last atom
    block_end: Vec<u32>,
}

impl LiteralOrdering {
    /// Groups atoms by `var_order`, which must be a permutation of the
    /// theory's variables.
    pub fn from_var_order(theory: &Theory, var_order: &[usize]) -> Result<Self, OrderError> {
        let n = theory.num_vars();
        let mut seen = vec![false; n];
        for &v in var_order {
            if v >= n {
                return Err(OrderError::UnknownVariable(format!("#{v}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(OrderError::NotAPermutation {
                    got: var_order.len(),
                    expected: n,
                });
            }
        }
        if var_order.len() != n {
            return Err(OrderError::NotAPermutation {
                got: var_order.len(),
                expected: n,
            });
        }
        let mut lits = Vec::with_capacity(theory.num_atoms());
        let mut position = vec![u32::MAX; theory.num_atoms() + 1];
        let mut var_of = vec![u32::MAX; theory.num_atoms() + 1];
        let mut var_rank = vec![0u32; n];
        let mut block_start = vec![0u32; n];
        let mut block_end = vec![0u32; n];
        for (rank, &v) in var_order.iter().enumerate() {
            var_rank[v] = rank as u32;
            block_start[v] = lits.len() as u32;
            for a in theory.atoms(v) {
                position[a.index()] = lits.len() as u32;
                var_of[a.index()] = v as u32;
                lits.push(a);
            }
            block_end[v] = lits.len() as u32;
        }
        Ok(LiteralOrdering {
            lits,
            position,
            var_of,
            vars: var_order.to_vec(),
            var_rank,
            block_start,
            block_end,
        })
    }

    /// Declaration order of the theory's variables.
    pub fn natural(theory: &Theory) -> Self {
        let order: Vec<usize> = (0..theory.num_vars()).collect();
        Self::from_var_order(theory, &order).expect("identity is a permutation")
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn var_order(&self) -> &[usize] {
        &self.vars
    }

    #[inline]
    pub fn position(&self, lit: Lit) -> usize {
        self.position[lit.index()] as usize
    }

    #[inline]
    pub fn var(&self, lit: Lit) -> usize {
        self.var_of[lit.index()] as usize
    }

    #[inline]
    pub fn var_rank(&self, var: usize) -> usize {
        self.var_rank[var] as usize
    }

    /// One past the position of the last atom of `var`.
    #[inline]
    pub fn block_end(&self, var: usize) -> usize {
        self.block_end[var] as usize
    }

    /// Atoms of `var` in ordering (= domain) order.
    pub fn block(&self, var: usize) -> &[Lit] {
        &self.lits[self.block_start[var] as usize..self.block_end(var)]
    }

    #[inline]
    pub fn at(&self, pos: usize) -> Lit {
        self.lits[pos]
    }
}

/// Induce the grouped literal ordering for a list of variable names.
pub fn induce_literal_order(theory: &Theory, var_order: &[&str]) -> Result<LiteralOrdering, OrderError> {
    let vars = var_order
        .iter()
        .map(|name| {
            theory
                .var_index(name)
                .ok_or_else(|| OrderError::UnknownVariable(name.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    LiteralOrdering::from_var_order(theory, &vars)
}

/// Result of [`anneal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnealResult {
    pub order: Vec<usize>,
    pub cost: usize,
    pub start_cost: usize,
    pub evaluations: usize,
}

/// Swap-neighbourhood simulated annealing over variable orders.
///
/// `budget` counts cost evaluations including the start order, so a budget
/// of one returns `start` unchanged. The best order visited is returned.
pub fn anneal<F>(start: &[usize], seed: u64, budget: usize, mut cost: F) -> AnnealResult
where
    F: FnMut(&[usize]) -> usize,
{
    assert!(budget >= 1, "annealing budget must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = start.to_vec();
    let start_cost = cost(&current);
    let mut current_cost = start_cost;
    let mut best = current.clone();
    let mut best_cost = current_cost;
    let n = current.len();
    let mut evaluations = 1;
    if n < 2 {
        return AnnealResult {
            order: best,
            cost: best_cost,
            start_cost,
            evaluations,
        };
    }
    // initial temperature scaled to the start cost
    let t0 = (start_cost.max(1) as f64) * 0.05;
    while evaluations < budget {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        current.swap(i, j);
        let candidate = cost(&current);
        evaluations += 1;
        let progress = evaluations as f64 / budget as f64;
        let temperature = t0 * (1.0 - progress).max(1e-3);
        let delta = candidate as f64 - current_cost as f64;
        let accept = delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp();
        if accept {
            current_cost = candidate;
            if candidate < best_cost {
                best_cost = candidate;
                best = current.clone();
            }
        } else {
            current.swap(i, j);
        }
    }
    AnnealResult {
        order: best,
        cost: best_cost,
        start_cost,
        evaluations,
    }
}
