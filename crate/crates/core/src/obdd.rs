//! Plain OBDD compilation of the same encoding, with the exactly-one
//! constraints written out as clauses and weights as Boolean variables.
//! Used as a size baseline.

use std::collections::HashMap;

use crate::compile::CompileStats;
use crate::encode::{Lit, Theory, WeightId, WeightedCnf};
use crate::error::ObddError;
use crate::order::LiteralOrdering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BddVar {
    Atom(Lit),
    Weight(WeightId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct BddNode {
    level: u32,
    lo: u32,
    hi: u32,
}

const FALSE: u32 = 0;
const TRUE: u32 = 1;

/// Reduced ordered BDD manager with a unique table and memoized AND.
#[derive(Debug, Clone)]
pub struct Bdd {
    order: Vec<BddVar>,
    nodes: Vec<BddNode>,
    unique: HashMap<BddNode, u32>,
    and_cache: HashMap<(u32, u32), u32>,
}

impl Bdd {
    pub fn new(order: Vec<BddVar>) -> Self {
        let term = BddNode {
            level: u32::MAX,
            lo: 0,
            hi: 0,
        };
        Bdd {
            order,
            nodes: vec![term, term],
            unique: HashMap::new(),
            and_cache: HashMap::new(),
        }
    }

    pub fn order(&self) -> &[BddVar] {
        &self.order
    }

    fn level(&self, f: u32) -> u32 {
        self.nodes[f as usize].level
    }

    fn mk(&mut self, level: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        let n = BddNode { level, lo, hi };
        if let Some(&id) = self.unique.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.unique.insert(n, id);
        id
    }

    pub fn and(&mut self, f: u32, g: u32) -> u32 {
        if f == FALSE || g == FALSE {
            return FALSE;
        }
        if f == TRUE {
            return g;
        }
        if g == TRUE || f == g {
            return f;
        }
        let key = if f < g { (f, g) } else { (g, f) };
        if let Some(&r) = self.and_cache.get(&key) {
            return r;
        }
        let (lf, lg) = (self.level(f), self.level(g));
        let level = lf.min(lg);
        let (f0, f1) = if lf == level {
            (self.nodes[f as usize].lo, self.nodes[f as usize].hi)
        } else {
            (f, f)
        };
        let (g0, g1) = if lg == level {
            (self.nodes[g as usize].lo, self.nodes[g as usize].hi)
        } else {
            (g, g)
        };
        let lo = self.and(f0, g0);
        let hi = self.and(f1, g1);
        let r = self.mk(level, lo, hi);
        self.and_cache.insert(key, r);
        r
    }

    /// Disjunction of literals given as (level, polarity).
    pub fn clause(&mut self, lits: &[(u32, bool)]) -> u32 {
        let mut lits = lits.to_vec();
        lits.sort_unstable();
        let mut f = FALSE;
        for &(level, positive) in lits.iter().rev() {
            f = if positive {
                self.mk(level, f, TRUE)
            } else {
                self.mk(level, TRUE, f)
            };
        }
        f
    }

    fn reachable(&self, root: u32) -> Vec<u32> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![root];
        let mut out = Vec::new();
        while let Some(f) = stack.pop() {
            if f <= TRUE || seen[f as usize] {
                continue;
            }
            seen[f as usize] = true;
            out.push(f);
            let n = self.nodes[f as usize];
            stack.push(n.lo);
            stack.push(n.hi);
        }
        out
    }

    pub fn node_count(&self, root: u32) -> usize {
        self.reachable(root).len()
    }

    /// Operations of the arithmetic circuit `λ(x)·hi + λ(¬x)·lo` per node,
    /// dropping ⊥ terms and multiplications by ⊤.
    pub fn operator_count(&self, root: u32) -> usize {
        self.reachable(root)
            .into_iter()
            .map(|f| {
                let n = self.nodes[f as usize];
                let terms = [n.hi, n.lo].into_iter().filter(|&c| c != FALSE);
                let muls = terms.clone().filter(|&c| c != TRUE).count();
                let adds = usize::from(terms.count() == 2);
                muls + adds
            })
            .sum()
    }

    /// Number of satisfying assignments over all variables of the order.
    pub fn sat_count(&self, root: u32) -> u128 {
        let n = self.order.len() as u32;
        let mut memo: HashMap<u32, u128> = HashMap::new();
        self.count(root, &mut memo) << self.top_level(root, n)
    }

    fn top_level(&self, f: u32, n: u32) -> u32 {
        if f <= TRUE {
            n
        } else {
            self.level(f)
        }
    }

    // models of the variables at or below the level of f
    fn count(&self, f: u32, memo: &mut HashMap<u32, u128>) -> u128 {
        let n = self.order.len() as u32;
        match f {
            FALSE => 0,
            TRUE => 1,
            _ => {
                if let Some(&c) = memo.get(&f) {
                    return c;
                }
                let node = self.nodes[f as usize];
                let lo = self.count(node.lo, memo) << (self.top_level(node.lo, n) - node.level - 1);
                let hi = self.count(node.hi, memo) << (self.top_level(node.hi, n) - node.level - 1);
                memo.insert(f, lo + hi);
                lo + hi
            }
        }
    }
}

/// Atoms in literal order, each weight placed right after the block of the
/// variable where the WPBDD compiler fires it (ties by weight id). Weights
/// that never fire go last.
pub fn obdd_order(ordering: &LiteralOrdering, cnf: &WeightedCnf, stats: &CompileStats) -> Vec<BddVar> {
    let mut out = Vec::new();
    for (rank, &v) in ordering.var_order().iter().enumerate() {
        out.extend(ordering.block(v).iter().map(|&a| BddVar::Atom(a)));
        for w in &cnf.weights {
            if stats.fire_var.get(w.id.index() - 1).copied().flatten() == Some(rank) {
                out.push(BddVar::Weight(w.id));
            }
        }
    }
    for w in &cnf.weights {
        if stats.fire_var.get(w.id.index() - 1).copied().flatten().is_none() {
            out.push(BddVar::Weight(w.id));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Obdd {
    pub bdd: Bdd,
    pub root: u32,
}

impl Obdd {
    pub fn node_count(&self) -> usize {
        self.bdd.node_count(self.root)
    }

    pub fn operator_count(&self) -> usize {
        self.bdd.operator_count(self.root)
    }
}

fn exactly_one(bdd: &mut Bdd, theory: &Theory, level: &HashMap<BddVar, u32>) -> Vec<u32> {
    let mut out = Vec::new();
    for v in 0..theory.num_vars() {
        let atoms: Vec<u32> = theory.atoms(v).map(|a| level[&BddVar::Atom(a)]).collect();
        let alo: Vec<(u32, bool)> = atoms.iter().map(|&l| (l, true)).collect();
        out.push(bdd.clause(&alo));
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                out.push(bdd.clause(&[(atoms[i], false), (atoms[j], false)]));
            }
        }
    }
    out
}

fn levels(theory: &Theory, cnf: &WeightedCnf, order: &[BddVar]) -> Result<HashMap<BddVar, u32>, ObddError> {
    let level: HashMap<BddVar, u32> = order.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    for a in theory.all_atoms() {
        if !level.contains_key(&BddVar::Atom(a)) {
            return Err(ObddError::OrderingIncomplete(theory.describe(a)));
        }
    }
    for w in &cnf.weights {
        if !level.contains_key(&BddVar::Weight(w.id)) {
            return Err(ObddError::OrderingIncomplete(w.id.to_string()));
        }
    }
    Ok(level)
}

/// Compile the exactly-one clauses alone.
pub fn compile_theory(theory: &Theory, order: Vec<BddVar>) -> Result<Obdd, ObddError> {
    let empty = WeightedCnf {
        clauses: Vec::new(),
        weights: Vec::new(),
    };
    let level = levels(theory, &empty, &order)?;
    let mut bdd = Bdd::new(order);
    let parts = exactly_one(&mut bdd, theory, &level);
    let root = conjoin_all(&mut bdd, parts);
    Ok(Obdd { bdd, root })
}

/// Compile the exactly-one clauses, the weighted clauses `(¬x ∨ … ∨ ω)` and
/// the hard clauses under `order`.
pub fn compile_obdd(theory: &Theory, cnf: &WeightedCnf, order: Vec<BddVar>) -> Result<Obdd, ObddError> {
    let level = levels(theory, cnf, &order)?;
    let mut bdd = Bdd::new(order);
    let mut parts = exactly_one(&mut bdd, theory, &level);
    for c in &cnf.clauses {
        let mut lits: Vec<(u32, bool)> = c.atoms.iter().map(|a| (level[&BddVar::Atom(*a)], false)).collect();
        if let Some(w) = c.weight {
            lits.push((level[&BddVar::Weight(w)], true));
        }
        parts.push(bdd.clause(&lits));
    }
    let root = conjoin_all(&mut bdd, parts);
    Ok(Obdd { bdd, root })
}

// conjoin bottom-up so intermediate results stay small
fn conjoin_all(bdd: &mut Bdd, mut parts: Vec<u32>) -> u32 {
    parts.sort_by_key(|&f| std::cmp::Reverse(bdd.top_level(f, u32::MAX)));
    let mut acc = TRUE;
    for f in parts {
        acc = bdd.and(acc, f);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{compile, default_order, CompileOptions};
    use crate::encode::encode;
    use crate::model::{example_network, random_network};

    #[test]
    fn theory_model_count_is_product_of_domains() {
        for seed in 0..10 {
            let net = random_network(seed, 5, 4, 2);
            let enc = encode(&net);
            let ord = default_order(&net, &enc.theory);
            let order: Vec<BddVar> = ord.lits().iter().map(|&a| BddVar::Atom(a)).collect();
            let o = compile_theory(&enc.theory, order).unwrap();
            assert_eq!(o.bdd.sat_count(o.root), net.joint_size());
        }
    }

    #[test]
    fn exactly_one_grows_with_domain() {
        // one PBDD node for an unconstrained variable against a chain here
        let mut prev = 0;
        for d in 2..=6usize {
            let labels: Vec<String> = (0..d).map(|k| k.to_string()).collect();
            let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
            let net = crate::model::Network::new(
                vec![crate::model::Variable::new("x", &refs)],
                vec![crate::model::Cpt::new("x", &[], vec![1.0 / d as f64; d])],
            )
            .unwrap();
            let enc = encode(&net);
            let order: Vec<BddVar> = enc.theory.all_atoms().map(BddVar::Atom).collect();
            let o = compile_theory(&enc.theory, order).unwrap();
            assert!(o.node_count() > prev);
            assert!(o.node_count() > 1);
            prev = o.node_count();
        }
    }

    #[test]
    fn missing_variable_is_reported() {
        let enc = encode(&example_network());
        let order = vec![BddVar::Atom(Lit(1))];
        assert!(matches!(
            compile_obdd(&enc.theory, &enc.cnf, order),
            Err(ObddError::OrderingIncomplete(_))
        ));
    }

    #[test]
    fn example_baseline_is_larger() {
        let net = example_network();
        let enc = encode(&net);
        let ord = default_order(&net, &enc.theory);
        let c = compile(&enc.cnf, &enc.theory, &ord, CompileOptions::default()).unwrap();
        let order = obdd_order(&ord, &enc.cnf, &c.stats);
        assert_eq!(order.len(), 5 + 3);
        let o = compile_obdd(&enc.theory, &enc.cnf, order).unwrap();
        let ac = crate::circuit::to_circuit(&c.store, c.root);
        assert!(ac.operator_count() < o.operator_count());
        assert!(c.node_count() < o.node_count());
    }
}
