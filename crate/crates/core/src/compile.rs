//! Compilation of a weighted CNF (with its exactly-one theory) into a
//! WPBDD, either in one depth-first pass or per CPT followed by conjunction.

use std::collections::HashMap;

use crate::diagram::{DiagramStore, NodeId};
use crate::encode::{encode, Lit, Theory, WeightId, WeightedCnf};
use crate::error::{DiagramError, OrderError};
use crate::model::Network;
use crate::order::{anneal, AnnealResult, LiteralOrdering};
use crate::solver::{SolverState, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Full,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    pub collapse: bool,
    pub use_cache: bool,
    pub mode: Mode,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            collapse: true,
            use_cache: true,
            mode: Mode::Full,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompileStats {
    /// Subproblems expanded (cache misses).
    pub expansions: usize,
    pub cache_hits: usize,
    /// For each weight, the variable whose positive branch fired it first
    /// (by ordering rank), if it ever fired.
    pub fire_var: Vec<Option<usize>>,
}

/// A compiled diagram together with the store that owns it.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub store: DiagramStore,
    pub root: NodeId,
    pub stats: CompileStats,
}

impl Compiled {
    pub fn node_count(&self) -> usize {
        self.store.node_count(self.root)
    }

    pub fn serialize(&self) -> String {
        self.store.serialize(self.root)
    }
}

type CacheBucket = Vec<(Box<[u64]>, NodeId)>;

struct Compiler<'a, 's> {
    solver: SolverState<'a>,
    ordering: &'s LiteralOrdering,
    store: &'s mut DiagramStore,
    cache: HashMap<(u32, u64), CacheBucket>,
    use_cache: bool,
    stats: CompileStats,
}

impl Compiler<'_, '_> {
    fn run(&mut self, pos: usize) -> Result<NodeId, DiagramError> {
        if pos == self.ordering.len() {
            return Ok(NodeId::TRUE);
        }
        let key = (pos as u32, self.solver.clause_state().open_hash());
        if self.use_cache {
            if let Some(bucket) = self.cache.get(&key) {
                let bits = self.solver.clause_state().open_bits();
                if let Some((_, id)) = bucket.iter().find(|(b, _)| &b[..] == bits) {
                    self.stats.cache_hits += 1;
                    return Ok(*id);
                }
            }
        }
        self.stats.expansions += 1;
        let lit = self.ordering.at(pos);
        let var = self.ordering.var(lit);

        let mark = self.solver.snapshot();
        let pos_out = self.solver.condition_positive(lit);
        let (hi, weights) = match pos_out.status {
            Status::Contradiction => (NodeId::FALSE, Vec::new()),
            _ => {
                let rank = self.ordering.var_rank(var);
                for w in &pos_out.fired_weights {
                    let slot = &mut self.stats.fire_var[w.index() - 1];
                    if slot.is_none() {
                        *slot = Some(rank);
                    }
                }
                let hi = self.run(self.ordering.block_end(var))?;
                (hi, pos_out.fired_weights)
            }
        };
        self.solver.undo_to(mark).expect("mark taken on this trail");

        let neg_out = self.solver.condition_negative(lit);
        let lo = match neg_out.status {
            Status::Contradiction => NodeId::FALSE,
            _ => self.run(pos + 1)?,
        };
        self.solver.undo_to(mark).expect("mark taken on this trail");

        let id = self.store.make_node(lit, &weights, hi, lo)?;
        if self.use_cache {
            let bits = self.solver.clause_state().open_bits().into();
            self.cache.entry(key).or_default().push((bits, id));
        }
        Ok(id)
    }
}

/// Compile `cnf` into `store` by depth-first search over the literal
/// ordering with memoization on the set of open clauses.
pub fn compile_into(
    store: &mut DiagramStore,
    cnf: &WeightedCnf,
    theory: &Theory,
    use_cache: bool,
) -> Result<(NodeId, CompileStats), DiagramError> {
    let ordering = store.ordering().clone();
    let mut c = Compiler {
        solver: SolverState::new(cnf, theory),
        ordering: &ordering,
        store,
        cache: HashMap::new(),
        use_cache,
        stats: CompileStats {
            fire_var: vec![None; cnf.num_weights()],
            ..CompileStats::default()
        },
    };
    let root = c.run(0)?;
    Ok((root, c.stats))
}

pub fn compile_full(
    cnf: &WeightedCnf,
    theory: &Theory,
    ordering: &LiteralOrdering,
    opts: CompileOptions,
) -> Result<Compiled, DiagramError> {
    let mut store = DiagramStore::with_collapse(ordering.clone(), opts.collapse);
    let (root, stats) = compile_into(&mut store, cnf, theory, opts.use_cache)?;
    Ok(Compiled { store, root, stats })
}

/// Compile the clauses of the CPT of variable `owner` alone.
pub fn compile_cpt(
    store: &mut DiagramStore,
    cnf: &WeightedCnf,
    theory: &Theory,
    owner: usize,
) -> Result<NodeId, DiagramError> {
    let part = cnf.restrict_to_owner(owner);
    let (root, _) = compile_into(store, &part, theory, true)?;
    Ok(root)
}

/// Conjunction of two diagrams in the same store. Weights on coinciding
/// positive edges are united.
pub fn conjoin(store: &mut DiagramStore, a: NodeId, b: NodeId) -> Result<NodeId, DiagramError> {
    let mut cache = HashMap::new();
    conjoin_cached(store, a, b, &mut cache)
}

fn cofactor(store: &DiagramStore, d: NodeId, var: usize, atom: Lit) -> (Vec<WeightId>, NodeId) {
    let mut cur = d;
    while let Some(n) = store.get(cur) {
        if store.ordering().var(n.lit) != var {
            break;
        }
        if n.covers(atom) {
            return (n.weights.clone(), n.hi);
        }
        cur = n.lo;
    }
    if cur == d {
        // d does not test var
        (Vec::new(), d)
    } else {
        (Vec::new(), NodeId::FALSE)
    }
}

/// End of the sibling chain of `var` at the root of `d`.
fn chain_end(store: &DiagramStore, d: NodeId, var: usize) -> NodeId {
    let mut cur = d;
    while let Some(n) = store.get(cur) {
        if store.ordering().var(n.lit) != var {
            break;
        }
        cur = n.lo;
    }
    cur
}

fn conjoin_cached(
    store: &mut DiagramStore,
    a: NodeId,
    b: NodeId,
    cache: &mut HashMap<(NodeId, NodeId), NodeId>,
) -> Result<NodeId, DiagramError> {
    if a == NodeId::FALSE || b == NodeId::FALSE {
        return Ok(NodeId::FALSE);
    }
    if a == NodeId::TRUE {
        return Ok(b);
    }
    if b == NodeId::TRUE || a == b {
        return Ok(a);
    }
    let key = if a < b { (a, b) } else { (b, a) };
    if let Some(&r) = cache.get(&key) {
        return Ok(r);
    }
    let ord = store.ordering().clone();
    let x = if store.top_position(a) <= store.top_position(b) {
        store.top_var(a).expect("internal node")
    } else {
        store.top_var(b).expect("internal node")
    };
    let ends = (chain_end(store, a, x), chain_end(store, b, x));
    let mut next = if store.top_var(a) == Some(x) && store.top_var(b) == Some(x) {
        conjoin_cached(store, ends.0, ends.1, cache)?
    } else if store.top_var(a) == Some(x) {
        conjoin_cached(store, ends.0, b, cache)?
    } else {
        conjoin_cached(store, a, ends.1, cache)?
    };
    for &atom in ord.block(x).iter().rev() {
        let (wa, ca) = cofactor(store, a, x, atom);
        let (wb, cb) = cofactor(store, b, x, atom);
        let hi = conjoin_cached(store, ca, cb, cache)?;
        let mut w = wa;
        w.extend(wb);
        next = store.make_node(atom, &w, hi, next)?;
    }
    cache.insert(key, next);
    Ok(next)
}

/// Compile each CPT separately into a shared store and conjoin the results.
pub fn compile_hybrid(
    cnf: &WeightedCnf,
    theory: &Theory,
    ordering: &LiteralOrdering,
    opts: CompileOptions,
) -> Result<Compiled, DiagramError> {
    let mut store = DiagramStore::with_collapse(ordering.clone(), opts.collapse);
    let mut owners: Vec<usize> = cnf.clauses.iter().map(|c| c.owner).collect();
    owners.sort_unstable();
    owners.dedup();
    let mut root = if owners.is_empty() {
        // no clauses: the theory alone
        compile_into(&mut store, cnf, theory, true)?.0
    } else {
        NodeId::TRUE
    };
    for owner in owners {
        let part = compile_cpt(&mut store, cnf, theory, owner)?;
        root = conjoin(&mut store, root, part)?;
    }
    let fire_var = compile_full(cnf, theory, ordering, CompileOptions { mode: Mode::Full, ..opts })?
        .stats
        .fire_var;
    Ok(Compiled {
        store,
        root,
        stats: CompileStats {
            fire_var,
            ..CompileStats::default()
        },
    })
}

pub fn compile(
    cnf: &WeightedCnf,
    theory: &Theory,
    ordering: &LiteralOrdering,
    opts: CompileOptions,
) -> Result<Compiled, DiagramError> {
    match opts.mode {
        Mode::Full => compile_full(cnf, theory, ordering, opts),
        Mode::Hybrid => compile_hybrid(cnf, theory, ordering, opts),
    }
}

/// Variable order used when none is given: the network's topological order.
pub fn default_order(net: &Network, theory: &Theory) -> LiteralOrdering {
    LiteralOrdering::from_var_order(theory, &net.topological_order())
        .expect("topological order is a permutation")
}

/// Search for a variable order with fewer diagram nodes, starting from the
/// topological order.
pub fn anneal_order(net: &Network, seed: u64, budget: usize) -> Result<AnnealResult, OrderError> {
    let enc = encode(net);
    let start = net.topological_order();
    let result = anneal(&start, seed, budget, |order| {
        let ord = LiteralOrdering::from_var_order(&enc.theory, order).expect("permutation");
        compile_full(&enc.cnf, &enc.theory, &ord, CompileOptions::default())
            .expect("compilation under a valid ordering")
            .node_count()
    });
    Ok(result)
}
