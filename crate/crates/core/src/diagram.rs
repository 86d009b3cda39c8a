//! Canonical store for Weighted Positive Binary Decision Diagrams.
//!
//! A node `<x_i, C, W, hi, lo>` stands for
//! `(x_i ∨ ⋁C) ∧ W ∧ hi  ∨  lo`, where `C` holds siblings of `x_i` folded
//! in by the collapse rule and `W` is a set of symbolic weights on the
//! positive edge. Reduction applies the merge rule through a unique table and
//! the collapse rule at construction time. A node whose positive edge is ⊥
//! is replaced by its `lo` child.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::encode::{Lit, WeightId};
use crate::error::DiagramError;
use crate::order::LiteralOrdering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const FALSE: NodeId = NodeId(0);
    pub const TRUE: NodeId = NodeId(1);

    #[inline]
    pub fn is_terminal(self) -> bool {
        self.0 < 2
    }

    #[inline]
    fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub lit: Lit,
    /// Siblings merged into this node, ascending.
    pub collapsed: Vec<Lit>,
    /// Weights on the positive edge, sorted and deduplicated.
    pub weights: Vec<WeightId>,
    pub hi: NodeId,
    pub lo: NodeId,
}

impl Node {
    /// `lit` followed by the collapsed siblings.
    pub fn atoms(&self) -> impl Iterator<Item = Lit> + '_ {
        std::iter::once(self.lit).chain(self.collapsed.iter().copied())
    }

    pub fn covers(&self, atom: Lit) -> bool {
        self.lit == atom || self.collapsed.contains(&atom)
    }
}

#[derive(Debug, Clone)]
pub struct DiagramStore {
    ordering: LiteralOrdering,
    nodes: Vec<Node>,
    unique: HashMap<Node, NodeId>,
    collapse: bool,
}

impl DiagramStore {
    pub fn new(ordering: LiteralOrdering) -> Self {
        Self::with_collapse(ordering, true)
    }

    /// A store that applies only the merge rule when `collapse` is false.
    pub fn with_collapse(ordering: LiteralOrdering, collapse: bool) -> Self {
        let placeholder = Node {
            lit: Lit(0),
            collapsed: Vec::new(),
            weights: Vec::new(),
            hi: NodeId::FALSE,
            lo: NodeId::FALSE,
        };
        DiagramStore {
            ordering,
            nodes: vec![placeholder.clone(), placeholder],
            unique: HashMap::new(),
            collapse,
        }
    }

    pub fn ordering(&self) -> &LiteralOrdering {
        &self.ordering
    }

    pub fn collapse_enabled(&self) -> bool {
        self.collapse
    }

    /// Nodes allocated so far, terminals excluded.
    pub fn allocated(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn node(&self, id: NodeId) -> &Node {
        assert!(!id.is_terminal(), "terminals have no node record");
        &self.nodes[id.index()]
    }

    pub fn get(&self, id: NodeId) -> Option<&Node> {
        if id.is_terminal() {
            None
        } else {
            self.nodes.get(id.index())
        }
    }

    fn check(&self, id: NodeId) -> Result<(), DiagramError> {
        if id.index() < self.nodes.len() {
            Ok(())
        } else {
            Err(DiagramError::UnknownNode(id.0))
        }
    }

    /// Ordering position of the top literal, `usize::MAX` for terminals.
    pub fn top_position(&self, id: NodeId) -> usize {
        match self.get(id) {
            Some(n) => self.ordering.position(n.lit),
            None => usize::MAX,
        }
    }

    /// Variable tested at the root of `id`.
    pub fn top_var(&self, id: NodeId) -> Option<usize> {
        self.get(id).map(|n| self.ordering.var(n.lit))
    }

    /// Build (or find) the reduced node for `lit ∧ W ∧ hi ∨ lo`.
    pub fn make_node(
        &mut self,
        lit: Lit,
        weights: &[WeightId],
        hi: NodeId,
        lo: NodeId,
    ) -> Result<NodeId, DiagramError> {
        self.check(hi)?;
        self.check(lo)?;
        let var = self.ordering.var(lit);
        let pos = self.ordering.position(lit);
        if let Some(h) = self.get(hi) {
            if self.ordering.position(h.lit) <= pos || self.ordering.var(h.lit) == var {
                return Err(DiagramError::OrderingViolation { lit: lit.0, child: h.lit.0 });
            }
        }
        if let Some(l) = self.get(lo) {
            if self.ordering.position(l.lit) <= pos {
                return Err(DiagramError::OrderingViolation { lit: lit.0, child: l.lit.0 });
            }
        }

        // x ∧ ⊥ ∨ lo = lo
        if hi == NodeId::FALSE {
            return Ok(lo);
        }
        let mut weights = weights.to_vec();
        weights.sort_unstable();
        weights.dedup();

        let mut collapsed = Vec::new();
        let mut lo = lo;
        if self.collapse {
            if let Some(u) = self.get(lo) {
                if self.ordering.var(u.lit) == var && u.hi == hi && u.weights == weights {
                    collapsed.push(u.lit);
                    collapsed.extend_from_slice(&u.collapsed);
                    lo = u.lo;
                }
            }
        }
        let node = Node {
            lit,
            collapsed,
            weights,
            hi,
            lo,
        };
        if let Some(&id) = self.unique.get(&node) {
            return Ok(id);
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.unique.insert(node, id);
        Ok(id)
    }

    /// Copy the diagram rooted at `root` in `other` into this store.
    pub fn import(&mut self, other: &DiagramStore, root: NodeId) -> Result<NodeId, DiagramError> {
        if other.ordering != self.ordering {
            return Err(DiagramError::OrderingMismatch);
        }
        other.check(root)?;
        let mut map: HashMap<NodeId, NodeId> = HashMap::new();
        for id in other.postorder(root) {
            let n = other.node(id);
            let hi = if n.hi.is_terminal() { n.hi } else { map[&n.hi] };
            let lo = if n.lo.is_terminal() { n.lo } else { map[&n.lo] };
            // rebuild the sibling chain so this store's collapse setting applies
            let mut chain = lo;
            for &s in n.collapsed.iter().rev() {
                chain = self.make_node(s, &n.weights, hi, chain)?;
            }
            let new = self.make_node(n.lit, &n.weights, hi, chain)?;
            map.insert(id, new);
        }
        Ok(if root.is_terminal() { root } else { map[&root] })
    }

    /// Internal nodes reachable from `root`, children before parents, `hi`
    /// subtrees before `lo` subtrees. Deterministic for a given structure.
    pub fn postorder(&self, root: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        if root.is_terminal() {
            return out;
        }
        let mut seen = vec![false; self.nodes.len()];
        // (node, children pushed)
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                out.push(id);
                continue;
            }
            if seen[id.index()] {
                continue;
            }
            seen[id.index()] = true;
            let n = &self.nodes[id.index()];
            stack.push((id, true));
            for child in [n.lo, n.hi] {
                if !child.is_terminal() && !seen[child.index()] {
                    stack.push((child, false));
                }
            }
        }
        out
    }

    pub fn node_count(&self, root: NodeId) -> usize {
        self.postorder(root).len()
    }

    /// Variables appearing in the diagram rooted at `root`, in variable order.
    pub fn support(&self, root: NodeId) -> Vec<usize> {
        let mut present = vec![false; self.ordering.var_order().len()];
        for id in self.postorder(root) {
            present[self.ordering.var(self.node(id).lit)] = true;
        }
        self.ordering
            .var_order()
            .iter()
            .copied()
            .filter(|&v| present[v])
            .collect()
    }

    /// Deterministic text form: one line per node in post-order, ids
    /// renumbered from 2, then a `root` line.
    pub fn serialize(&self, root: NodeId) -> String {
        let order = self.postorder(root);
        let mut ids: HashMap<NodeId, u32> = HashMap::with_capacity(order.len());
        let mut out = String::new();
        let name = |ids: &HashMap<NodeId, u32>, id: NodeId| {
            if id.is_terminal() {
                id.0
            } else {
                ids[&id]
            }
        };
        for (k, &id) in order.iter().enumerate() {
            ids.insert(id, k as u32 + 2);
            let n = self.node(id);
            let _ = write!(out, "{} {}", k + 2, n.lit);
            for s in &n.collapsed {
                let _ = write!(out, " +{s}");
            }
            out.push_str(" W={");
            for (i, w) in n.weights.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", w.0);
            }
            let _ = writeln!(out, "}} {} {}", name(&ids, n.hi), name(&ids, n.lo));
        }
        let _ = writeln!(out, "root {}", name(&ids, root));
        out
    }

    /// Evaluate the diagram bottom-up with indicator values `lambda[lit]` and
    /// weight values `omega[weight]`.
    pub fn evaluate(&self, root: NodeId, lambda: &[f64], omega: &[f64]) -> f64 {
        let mut value: HashMap<NodeId, f64> = HashMap::new();
        let get = |value: &HashMap<NodeId, f64>, id: NodeId| match id {
            NodeId::FALSE => 0.0,
            NodeId::TRUE => 1.0,
            _ => value[&id],
        };
        for id in self.postorder(root) {
            let n = self.node(id);
            let indicator: f64 = n.atoms().map(|a| lambda[a.index()]).sum();
            let weight: f64 = n.weights.iter().map(|w| omega[w.index()]).product();
            let v = indicator * weight * get(&value, n.hi) + get(&value, n.lo);
            value.insert(id, v);
        }
        get(&value, root)
    }

    /// Follow the path selected by a full assignment (`values[var]` is a value
    /// index, atoms looked up through `atom_of`). Returns the weights collected
    /// on the way to ⊤, or `None` when the path ends in ⊥.
    pub fn path_weights<F>(&self, root: NodeId, atom_of: F) -> Option<Vec<WeightId>>
    where
        F: Fn(usize) -> Lit,
    {
        let mut weights = Vec::new();
        let mut id = root;
        loop {
            match id {
                NodeId::FALSE => return None,
                NodeId::TRUE => {
                    weights.sort_unstable();
                    return Some(weights);
                }
                _ => {
                    let n = self.node(id);
                    let var = self.ordering.var(n.lit);
                    if n.covers(atom_of(var)) {
                        weights.extend_from_slice(&n.weights);
                        id = n.hi;
                    } else {
                        id = n.lo;
                    }
                }
            }
        }
    }

    /// Structural audit of the diagram rooted at `root`: ordering along every
    /// edge, sibling-only collapsed sets, no collapsible parent/child pair,
    /// and no two distinct nodes with the same key.
    pub fn audit(&self, root: NodeId) -> Result<(), String> {
        let mut keys = HashMap::new();
        for id in self.postorder(root) {
            let n = self.node(id);
            let var = self.ordering.var(n.lit);
            let pos = self.ordering.position(n.lit);
            let mut prev = pos;
            for &s in &n.collapsed {
                if self.ordering.var(s) != var {
                    return Err(format!("node {} collapses non-sibling {s}", id.0));
                }
                if self.ordering.position(s) <= prev {
                    return Err(format!("node {} collapsed set out of order", id.0));
                }
                prev = self.ordering.position(s);
            }
            if let Some(h) = self.get(n.hi) {
                if self.ordering.position(h.lit) <= prev || self.ordering.var(h.lit) == var {
                    return Err(format!("node {} hi edge breaks the ordering", id.0));
                }
            }
            if let Some(l) = self.get(n.lo) {
                if self.ordering.position(l.lit) <= prev {
                    return Err(format!("node {} lo edge breaks the ordering", id.0));
                }
                if self.collapse
                    && self.ordering.var(l.lit) == var
                    && l.hi == n.hi
                    && l.weights == n.weights
                {
                    return Err(format!("node {} can still absorb its lo child", id.0));
                }
            }
            if n.hi == NodeId::FALSE {
                return Err(format!("node {} has a ⊥ positive edge", id.0));
            }
            if let Some(other) = keys.insert(n.clone(), id) {
                return Err(format!("nodes {} and {} are isomorphic", other.0, id.0));
            }
        }
        Ok(())
    }
}

/// `1 - with / without`: fraction of nodes removed by the collapse rule.
pub fn collapse_savings(without: usize, with: usize) -> f64 {
    if without == 0 {
        0.0
    } else {
        1.0 - with as f64 / without as f64
    }
}
