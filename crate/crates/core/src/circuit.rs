//! Lowering of a WPBDD to an arithmetic circuit over indicator variables
//! λ and weight parameters ω.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::diagram::{DiagramStore, NodeId};
use crate::encode::{Lit, WeightId};
use crate::error::CircuitError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    Add(Vec<usize>),
    Mul(Vec<usize>),
    Indicator(Lit),
    Weight(WeightId),
    Const(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    gates: Vec<Gate>,
    output: usize,
}

struct Builder {
    gates: Vec<Gate>,
    index: HashMap<Gate, usize>,
}

impl Builder {
    fn add(&mut self, g: Gate) -> usize {
        if let Some(&i) = self.index.get(&g) {
            return i;
        }
        let i = self.gates.len();
        self.gates.push(g.clone());
        self.index.insert(g, i);
        i
    }

    fn sum(&mut self, mut xs: Vec<usize>) -> usize {
        if xs.len() == 1 {
            xs.pop().unwrap()
        } else {
            self.add(Gate::Add(xs))
        }
    }

    fn product(&mut self, mut xs: Vec<usize>) -> usize {
        if xs.len() == 1 {
            xs.pop().unwrap()
        } else {
            self.add(Gate::Mul(xs))
        }
    }
}

/// Each node becomes `(λx + Σ λc) · Π ω · val(hi) + val(lo)`, dropping
/// multiplications by ⊤ and additions of ⊥.
pub fn to_circuit(store: &DiagramStore, root: NodeId) -> Circuit {
    let mut b = Builder {
        gates: Vec::new(),
        index: HashMap::new(),
    };
    if root.is_terminal() {
        let out = b.add(Gate::Const(root == NodeId::TRUE));
        return Circuit {
            gates: b.gates,
            output: out,
        };
    }
    let mut val: HashMap<NodeId, usize> = HashMap::new();
    for id in store.postorder(root) {
        let n = store.node(id);
        let leaves: Vec<usize> = n.atoms().map(|a| b.add(Gate::Indicator(a))).collect();
        let mut factors = vec![b.sum(leaves)];
        factors.extend(n.weights.iter().map(|&w| b.add(Gate::Weight(w))));
        if n.hi != NodeId::TRUE {
            factors.push(val[&n.hi]);
        }
        let term = b.product(factors);
        let v = if n.lo == NodeId::FALSE {
            term
        } else {
            b.sum(vec![term, val[&n.lo]])
        };
        val.insert(id, v);
    }
    let output = val[&root];
    Circuit {
        gates: b.gates,
        output,
    }
}

impl Circuit {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Binary operations needed to evaluate the circuit: an n-ary gate
    /// counts n − 1.
    pub fn operator_count(&self) -> usize {
        self.gates
            .iter()
            .map(|g| match g {
                Gate::Add(c) | Gate::Mul(c) => c.len() - 1,
                _ => 0,
            })
            .sum()
    }

    /// Evaluate with `lambda[lit]` and `omega[weight]` (slot 0 of each
    /// unused).
    pub fn evaluate(&self, lambda: &[f64], omega: &[f64]) -> Result<f64, CircuitError> {
        let mut v = vec![0.0f64; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            v[i] = match g {
                Gate::Add(c) => c.iter().map(|&k| v[k]).sum(),
                Gate::Mul(c) => c.iter().map(|&k| v[k]).product(),
                Gate::Indicator(l) => match lambda.get(l.index()) {
                    Some(x) if !x.is_nan() => *x,
                    _ => return Err(CircuitError::IncompleteValuation(format!("no value for λ{l}"))),
                },
                Gate::Weight(w) => match omega.get(w.index()) {
                    Some(x) if !x.is_nan() => *x,
                    _ => return Err(CircuitError::IncompleteValuation(format!("no value for {w}"))),
                },
                Gate::Const(c) => f64::from(u8::from(*c)),
            };
        }
        Ok(v[self.output])
    }

    /// One gate per line: `id + c..`, `id * c..`, `id L lit`, `id W w`,
    /// `id C 0|1`, then `out <id>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, g) in self.gates.iter().enumerate() {
            let _ = match g {
                Gate::Add(c) => writeln!(out, "{i} + {}", join(c)),
                Gate::Mul(c) => writeln!(out, "{i} * {}", join(c)),
                Gate::Indicator(l) => writeln!(out, "{i} L {l}"),
                Gate::Weight(w) => writeln!(out, "{i} W {}", w.0),
                Gate::Const(c) => writeln!(out, "{i} C {}", u8::from(*c)),
            };
        }
        let _ = writeln!(out, "out {}", self.output);
        out
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
