//! Marginal and conditional queries by weighted model counting on the
//! compiled circuit, and a brute-force enumeration oracle.

use crate::circuit::{to_circuit, Circuit};
use crate::compile::{compile, default_order, CompileOptions, Compiled};
use crate::encode::{encode, Encoding, Lit, Theory};
use crate::error::{DiagramError, InferError};
use crate::model::Network;
use crate::order::LiteralOrdering;
use crate::solver::{SolverState, Status};

/// Upper bound on joint states for [`brute_force_joint`].
pub const BRUTE_FORCE_LIMIT: u128 = 1 << 22;

/// Below this, `P(e)` counts as zero.
pub const ZERO_EVIDENCE: f64 = 1e-12;

/// Observed atoms, at most one per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence(pub Vec<Lit>);

impl Evidence {
    /// Parse `var=value` pairs.
    pub fn parse(theory: &Theory, pairs: &[(&str, &str)]) -> Result<Self, InferError> {
        pairs
            .iter()
            .map(|(v, x)| {
                theory
                    .atom_of(v, x)
                    .map_err(|_| InferError::UnknownAtom(format!("{v}={x}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Evidence)
    }
}

/// Indicator values for `evidence`: observed atoms and everything not
/// ruled out by the exactly-one theory stay at 1, implied negations are 0.
/// `None` when the evidence itself is contradictory.
pub fn apply_evidence(theory: &Theory, evidence: &[Lit]) -> Result<Option<Vec<f64>>, InferError> {
    let mut lambda = vec![1.0; theory.num_atoms() + 1];
    lambda[0] = f64::NAN;
    let empty = crate::encode::WeightedCnf {
        clauses: Vec::new(),
        weights: Vec::new(),
    };
    let mut solver = SolverState::new(&empty, theory);
    for &lit in evidence {
        if !theory.contains(lit) {
            return Err(InferError::UnknownAtom(lit.to_string()));
        }
        let out = solver.condition_positive(lit);
        let chosen = solver.theory_state().chosen(theory.var(lit));
        if out.status == Status::Contradiction || chosen != Some(lit) {
            return Ok(None);
        }
        for n in out.implied_negations {
            lambda[n.index()] = 0.0;
        }
    }
    Ok(Some(lambda))
}

/// A network compiled for repeated queries.
#[derive(Debug, Clone)]
pub struct Model {
    pub encoding: Encoding,
    pub ordering: LiteralOrdering,
    pub compiled: Compiled,
    pub circuit: Circuit,
    omega: Vec<f64>,
}

impl Model {
    pub fn build(net: &Network, opts: CompileOptions) -> Result<Self, DiagramError> {
        let encoding = encode(net);
        let ordering = default_order(net, &encoding.theory);
        Self::with_ordering(encoding, ordering, opts)
    }

    pub fn with_ordering(
        encoding: Encoding,
        ordering: LiteralOrdering,
        opts: CompileOptions,
    ) -> Result<Self, DiagramError> {
        let compiled = compile(&encoding.cnf, &encoding.theory, &ordering, opts)?;
        let circuit = to_circuit(&compiled.store, compiled.root);
        let omega = encoding.cnf.weight_values();
        Ok(Model {
            encoding,
            ordering,
            compiled,
            circuit,
            omega,
        })
    }

    pub fn theory(&self) -> &Theory {
        &self.encoding.theory
    }

    /// Weighted model count under `evidence`, i.e. `P(e)`.
    pub fn probability(&self, evidence: &[Lit]) -> Result<f64, InferError> {
        match apply_evidence(&self.encoding.theory, evidence)? {
            None => Ok(0.0),
            Some(lambda) => Ok(self.circuit.evaluate(&lambda, &self.omega)?),
        }
    }

    /// `P(target | evidence)`.
    pub fn query(&self, target: Lit, evidence: &[Lit]) -> Result<f64, InferError> {
        let pe = self.probability(evidence)?;
        if pe <= ZERO_EVIDENCE {
            return Err(InferError::ZeroEvidence(pe));
        }
        let mut joint = evidence.to_vec();
        joint.push(target);
        let pt = self.probability(&joint)?;
        Ok(pt / pe)
    }

    /// Circuit value with every indicator and weight set to one.
    pub fn unit_count(&self) -> f64 {
        let lambda = vec![1.0; self.encoding.theory.num_atoms() + 1];
        let omega = vec![1.0; self.omega.len()];
        self.circuit.evaluate(&lambda, &omega).expect("complete valuation")
    }
}

/// All joint states with their probabilities, last variable varying
/// fastest. Values are indices into each variable's domain.
pub fn brute_force_joint(net: &Network) -> Result<Vec<(Vec<usize>, f64)>, InferError> {
    let size = net.joint_size();
    if size > BRUTE_FORCE_LIMIT {
        return Err(InferError::TooLarge(size));
    }
    let n = net.num_variables();
    let dom: Vec<usize> = (0..n).map(|v| net.variable(v).domain_size()).collect();
    let mut out = Vec::with_capacity(size as usize);
    let mut values = vec![0usize; n];
    loop {
        let mut p = 1.0;
        for v in 0..n {
            let pv: Vec<usize> = net.parents(v).iter().map(|&u| values[u]).collect();
            p *= net.probability(v, net.row_index(v, &pv), values[v]);
        }
        out.push((values.clone(), p));
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            values[k] += 1;
            if values[k] < dom[k] {
                break;
            }
            values[k] = 0;
        }
    }
}

/// `P(target | evidence)` by enumeration; pairs are (variable, value index).
pub fn brute_force_query(
    net: &Network,
    target: (usize, usize),
    evidence: &[(usize, usize)],
) -> Result<f64, InferError> {
    let joint = brute_force_joint(net)?;
    conditional(&joint, target, evidence)
}

/// Conditional from a precomputed joint table.
pub fn conditional(
    joint: &[(Vec<usize>, f64)],
    target: (usize, usize),
    evidence: &[(usize, usize)],
) -> Result<f64, InferError> {
    let mut pe = 0.0;
    let mut pt = 0.0;
    for (values, p) in joint {
        if evidence.iter().all(|&(v, x)| values[v] == x) {
            pe += p;
            if values[target.0] == target.1 {
                pt += p;
            }
        }
    }
    if pe <= ZERO_EVIDENCE {
        return Err(InferError::ZeroEvidence(pe));
    }
    Ok(pt / pe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{example_network, random_network};

    #[test]
    fn example_joint() {
        let joint = brute_force_joint(&example_network()).unwrap();
        let expect = [0.15, 0.15, 0.2, 0.15, 0.15, 0.2];
        assert_eq!(joint.len(), 6);
        for ((_, p), e) in joint.iter().zip(expect) {
            assert!((p - e).abs() < 1e-12);
        }
    }

    #[test]
    fn example_queries() {
        let net = example_network();
        let m = Model::build(&net, CompileOptions::default()).unwrap();
        let th = m.theory();
        let b3 = th.atom_of("b", "3").unwrap();
        let a1 = th.atom_of("a", "1").unwrap();
        let a2 = th.atom_of("a", "2").unwrap();
        assert!((m.query(b3, &[]).unwrap() - 0.4).abs() < 1e-12);
        assert!((m.query(b3, &[a1]).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(m.query(a2, &[a1]).unwrap(), 0.0);
        assert!((m.probability(&[]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(m.unit_count(), 6.0);
    }

    #[test]
    fn zero_evidence_is_an_error() {
        let net = Network::new(
            vec![
                crate::model::Variable::new("a", &["t", "f"]),
                crate::model::Variable::new("b", &["t", "f"]),
            ],
            vec![
                crate::model::Cpt::new("a", &[], vec![1.0, 0.0]),
                crate::model::Cpt::new("b", &["a"], vec![0.5, 0.5, 0.5, 0.5]),
            ],
        )
        .unwrap();
        let m = Model::build(&net, CompileOptions::default()).unwrap();
        let af = m.theory().atom_of("a", "f").unwrap();
        let bt = m.theory().atom_of("b", "t").unwrap();
        assert!(matches!(m.query(bt, &[af]), Err(InferError::ZeroEvidence(_))));
        assert!(matches!(
            brute_force_query(&net, (1, 0), &[(0, 1)]),
            Err(InferError::ZeroEvidence(_))
        ));
    }

    #[test]
    fn evidence_masks_siblings() {
        let enc = encode(&example_network());
        let b2 = enc.theory.atom_of("b", "2").unwrap();
        let l = apply_evidence(&enc.theory, &[b2]).unwrap().unwrap();
        assert_eq!(&l[1..], &[1.0, 1.0, 0.0, 1.0, 0.0]);
        let a1 = enc.theory.atom_of("a", "1").unwrap();
        let a2 = enc.theory.atom_of("a", "2").unwrap();
        assert_eq!(apply_evidence(&enc.theory, &[a1, a2]).unwrap(), None);
        assert!(matches!(
            apply_evidence(&enc.theory, &[Lit(99)]),
            Err(InferError::UnknownAtom(_))
        ));
        assert!(matches!(
            Evidence::parse(&enc.theory, &[("b", "9")]),
            Err(InferError::UnknownAtom(_))
        ));
    }

    #[test]
    fn size_guard() {
        let net = random_network(1, 23, 2, 0);
        assert!(matches!(brute_force_joint(&net), Err(InferError::TooLarge(_))));
    }

    #[test]
    fn matches_oracle_on_random_networks() {
        for seed in 0..25 {
            let net = random_network(seed, 5, 3, 2);
            let m = Model::build(&net, CompileOptions::default()).unwrap();
            let joint = brute_force_joint(&net).unwrap();
            let th = m.theory();
            for v in 0..th.num_vars() {
                for x in 0..th.domain_size(v) {
                    let e = (0..th.num_vars()).find(|&u| u != v).map(|u| (u, 0));
                    let ev: Vec<_> = e.into_iter().collect();
                    let lits: Vec<Lit> = ev.iter().map(|&(u, k)| th.atom(u, k)).collect();
                    match (conditional(&joint, (v, x), &ev), m.query(th.atom(v, x), &lits)) {
                        (Ok(a), Ok(b)) => assert!((a - b).abs() <= 1e-9, "seed {seed}"),
                        (Err(_), Err(_)) => {}
                        other => panic!("seed {seed}: {other:?}"),
                    }
                }
            }
        }
    }
}
