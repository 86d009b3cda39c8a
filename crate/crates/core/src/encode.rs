//! Weighted direct encoding of a network.
//!
//! Every variable `x` gets one atom per value. CPT entries become clauses
//! over negated atoms carrying a symbolic weight; the at-least-one and
//! at-most-one constraints over each variable's atoms are not emitted as
//! clauses but kept as a [`Theory`] that the solver handles natively.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::error::EncodeError;
use crate::model::Network;

/// Atom `x_i` meaning "variable x takes its i-th value". Ids start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(pub u32);

impl Lit {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Symbolic weight `w_k`. Ids start at 1 and are unique per (CPT, probability).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightId(pub u32);

impl WeightId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for WeightId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    pub id: WeightId,
    /// Variable whose CPT owns the weight.
    pub owner: usize,
    pub value: f64,
}

/// Clause `(¬l1 ∨ ... ∨ ¬lk)`. Only the atoms are stored: every literal of
/// an encoded clause is negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedClause {
    /// Atoms in ascending id order.
    pub atoms: Vec<Lit>,
    /// `None` for a hard clause (a zero probability).
    pub weight: Option<WeightId>,
    /// Variable whose CPT produced the clause.
    pub owner: usize,
}

/// Bijection between (variable, value) pairs and atoms, plus the per-variable
/// atom ranges that make up the constraint theory.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    names: Vec<String>,
    labels: Vec<Vec<String>>,
    first: Vec<u32>,
    // var_of[lit] for lit in 1..=num_atoms; slot 0 unused
    var_of: Vec<u32>,
}

impl Theory {
    pub fn new(net: &Network) -> Self {
        let mut first = Vec::with_capacity(net.num_variables());
        let mut var_of = vec![u32::MAX];
        let mut next = 1u32;
        for (v, var) in net.variables().iter().enumerate() {
            first.push(next);
            for _ in 0..var.domain_size() {
                var_of.push(v as u32);
                next += 1;
            }
        }
        Theory {
            names: net.variables().iter().map(|v| v.name.clone()).collect(),
            labels: net.variables().iter().map(|v| v.values.clone()).collect(),
            first,
            var_of,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.first.len()
    }

    pub fn num_atoms(&self) -> usize {
        self.var_of.len() - 1
    }

    pub fn domain_size(&self, v: usize) -> usize {
        self.labels[v].len()
    }

    pub fn var_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn var(&self, lit: Lit) -> usize {
        self.var_of[lit.index()] as usize
    }

    /// Position of `lit` within its variable's domain.
    #[inline]
    pub fn value(&self, lit: Lit) -> usize {
        (lit.0 - self.first[self.var(lit)]) as usize
    }

    #[inline]
    pub fn atom(&self, v: usize, value: usize) -> Lit {
        debug_assert!(value < self.domain_size(v));
        Lit(self.first[v] + value as u32)
    }

    /// All atoms of variable `v` in domain order.
    pub fn atoms(&self, v: usize) -> impl Iterator<Item = Lit> + Clone {
        let start = self.first[v];
        (start..start + self.labels[v].len() as u32).map(Lit)
    }

    pub fn all_atoms(&self) -> impl Iterator<Item = Lit> {
        (1..=self.num_atoms() as u32).map(Lit)
    }

    pub fn contains(&self, lit: Lit) -> bool {
        lit.0 >= 1 && lit.index() <= self.num_atoms()
    }

    pub fn atom_of(&self, var: &str, value: &str) -> Result<Lit, EncodeError> {
        let v = self
            .var_index(var)
            .ok_or_else(|| EncodeError::UnknownAtom(format!("{var}={value}")))?;
        let k = self.labels[v]
            .iter()
            .position(|l| l == value)
            .ok_or_else(|| EncodeError::UnknownAtom(format!("{var}={value}")))?;
        Ok(self.atom(v, k))
    }

    pub fn var_of(&self, lit: Lit) -> Result<(&str, &str), EncodeError> {
        if !self.contains(lit) {
            return Err(EncodeError::UnknownAtom(lit.to_string()));
        }
        let v = self.var(lit);
        Ok((&self.names[v], &self.labels[v][self.value(lit)]))
    }

    /// Human readable `name=value` for an atom.
    pub fn describe(&self, lit: Lit) -> String {
        match self.var_of(lit) {
            Ok((n, l)) => format!("{n}={l}"),
            Err(_) => format!("?{lit}"),
        }
    }

    /// Number of ALO + AMO clauses the theory replaces.
    pub fn elided_clause_count(&self) -> usize {
        self.labels
            .iter()
            .map(|l| {
                let n = l.len();
                1 + n * (n - 1) / 2
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCnf {
    pub clauses: Vec<WeightedClause>,
    /// `weights[k - 1]` describes `WeightId(k)`.
    pub weights: Vec<Weight>,
}

impl WeightedCnf {
    pub fn weight(&self, id: WeightId) -> &Weight {
        &self.weights[id.index() - 1]
    }

    pub fn num_weights(&self) -> usize {
        self.weights.len()
    }

    pub fn weighted_clauses(&self) -> impl Iterator<Item = &WeightedClause> {
        self.clauses.iter().filter(|c| c.weight.is_some())
    }

    pub fn hard_clauses(&self) -> impl Iterator<Item = &WeightedClause> {
        self.clauses.iter().filter(|c| c.weight.is_none())
    }

    /// Restriction to the clauses produced by one variable's CPT. Weight ids
    /// and the weight table are kept as-is.
    pub fn restrict_to_owner(&self, owner: usize) -> WeightedCnf {
        WeightedCnf {
            clauses: self
                .clauses
                .iter()
                .filter(|c| c.owner == owner)
                .cloned()
                .collect(),
            weights: self.weights.clone(),
        }
    }

    /// Probability value per weight, indexed by `WeightId::index()`; slot 0
    /// is unused.
    pub fn weight_values(&self) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(self.weights.iter().map(|w| w.value))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CptSharing {
    pub variable: String,
    pub entries: usize,
    pub distinct_weights: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodingStats {
    pub num_weighted_clauses: usize,
    pub num_hard_clauses: usize,
    pub num_theory_clauses_elided: usize,
    pub num_distinct_weights: usize,
    pub num_deterministic_zero: usize,
    pub num_deterministic_one: usize,
    pub per_cpt_sharing: Vec<CptSharing>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Encode zero probabilities as hard clauses. When false they become
    /// ordinary weighted clauses whose weight evaluates to 0.
    pub zero_as_hard: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { zero_as_hard: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub cnf: WeightedCnf,
    pub theory: Theory,
    pub stats: EncodingStats,
}

pub fn encode(net: &Network) -> Encoding {
    encode_with(net, EncodeOptions::default())
}

/// Tables are visited in variable declaration order, so weight ids do not
/// depend on the order in which CPTs were listed in the input.
pub fn encode_with(net: &Network, opts: EncodeOptions) -> Encoding {
    let theory = Theory::new(net);
    let mut clauses = Vec::new();
    let mut weights: Vec<Weight> = Vec::new();
    let mut zeros = 0;
    let mut ones = 0;
    let mut sharing = Vec::with_capacity(net.num_variables());

    for v in 0..net.num_variables() {
        let parents = net.parents(v);
        let table = &net.cpt(v).table;
        // keyed on the bit pattern: equality is exact
        let mut local: HashMap<u64, WeightId> = HashMap::new();
        for (idx, &p) in table.iter().enumerate() {
            let (row, value) = net.split_table_index(v, idx);
            if p == 1.0 {
                ones += 1;
                continue;
            }
            let hard = p == 0.0 && opts.zero_as_hard;
            if p == 0.0 {
                zeros += 1;
            }
            let mut atoms: Vec<Lit> = net
                .row_assignment(v, row)
                .iter()
                .zip(parents)
                .map(|(&val, &pv)| theory.atom(pv, val))
                .collect();
            atoms.push(theory.atom(v, value));
            atoms.sort_unstable();
            let weight = if hard {
                None
            } else {
                let next = WeightId(weights.len() as u32 + 1);
                let id = *local.entry(p.to_bits()).or_insert(next);
                if id == next {
                    weights.push(Weight {
                        id,
                        owner: v,
                        value: p,
                    });
                }
                Some(id)
            };
            clauses.push(WeightedClause {
                atoms,
                weight,
                owner: v,
            });
        }
        sharing.push(CptSharing {
            variable: net.variable(v).name.clone(),
            entries: table.len(),
            distinct_weights: local.len(),
        });
    }

    let stats = EncodingStats {
        num_weighted_clauses: clauses.iter().filter(|c| c.weight.is_some()).count(),
        num_hard_clauses: clauses.iter().filter(|c| c.weight.is_none()).count(),
        num_theory_clauses_elided: theory.elided_clause_count(),
        num_distinct_weights: weights.len(),
        num_deterministic_zero: zeros,
        num_deterministic_one: ones,
        per_cpt_sharing: sharing,
    };
    Encoding {
        cnf: WeightedCnf { clauses, weights },
        theory,
        stats,
    }
}

/// Text dump used by the `encode` subcommand.
pub fn dump(enc: &Encoding) -> String {
    let mut out = String::new();
    let th = &enc.theory;
    for v in 0..th.num_vars() {
        let mut atoms = th.atoms(v);
        let first = atoms.next().expect("non-empty domain");
        let last = atoms.last().unwrap_or(first);
        let _ = writeln!(out, "var {} atoms {}..{}", th.var_name(v), first, last);
    }
    for w in &enc.cnf.weights {
        let _ = writeln!(out, "{} = {}", w.id, w.value);
    }
    for c in &enc.cnf.clauses {
        match c.weight {
            Some(w) => {
                let _ = write!(out, "{w}:");
            }
            None => out.push_str("H:"),
        }
        for a in &c.atoms {
            let _ = write!(out, " -{a}");
        }
        out.push('\n');
    }
    let s = &enc.stats;
    let _ = writeln!(out, "weighted clauses: {}", s.num_weighted_clauses);
    let _ = writeln!(out, "hard clauses: {}", s.num_hard_clauses);
    let _ = writeln!(out, "weights: {}", s.num_distinct_weights);
    let _ = writeln!(out, "deterministic: {} zero, {} one", s.num_deterministic_zero, s.num_deterministic_one);
    let _ = writeln!(out, "theory elided: {}", s.num_theory_clauses_elided);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{example_network as example, random_network, Cpt, Network, Variable};

    #[test]
    fn example_clauses_and_weights() {
        let enc = encode(&example());
        let (a1, a2, b1, b2, b3) = (Lit(1), Lit(2), Lit(3), Lit(4), Lit(5));
        let w = |k| Some(WeightId(k));
        let mut got: Vec<(Vec<Lit>, Option<WeightId>)> = enc
            .cnf
            .clauses
            .iter()
            .map(|c| (c.atoms.clone(), c.weight))
            .collect();
        got.sort();
        let mut want = vec![
            (vec![a1], w(1)),
            (vec![a2], w(1)),
            (vec![a1, b1], w(2)),
            (vec![a1, b2], w(2)),
            (vec![a2, b1], w(2)),
            (vec![a2, b2], w(2)),
            (vec![a1, b3], w(3)),
            (vec![a2, b3], w(3)),
        ];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(enc.stats.num_distinct_weights, 3);
        assert_eq!(enc.stats.num_theory_clauses_elided, 6);
        assert_eq!(enc.cnf.weight(WeightId(3)).value, 0.4);
    }

    #[test]
    fn determinism_rules() {
        let net = Network::new(
            vec![Variable::new("x", &["t", "f"])],
            vec![Cpt::new("x", &[], vec![1.0, 0.0])],
        )
        .unwrap();
        let enc = encode(&net);
        assert_eq!(enc.stats.num_weighted_clauses, 0);
        assert_eq!(enc.stats.num_hard_clauses, 1);
        assert_eq!(enc.cnf.clauses[0].atoms, vec![Lit(2)]);
        assert_eq!(enc.cnf.clauses[0].weight, None);
        assert_eq!((enc.stats.num_deterministic_zero, enc.stats.num_deterministic_one), (1, 1));

        let soft = encode_with(&net, EncodeOptions { zero_as_hard: false });
        assert_eq!(soft.stats.num_weighted_clauses, 1);
        assert_eq!(soft.cnf.weights[0].value, 0.0);
    }

    #[test]
    fn atom_bijection() {
        let enc = encode(&example());
        let th = &enc.theory;
        let b3 = th.atom_of("b", "3").unwrap();
        assert_eq!(th.var_of(b3).unwrap(), ("b", "3"));
        assert_ne!(th.atom_of("a", "1").unwrap(), th.atom_of("a", "2").unwrap());
        for (name, vals) in [("a", &["1", "2"][..]), ("b", &["1", "2", "3"][..])] {
            for v in vals {
                let lit = th.atom_of(name, v).unwrap();
                assert_eq!(th.var_of(lit).unwrap(), (name, *v));
            }
        }
        assert!(matches!(th.atom_of("b", "4"), Err(EncodeError::UnknownAtom(_))));
        assert!(matches!(th.var_of(Lit(6)), Err(EncodeError::UnknownAtom(_))));
        assert!(matches!(th.var_of(Lit(0)), Err(EncodeError::UnknownAtom(_))));
    }

    #[test]
    fn weights_never_shared_across_cpts() {
        // both CPTs contain 0.5
        let net = Network::new(
            vec![Variable::new("a", &["1", "2"]), Variable::new("b", &["1", "2"])],
            vec![
                Cpt::new("a", &[], vec![0.5, 0.5]),
                Cpt::new("b", &[], vec![0.5, 0.5]),
            ],
        )
        .unwrap();
        let enc = encode(&net);
        assert_eq!(enc.cnf.num_weights(), 2);
        assert_ne!(enc.cnf.clauses[0].weight, enc.cnf.clauses[2].weight);
    }

    #[test]
    fn dump_mentions_theory_and_weights() {
        let text = dump(&encode(&example()));
        assert!(text.starts_with("var a atoms 1..2\nvar b atoms 3..5\nw1 = 0.5\n"));
        assert!(text.contains("w2: -1 -3\n"));
        assert!(text.contains("theory elided: 6\n"));
    }

    proptest::proptest! {
        #[test]
        fn encoding_invariants(seed in 0u64..300) {
            let net = random_network(seed, 6, 4, 3);
            let enc = encode(&net);
            let entries: usize = net.cpts().iter().map(|c| c.table.len()).sum();
            let ones = net.cpts().iter().flat_map(|c| &c.table).filter(|&&p| p == 1.0).count();
            proptest::prop_assert_eq!(enc.cnf.clauses.len(), entries - ones);
            let elided: usize = net.variables().iter().map(|v| {
                let n = v.domain_size();
                1 + n * (n - 1) / 2
            }).sum();
            proptest::prop_assert_eq!(enc.stats.num_theory_clauses_elided, elided);
            for c in &enc.cnf.clauses {
                // one atom per family member
                proptest::prop_assert_eq!(c.atoms.len(), net.parents(c.owner).len() + 1);
                let mut vars: Vec<usize> = c.atoms.iter().map(|&a| enc.theory.var(a)).collect();
                vars.dedup();
                proptest::prop_assert_eq!(vars.len(), c.atoms.len());
                if let Some(w) = c.weight {
                    let info = enc.cnf.weight(w);
                    proptest::prop_assert_eq!(info.owner, c.owner);
                    proptest::prop_assert!(info.value > 0.0 && info.value < 1.0);
                }
            }
            // weight sharing is keyed on exact value within a CPT
            for (i, a) in enc.cnf.weights.iter().enumerate() {
                for b in &enc.cnf.weights[i + 1..] {
                    if a.owner == b.owner {
                        proptest::prop_assert_ne!(a.value.to_bits(), b.value.to_bits());
                    }
                }
            }
        }
    }
}
