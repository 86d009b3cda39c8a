//! Discrete Bayesian networks: variables with finite domains, one CPT per
//! variable, JSON ingestion and structural validation.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Maximum allowed deviation of a CPT row sum from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub values: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, values: &[&str]) -> Self {
        Variable {
            name: name.into(),
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }
}

/// Conditional probability table `P(child | parents)`.
///
/// Rows enumerate parent assignments with the first parent varying slowest;
/// within a row the child value index varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cpt {
    pub child: String,
    pub parents: Vec<String>,
    pub table: Vec<f64>,
}

impl Cpt {
    pub fn new(child: impl Into<String>, parents: &[&str], table: Vec<f64>) -> Self {
        Cpt {
            child: child.into(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            table,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    variables: Vec<Variable>,
    cpts: Vec<Cpt>,
}

/// A validated network. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    variables: Vec<Variable>,
    cpts: Vec<Cpt>,
    index: HashMap<String, usize>,
    // cpt_of[v] = position in `cpts` of the table whose child is v
    cpt_of: Vec<usize>,
    // parents[v] = variable indices of v's parents in CPT order
    parents: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(variables: Vec<Variable>, cpts: Vec<Cpt>) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(variables.len());
        for (i, var) in variables.iter().enumerate() {
            if var.values.is_empty() {
                return Err(ModelError::Schema(format!(
                    "variable `{}` has an empty domain",
                    var.name
                )));
            }
            let mut seen = HashSet::new();
            for value in &var.values {
                if !seen.insert(value.as_str()) {
                    return Err(ModelError::Schema(format!(
                        "variable `{}` repeats value `{value}`",
                        var.name
                    )));
                }
            }
            if index.insert(var.name.clone(), i).is_some() {
                return Err(ModelError::Schema(format!(
                    "duplicate variable name `{}`",
                    var.name
                )));
            }
        }

        let mut cpt_of = vec![usize::MAX; variables.len()];
        let mut parents = vec![Vec::new(); variables.len()];
        for (ci, cpt) in cpts.iter().enumerate() {
            let child = *index.get(&cpt.child).ok_or_else(|| {
                ModelError::Schema(format!("CPT for unknown variable `{}`", cpt.child))
            })?;
            if cpt_of[child] != usize::MAX {
                return Err(ModelError::Schema(format!(
                    "more than one CPT for `{}`",
                    cpt.child
                )));
            }
            cpt_of[child] = ci;
            let mut seen = HashSet::new();
            for p in &cpt.parents {
                let pi = *index.get(p).ok_or_else(|| {
                    ModelError::Schema(format!("unknown parent `{p}` of `{}`", cpt.child))
                })?;
                if !seen.insert(pi) {
                    return Err(ModelError::Schema(format!(
                        "parent `{p}` listed twice for `{}`",
                        cpt.child
                    )));
                }
                parents[child].push(pi);
            }
        }
        if let Some(missing) = cpt_of.iter().position(|&c| c == usize::MAX) {
            return Err(ModelError::Schema(format!(
                "no CPT for `{}`",
                variables[missing].name
            )));
        }

        let net = Network {
            variables,
            cpts,
            index,
            cpt_of,
            parents,
        };
        net.check_acyclic()?;
        for v in 0..net.variables.len() {
            net.check_table(v)?;
        }
        Ok(net)
    }

    fn check_acyclic(&self) -> Result<(), ModelError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; self.variables.len()];
        for start in 0..self.variables.len() {
            if mark[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            mark[start] = 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(&p) = self.parents[v].get(*next) {
                    *next += 1;
                    match mark[p] {
                        0 => {
                            mark[p] = 1;
                            stack.push((p, 0));
                        }
                        1 => return Err(ModelError::Cycle(self.variables[p].name.clone())),
                        _ => {}
                    }
                } else {
                    mark[v] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    fn check_table(&self, v: usize) -> Result<(), ModelError> {
        let cpt = self.cpt(v);
        let child_size = self.variables[v].domain_size();
        let expected = self.row_count(v) * child_size;
        if cpt.table.len() != expected {
            return Err(ModelError::CptShape {
                child: cpt.child.clone(),
                expected,
                actual: cpt.table.len(),
            });
        }
        for (row, chunk) in cpt.table.chunks(child_size).enumerate() {
            if let Some(bad) = chunk.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(ModelError::Schema(format!(
                    "probability {bad} of `{}` outside [0, 1]",
                    cpt.child
                )));
            }
            let sum: f64 = chunk.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(ModelError::Normalization {
                    child: cpt.child.clone(),
                    row,
                    sum,
                });
            }
        }
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, v: usize) -> &Variable {
        &self.variables[v]
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// CPTs in input order.
    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    /// The CPT whose child is variable `v`.
    pub fn cpt(&self, v: usize) -> &Cpt {
        &self.cpts[self.cpt_of[v]]
    }

    /// Index into [`Network::cpts`] of the table for variable `v`.
    pub fn cpt_position(&self, v: usize) -> usize {
        self.cpt_of[v]
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn value_index(&self, v: usize, label: &str) -> Option<usize> {
        self.variables[v].values.iter().position(|x| x == label)
    }

    /// Number of parent assignments of variable `v`.
    pub fn row_count(&self, v: usize) -> usize {
        self.parents[v]
            .iter()
            .map(|&p| self.variables[p].domain_size())
            .product()
    }

    /// Flat table index of `P(child = child_value | row)`.
    pub fn table_index(&self, v: usize, row: usize, child_value: usize) -> usize {
        row * self.variables[v].domain_size() + child_value
    }

    /// Inverse of [`Network::table_index`].
    pub fn split_table_index(&self, v: usize, idx: usize) -> (usize, usize) {
        let n = self.variables[v].domain_size();
        (idx / n, idx % n)
    }

    /// Row index of a parent assignment given as value indices in CPT parent
    /// order (first parent slowest).
    pub fn row_index(&self, v: usize, parent_values: &[usize]) -> usize {
        self.parents[v]
            .iter()
            .zip(parent_values)
            .fold(0, |acc, (&p, &val)| {
                acc * self.variables[p].domain_size() + val
            })
    }

    /// Parent value indices of a row, in CPT parent order.
    pub fn row_assignment(&self, v: usize, mut row: usize) -> Vec<usize> {
        let mut out = vec![0; self.parents[v].len()];
        for (slot, &p) in out.iter_mut().zip(&self.parents[v]).rev() {
            let n = self.variables[p].domain_size();
            *slot = row % n;
            row /= n;
        }
        out
    }

    pub fn probability(&self, v: usize, row: usize, child_value: usize) -> f64 {
        self.cpt(v).table[self.table_index(v, row, child_value)]
    }

    /// Product of all domain sizes.
    pub fn joint_size(&self) -> u128 {
        self.variables
            .iter()
            .map(|v| v.domain_size() as u128)
            .product()
    }

    /// Topological order (parents first), ties broken by declaration order.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.variables.len();
        let mut children = vec![Vec::new(); n];
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        for v in 0..n {
            for &p in &self.parents[v] {
                children[p].push(v);
            }
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }

    /// Same network with the CPT list permuted; `perm[i]` is the source
    /// position of the i-th table.
    pub fn with_cpt_order(&self, perm: &[usize]) -> Result<Self, ModelError> {
        let cpts = perm.iter().map(|&i| self.cpts[i].clone()).collect();
        Network::new(self.variables.clone(), cpts)
    }

    pub fn to_json(&self) -> String {
        let raw = RawNetwork {
            variables: self.variables.clone(),
            cpts: self.cpts.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("network serializes")
    }
}

pub fn load_network(bytes: &[u8]) -> Result<Network, ModelError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| ModelError::Schema(format!("input is not UTF-8: {e}")))?;
    let raw: RawNetwork =
        serde_json::from_str(text).map_err(|e| ModelError::Schema(e.to_string()))?;
    Network::new(raw.variables, raw.cpts)
}

/// Two-variable network `a -> b` with `a ∈ {1,2}`, `b ∈ {1,2,3}`, a uniform
/// prior on `a` and `P(b | a) = (0.3, 0.3, 0.4)` for both values of `a`.
pub fn example_network() -> Network {
    Network::new(
        vec![Variable::new("a", &["1", "2"]), Variable::new("b", &["1", "2", "3"])],
        vec![
            Cpt::new("a", &[], vec![0.5, 0.5]),
            Cpt::new("b", &["a"], vec![0.3, 0.3, 0.4, 0.3, 0.3, 0.4]),
        ],
    )
    .expect("example network is valid")
}

/// Deterministic random network for tests and benchmarks.
///
/// Variables are declared in a topological order. Rows are sometimes copied
/// from earlier rows (context-specific independence), sometimes carry
/// repeated entries, and sometimes put all mass on one value or contain a
/// zero (determinism).
pub fn random_network(seed: u64, n_vars: usize, max_domain: usize, max_parents: usize) -> Network {
    assert!(n_vars >= 1, "random_network needs at least one variable");
    assert!(max_domain >= 2, "random_network needs max_domain >= 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let variables: Vec<Variable> = (0..n_vars)
        .map(|i| {
            let size = rng.gen_range(2..=max_domain);
            Variable {
                name: format!("v{i}"),
                values: (0..size).map(|k| format!("s{k}")).collect(),
            }
        })
        .collect();

    let mut cpts = Vec::with_capacity(n_vars);
    for i in 0..n_vars {
        let k = rng.gen_range(0..=max_parents.min(i));
        let mut candidates: Vec<usize> = (0..i).collect();
        let mut parents = Vec::with_capacity(k);
        for _ in 0..k {
            let pick = rng.gen_range(0..candidates.len());
            parents.push(candidates.swap_remove(pick));
        }
        parents.sort_unstable();

        let child_size = variables[i].domain_size();
        let rows: usize = parents.iter().map(|&p| variables[p].domain_size()).product();
        let mut table: Vec<f64> = Vec::with_capacity(rows * child_size);
        for row in 0..rows {
            if row > 0 && rng.gen_bool(0.3) {
                let src = rng.gen_range(0..row);
                let copied = table[src * child_size..(src + 1) * child_size].to_vec();
                table.extend(copied);
                continue;
            }
            table.extend(random_row(&mut rng, child_size));
        }
        cpts.push(Cpt {
            child: variables[i].name.clone(),
            parents: parents.iter().map(|&p| variables[p].name.clone()).collect(),
            table,
        });
    }
    Network::new(variables, cpts).expect("generated network is valid")
}

fn random_row(rng: &mut ChaCha8Rng, size: usize) -> Vec<f64> {
    let roll: f64 = rng.gen();
    let mut counts: Vec<u32> = if roll < 0.12 {
        // one-hot
        let hot = rng.gen_range(0..size);
        (0..size).map(|k| u32::from(k == hot)).collect()
    } else if roll < 0.45 {
        // few distinct values, some possibly zero
        let palette: Vec<u32> = (0..2).map(|_| rng.gen_range(0..6)).collect();
        (0..size).map(|_| palette[rng.gen_range(0..2)]).collect()
    } else {
        (0..size).map(|_| rng.gen_range(1..20)).collect()
    };
    if counts.iter().all(|&c| c == 0) {
        counts[0] = 1;
    }
    let total: u32 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}
