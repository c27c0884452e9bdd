//! Shared test support: an independent brute-force reference semantics.
//!
//! The oracle works on the full global chain over all S^N configurations,
//! with product-form transition probabilities and bottom-up vector dynamic
//! programming over the whole state space. It shares nothing with the
//! lumped on-the-fly implementation except K(m) itself, so agreement
//! between the two is meaningful evidence.

use std::collections::BTreeMap;

use flyfast_core::eval::eval_atom;
use flyfast_core::{
    object_matrix, Formula, OccupancyVector, PathFormula, SystemSpec,
};

pub const EPIDEMIC_BODY: &str = "S := inf_ext.E + inf_sus.E;
E := activate.I;
I := patch.R;
R := loss.S;
inf_ext :: 0.1;
inf_sus :: 0.2 * frc I;
activate :: 0.4;
patch :: 0.2;
loss :: 0.1;
label local i = I;
label local e = E;
label local r = R;
label global LowInf = (frc I) < 0.25;
";

pub const P1: &str = "P<=0.5 [ true U<=30 i ]";
pub const P2: &str = "P<=0.2 [ LowInf U<=25 e ]";
pub const P3: &str = "P<=0.1 [ true U<=30 (!e & !i & P>0.3 [ true U<=5 i ]) ]";

/// The epidemic spec with a custom init clause, e.g. `"S[8]"`.
pub fn epidemic(init: &str) -> SystemSpec {
    flyfast_core::parse_system_spec(&format!("{}init <{}>;\n", EPIDEMIC_BODY, init))
        .expect("epidemic spec parses")
}

/// Brute-force semantics over the unlumped global chain.
pub struct Oracle<'a> {
    spec: &'a SystemSpec,
    n: usize,
    configs: Vec<Vec<usize>>,
    trans: Vec<Vec<f64>>,
}

impl<'a> Oracle<'a> {
    /// Builds the full S^n configuration space and its transition matrix.
    pub fn new(spec: &'a SystemSpec, n: usize) -> Oracle<'a> {
        assert!(n >= 1, "oracle needs at least one object");
        let size = spec.state_count();
        let count = size.pow(n as u32);
        let configs: Vec<Vec<usize>> = (0..count).map(|i| decode(i, size, n)).collect();
        let mut trans = vec![vec![0.0; count]; count];
        for (from, config) in configs.iter().enumerate() {
            let k = object_matrix(spec, &occupancy(config, size)).expect("valid matrix");
            for (to, target) in configs.iter().enumerate() {
                let mut p = 1.0;
                for (&c, &c2) in config.iter().zip(target) {
                    p *= k.get(c, c2);
                }
                trans[from][to] = p;
            }
        }
        Oracle {
            spec,
            n,
            configs,
            trans,
        }
    }

    pub fn config_count(&self) -> usize {
        self.configs.len()
    }

    /// The configuration matching the spec's init: object 0 in the first
    /// populated state, the rest filled in state order.
    pub fn initial_config_index(&self) -> usize {
        let counts = self.spec.initial_counts();
        let total: u64 = counts.iter().sum();
        assert_eq!(total as usize, self.n, "oracle population mismatch");
        let mut config = Vec::with_capacity(self.n);
        for (state, &count) in counts.iter().enumerate() {
            for _ in 0..count {
                config.push(state);
            }
        }
        self.index_of(&config)
    }

    fn index_of(&self, config: &[usize]) -> usize {
        let size = self.spec.state_count();
        config.iter().fold(0, |acc, &c| acc * size + c)
    }

    fn atom_holds(&self, config_idx: usize, atom: &str) -> bool {
        let config = &self.configs[config_idx];
        let m = occupancy(config, self.spec.state_count());
        eval_atom(self.spec, config[0], &m, atom).expect("known atom")
    }

    /// State-formula satisfaction on a global configuration.
    pub fn holds(&self, config_idx: usize, formula: &Formula) -> bool {
        match formula {
            Formula::Atom(name) => self.atom_holds(config_idx, name),
            Formula::Not(inner) => !self.holds(config_idx, inner),
            Formula::Or(lhs, rhs) => self.holds(config_idx, lhs) || self.holds(config_idx, rhs),
            Formula::Prob { rel, bound, path } => {
                rel.holds(self.path_prob(config_idx, path), *bound)
            }
        }
    }

    /// Path probability by global bottom-up dynamic programming.
    pub fn path_prob(&self, config_idx: usize, path: &PathFormula) -> f64 {
        match path {
            PathFormula::Next(inner) => {
                let sat: Vec<bool> = (0..self.config_count())
                    .map(|i| self.holds(i, inner))
                    .collect();
                self.trans[config_idx]
                    .iter()
                    .zip(&sat)
                    .filter(|&(_, &ok)| ok)
                    .map(|(&p, _)| p)
                    .sum()
            }
            PathFormula::Until { lhs, rhs, horizon } => {
                let sat1: Vec<bool> = (0..self.config_count())
                    .map(|i| self.holds(i, lhs))
                    .collect();
                let sat2: Vec<bool> = (0..self.config_count())
                    .map(|i| self.holds(i, rhs))
                    .collect();
                let mut u: Vec<f64> = sat2.iter().map(|&ok| if ok { 1.0 } else { 0.0 }).collect();
                for _ in 0..*horizon {
                    u = (0..self.config_count())
                        .map(|i| {
                            if sat2[i] {
                                1.0
                            } else if !sat1[i] {
                                0.0
                            } else {
                                self.trans[i].iter().zip(&u).map(|(&p, &v)| p * v).sum()
                            }
                        })
                        .collect();
                }
                u[config_idx]
            }
        }
    }

    /// Distribution over configurations after `t` steps from the initial
    /// configuration.
    pub fn distribution_at(&self, t: u32) -> Vec<f64> {
        let mut dist = vec![0.0; self.config_count()];
        dist[self.initial_config_index()] = 1.0;
        for _ in 0..t {
            let mut next = vec![0.0; self.config_count()];
            for (from, &mass) in dist.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for (to, &p) in self.trans[from].iter().enumerate() {
                    next[to] += mass * p;
                }
            }
            dist = next;
        }
        dist
    }

    /// Projects a configuration distribution onto lumped states
    /// (tagged state, counts of the others).
    pub fn project(&self, dist: &[f64]) -> BTreeMap<(usize, Vec<u32>), f64> {
        let size = self.spec.state_count();
        let mut out: BTreeMap<(usize, Vec<u32>), f64> = BTreeMap::new();
        for (idx, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let config = &self.configs[idx];
            let mut rest = vec![0u32; size];
            for &c in &config[1..] {
                rest[c] += 1;
            }
            *out.entry((config[0], rest)).or_insert(0.0) += mass;
        }
        out
    }
}

fn decode(mut index: usize, size: usize, n: usize) -> Vec<usize> {
    let mut config = vec![0usize; n];
    for slot in (0..n).rev() {
        config[slot] = index % size;
        index /= size;
    }
    config
}

fn occupancy(config: &[usize], size: usize) -> OccupancyVector {
    let mut counts = vec![0u64; size];
    for &c in config {
        counts[c] += 1;
    }
    OccupancyVector::from_counts(&counts).expect("nonempty configuration")
}
