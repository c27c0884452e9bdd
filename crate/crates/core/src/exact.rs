//! Exact semantics of the finite-N population chain, in lumped form.
//!
//! Objects are exchangeable, so the global chain is folded down to the state
//! of a tagged first object plus a count vector over the remaining N-1
//! objects. Successor distributions enumerate, per current state, every way
//! the untagged objects can spread over the states (a product of
//! multinomials), then aggregate equal lumped states.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::ast::SystemSpec;
use crate::checker::Model;
use crate::error::ModelError;
use crate::eval::{eval_atom, object_matrix, ObjectMatrix, OccupancyVector};
use crate::tol;

/// A lumped global state: the tagged first object's state index plus counts
/// of the other N-1 objects per state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LumpedGlobalState {
    pub first: usize,
    pub rest: Vec<u32>,
}

impl LumpedGlobalState {
    /// Total population N represented by this state.
    pub fn population(&self) -> u64 {
        1 + self.rest.iter().map(|&c| c as u64).sum::<u64>()
    }
}

/// The lumped initial state of a spec: the first object is the first init
/// entry with a positive count; everyone else lands in the count vector.
pub fn initial_lumped_state(spec: &SystemSpec) -> Result<LumpedGlobalState, ModelError> {
    let counts = spec.initial_counts();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(ModelError::EmptyPopulation);
    }
    if total > u32::MAX as u64 {
        return Err(ModelError::PopulationTooLarge(total));
    }
    let first = spec
        .first_object_state()
        .ok_or(ModelError::EmptyPopulation)?;
    let mut rest: Vec<u32> = counts.iter().map(|&c| c as u32).collect();
    rest[first] -= 1;
    Ok(LumpedGlobalState { first, rest })
}

/// The occupancy measure of a lumped state, tagged object included.
pub fn occupancy_measure(g: &LumpedGlobalState) -> OccupancyVector {
    let n = g.population() as f64;
    let entries: Vec<f64> = g
        .rest
        .iter()
        .enumerate()
        .map(|(i, &c)| (c as f64 + if i == g.first { 1.0 } else { 0.0 }) / n)
        .collect();
    OccupancyVector::new(entries).expect("counts always form an occupancy measure")
}

fn binomial_coeff(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// All ways to spread `count` objects over the columns of `row`, with their
/// multinomial probabilities, in lexicographic order of the count vectors.
fn compositions(count: u32, row: &[f64]) -> Vec<(Vec<u32>, f64)> {
    let mut out = Vec::new();
    let mut current = vec![0u32; row.len()];
    visit_compositions(row, 0, count, 1.0, &mut current, &mut |v, w| {
        out.push((v.to_vec(), w));
    });
    out
}

fn visit_compositions(
    row: &[f64],
    idx: usize,
    remaining: u32,
    weight: f64,
    current: &mut Vec<u32>,
    visit: &mut dyn FnMut(&[u32], f64),
) {
    if idx == row.len() - 1 {
        if row[idx] == 0.0 && remaining > 0 {
            return;
        }
        current[idx] = remaining;
        visit(current, weight * row[idx].powi(remaining as i32));
        current[idx] = 0;
        return;
    }
    for take in 0..=remaining {
        if row[idx] == 0.0 && take > 0 {
            break;
        }
        let w = weight * binomial_coeff(remaining, take) * row[idx].powi(take as i32);
        current[idx] = take;
        visit_compositions(row, idx + 1, remaining - take, w, current, visit);
    }
    current[idx] = 0;
}

/// The exact one-step successor distribution of a lumped state.
///
/// Strictly positive probabilities only; aggregated successors below
/// [`tol::SUCCESSOR_FLOOR`] are dropped. Output is sorted by (first, rest).
pub fn next_exact(
    spec: &SystemSpec,
    g: &LumpedGlobalState,
) -> Result<Vec<(LumpedGlobalState, f64)>, ModelError> {
    let m = occupancy_measure(g);
    let k = object_matrix(spec, &m)?;
    let size = spec.state_count();

    let mut rest_outcomes: Vec<(Vec<u32>, f64)> = vec![(vec![0u32; size], 1.0)];
    for class in 0..size {
        let count = g.rest[class];
        if count == 0 {
            continue;
        }
        let class_moves = compositions(count, k.row(class));
        let mut merged = Vec::with_capacity(rest_outcomes.len() * class_moves.len());
        for (acc, w) in &rest_outcomes {
            for (move_counts, mw) in &class_moves {
                let mut next = acc.clone();
                for (slot, add) in next.iter_mut().zip(move_counts) {
                    *slot += add;
                }
                merged.push((next, w * mw));
            }
        }
        rest_outcomes = merged;
    }

    let mut aggregated: HashMap<(usize, Vec<u32>), f64> = HashMap::new();
    let tagged_row = k.row(g.first);
    for (target, &p_tag) in tagged_row.iter().enumerate() {
        if p_tag <= 0.0 {
            continue;
        }
        for (rest, w) in &rest_outcomes {
            let prob = p_tag * w;
            if prob <= 0.0 {
                continue;
            }
            *aggregated.entry((target, rest.clone())).or_insert(0.0) += prob;
        }
    }

    let mut successors: Vec<(LumpedGlobalState, f64)> = aggregated
        .into_iter()
        .filter(|&(_, p)| p >= tol::SUCCESSOR_FLOOR)
        .map(|((first, rest), p)| (LumpedGlobalState { first, rest }, p))
        .collect();
    successors.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Ok(successors)
}

/// Evaluates an atom in a lumped state.
pub fn lab_eval_exact(
    spec: &SystemSpec,
    g: &LumpedGlobalState,
    atom: &str,
) -> Result<bool, ModelError> {
    eval_atom(spec, g.first, &occupancy_measure(g), atom)
}

/// The exact lumped chain as a checkable model. Successor lists are cached,
/// so repeated queries over the same reachable fragment stay cheap.
pub struct ExactModel<'a> {
    spec: &'a SystemSpec,
    cache: RwLock<HashMap<LumpedGlobalState, Arc<Vec<(LumpedGlobalState, f64)>>>>,
}

impl<'a> ExactModel<'a> {
    pub fn new(spec: &'a SystemSpec) -> Self {
        ExactModel {
            spec,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &SystemSpec {
        self.spec
    }

    pub fn initial_state(&self) -> Result<LumpedGlobalState, ModelError> {
        initial_lumped_state(self.spec)
    }
}

impl Model for ExactModel<'_> {
    type State = LumpedGlobalState;
    type Key = LumpedGlobalState;

    fn next(&self, state: &LumpedGlobalState) -> Result<Vec<(LumpedGlobalState, f64)>, ModelError> {
        if let Some(cached) = self.cache.read().expect("cache lock").get(state) {
            return Ok(cached.as_ref().clone());
        }
        let successors = Arc::new(next_exact(self.spec, state)?);
        self.cache
            .write()
            .expect("cache lock")
            .insert(state.clone(), successors.clone());
        Ok(successors.as_ref().clone())
    }

    fn lab_eval(&self, state: &LumpedGlobalState, atom: &str) -> Result<bool, ModelError> {
        lab_eval_exact(self.spec, state, atom)
    }

    fn memo_key(&self, state: &LumpedGlobalState) -> LumpedGlobalState {
        state.clone()
    }

    fn state_label(&self, state: &LumpedGlobalState) -> String {
        let rest: Vec<String> = state.rest.iter().map(|c| c.to_string()).collect();
        format!(
            "({} | {})",
            self.spec.state_name(state.first),
            rest.join(",")
        )
    }
}

fn sample_multinomial<R: Rng>(rng: &mut R, n: u64, row: &[f64]) -> Vec<u64> {
    let size = row.len();
    let mut out = vec![0u64; size];
    let mut remaining = n;
    let mut mass_left = 1.0;
    for col in 0..size {
        if remaining == 0 {
            break;
        }
        if col == size - 1 {
            out[col] = remaining;
            break;
        }
        let p = if mass_left > 0.0 {
            (row[col] / mass_left).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let drawn = Binomial::new(remaining, p)
            .expect("clamped probability")
            .sample(rng);
        out[col] = drawn;
        remaining -= drawn;
        mass_left -= row[col];
    }
    out
}

/// Simulates the full N-object chain and returns, for t = 0..=horizon, the
/// occupancy measure averaged over `runs` trajectories. Deterministic in
/// `seed`; each run uses its own RNG stream.
pub fn simulate(
    spec: &SystemSpec,
    horizon: u32,
    runs: u32,
    seed: u64,
) -> Result<Vec<Vec<f64>>, ModelError> {
    if runs == 0 {
        return Err(ModelError::InvalidArgument("runs must be >= 1".to_string()));
    }
    let initial = spec.initial_counts();
    let total: u64 = initial.iter().sum();
    if total == 0 {
        return Err(ModelError::EmptyPopulation);
    }
    let size = spec.state_count();
    let mut sums = vec![vec![0.0; size]; horizon as usize + 1];
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let mut counts = initial.clone();
        for (slot, &count) in sums[0].iter_mut().zip(&counts) {
            *slot += count as f64 / total as f64;
        }
        for t in 1..=horizon {
            let m = OccupancyVector::from_counts(&counts)?;
            let k = object_matrix(spec, &m)?;
            counts = step_counts(&mut rng, &counts, &k);
            for (slot, &count) in sums[t as usize].iter_mut().zip(&counts) {
                *slot += count as f64 / total as f64;
            }
        }
    }
    for row in sums.iter_mut() {
        for value in row.iter_mut() {
            *value /= runs as f64;
        }
    }
    Ok(sums)
}

fn step_counts<R: Rng>(rng: &mut R, counts: &[u64], k: &ObjectMatrix) -> Vec<u64> {
    let size = counts.len();
    let mut next = vec![0u64; size];
    for class in 0..size {
        if counts[class] == 0 {
            continue;
        }
        let moved = sample_multinomial(rng, counts[class], k.row(class));
        for (slot, add) in next.iter_mut().zip(&moved) {
            *slot += add;
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_system_spec;

    fn epidemic(n: u64) -> SystemSpec {
        parse_system_spec(&format!(
            "S := inf_ext.E + inf_sus.E;
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
             init <S[{}]>;",
            n
        ))
        .unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15
    }

    #[test]
    fn occupancy_of_a_single_object() {
        let g = LumpedGlobalState {
            first: 2,
            rest: vec![0, 0, 0, 0],
        };
        assert_eq!(occupancy_measure(&g).as_slice(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn single_object_successors_follow_the_matrix_row() {
        let spec = epidemic(1);
        let g = initial_lumped_state(&spec).unwrap();
        let successors = next_exact(&spec, &g).unwrap();
        assert_eq!(successors.len(), 2);
        assert_eq!(successors[0].0.first, 0);
        assert!(close(successors[0].1, 0.9));
        assert_eq!(successors[1].0.first, 1);
        assert!(close(successors[1].1, 0.1));
    }

    #[test]
    fn two_objects_in_s_yield_four_lumped_successors() {
        let spec = epidemic(2);
        let g = initial_lumped_state(&spec).unwrap();
        assert_eq!(g.first, 0);
        assert_eq!(g.rest, vec![1, 0, 0, 0]);
        let successors = next_exact(&spec, &g).unwrap();
        let as_pairs: Vec<(usize, Vec<u32>, f64)> = successors
            .iter()
            .map(|(s, p)| (s.first, s.rest.clone(), *p))
            .collect();
        assert_eq!(as_pairs.len(), 4);
        assert_eq!(as_pairs[0].0, 0);
        assert_eq!(as_pairs[0].1, vec![0, 1, 0, 0]);
        assert!(close(as_pairs[0].2, 0.09));
        assert_eq!(as_pairs[1].1, vec![1, 0, 0, 0]);
        assert!(close(as_pairs[1].2, 0.81));
        assert_eq!(as_pairs[2].0, 1);
        assert_eq!(as_pairs[2].1, vec![0, 1, 0, 0]);
        assert!(close(as_pairs[2].2, 0.01));
        assert_eq!(as_pairs[3].1, vec![1, 0, 0, 0]);
        assert!(close(as_pairs[3].2, 0.09));
    }

    #[test]
    fn successor_mass_sums_to_one() {
        let spec = epidemic(6);
        let g = LumpedGlobalState {
            first: 1,
            rest: vec![2, 1, 1, 1],
        };
        let successors = next_exact(&spec, &g).unwrap();
        let sum: f64 = successors.iter().map(|(_, p)| p).sum();
        assert!((sum - 1.0).abs() < tol::SIMPLEX_SUM, "sum {}", sum);
        assert!(successors.iter().all(|&(_, p)| p > 0.0));
    }

    #[test]
    fn labels_see_the_tagged_object_and_the_occupancy() {
        let spec = epidemic(4);
        let g = LumpedGlobalState {
            first: 2,
            rest: vec![1, 1, 1, 0],
        };
        assert!(lab_eval_exact(&spec, &g, "i").unwrap());
        assert!(!lab_eval_exact(&spec, &g, "e").unwrap());
        assert!(!lab_eval_exact(&spec, &g, "LowInf").unwrap());
    }

    #[test]
    fn single_state_model_stays_put() {
        let spec = parse_system_spec("A := tau.A; tau :: 1.0; init <A[5]>;").unwrap();
        let mean = simulate(&spec, 3, 2, 7).unwrap();
        for row in mean {
            assert_eq!(row, vec![1.0]);
        }
    }

    #[test]
    fn one_simulated_step_tracks_the_matrix_row() {
        let spec = epidemic(10_000);
        let mean = simulate(&spec, 1, 1, 42).unwrap();
        assert!((mean[1][0] - 0.9).abs() < 0.02, "S fraction {}", mean[1][0]);
        assert!((mean[1][1] - 0.1).abs() < 0.02, "E fraction {}", mean[1][1]);
        assert_eq!(mean[1][2], 0.0);
        assert_eq!(mean[1][3], 0.0);
    }

    #[test]
    fn simulation_is_deterministic_in_the_seed() {
        let spec = epidemic(100);
        let a = simulate(&spec, 5, 3, 9).unwrap();
        let b = simulate(&spec, 5, 3, 9).unwrap();
        assert_eq!(a, b);
    }
}
