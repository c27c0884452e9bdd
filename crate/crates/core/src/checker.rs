//! Bounded PCTL model checking over any discrete-time probabilistic model.
//!
//! The engine is generic over [`Model`], so the exact lumped chain and the
//! mean-field chain share one checker. State formulas recurse structurally;
//! bounded-until runs as an iterative level-by-level dynamic program, so a
//! large horizon never deepens the call stack.
//!
//! Every probability-operator evaluation is watched by a safety monitor: if
//! the computed probability lands within `safety_epsilon` of the bound, the
//! verdict is numerically fragile and an incident is recorded.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::error::ModelError;
use crate::formula::{Formula, PathFormula, ProbRel};
use crate::tol;

/// A discrete-time probabilistic model the checker can drive.
pub trait Model {
    /// A model state. Cloned freely; keep it cheap or reference-counted.
    type State: Clone;
    /// Memoization key identifying a state. Must be injective: states with
    /// equal keys must be semantically identical.
    type Key: Eq + Hash + Clone;

    /// The successor distribution of `state`: strictly positive
    /// probabilities summing to one.
    fn next(&self, state: &Self::State) -> Result<Vec<(Self::State, f64)>, ModelError>;

    /// Whether `atom` holds in `state`.
    fn lab_eval(&self, state: &Self::State, atom: &str) -> Result<bool, ModelError>;

    /// The memoization key of `state`.
    fn memo_key(&self, state: &Self::State) -> Self::Key;

    /// A short human-readable rendering of `state` for diagnostics.
    fn state_label(&self, state: &Self::State) -> String;
}

/// Knobs for a checking run.
#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Half-width of the fragile zone around probability bounds.
    pub safety_epsilon: f64,
    /// Whether to memoize probability and until values across subformulas.
    pub memoize: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            safety_epsilon: tol::DEFAULT_SAFETY_EPSILON,
            memoize: true,
        }
    }
}

/// A probability-operator evaluation that landed within `safety_epsilon`
/// of its bound. The boolean verdict stands, but it hinges on a comparison
/// too close to trust blindly.
#[derive(Debug, Clone, PartialEq)]
pub struct SafetyIncident {
    pub state: String,
    pub path_formula: String,
    pub probability: f64,
    pub bound: f64,
    pub gap: f64,
}

/// Counters and timing for a checking run.
#[derive(Debug, Clone, Default)]
pub struct CheckStats {
    /// Distinct states whose successor distribution was computed.
    pub states_expanded: u64,
    /// Memo hits on probability-operator and until values.
    pub cache_hits: u64,
    pub wall: Duration,
}

/// The outcome of checking a state formula.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub value: bool,
    /// The computed path probability when the formula is a top-level
    /// probability operator.
    pub probability: Option<f64>,
    pub safety: Vec<SafetyIncident>,
    pub stats: CheckStats,
}

/// The outcome of evaluating a bare path formula.
#[derive(Debug, Clone)]
pub struct PathCheckResult {
    pub probability: f64,
    pub safety: Vec<SafetyIncident>,
    pub stats: CheckStats,
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    compensation: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

enum Entry {
    Value(f64),
    Expand,
}

struct Engine<'m, M: Model> {
    model: &'m M,
    opts: CheckOptions,
    states: Vec<M::State>,
    ids: HashMap<M::Key, usize>,
    succs: Vec<Option<Rc<Vec<(usize, f64)>>>>,
    prob_memo: HashMap<(usize, usize), f64>,
    until_memo: HashMap<(usize, usize, u32), f64>,
    incidents: Vec<SafetyIncident>,
    states_expanded: u64,
    cache_hits: u64,
}

impl<'m, M: Model> Engine<'m, M> {
    fn new(model: &'m M, opts: CheckOptions) -> Self {
        Engine {
            model,
            opts,
            states: Vec::new(),
            ids: HashMap::new(),
            succs: Vec::new(),
            prob_memo: HashMap::new(),
            until_memo: HashMap::new(),
            incidents: Vec::new(),
            states_expanded: 0,
            cache_hits: 0,
        }
    }

    fn intern(&mut self, state: &M::State) -> usize {
        let key = self.model.memo_key(state);
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.states.len();
        self.states.push(state.clone());
        self.succs.push(None);
        self.ids.insert(key, id);
        id
    }

    fn successors(&mut self, id: usize) -> Result<Rc<Vec<(usize, f64)>>, ModelError> {
        if let Some(cached) = &self.succs[id] {
            return Ok(cached.clone());
        }
        let state = self.states[id].clone();
        let raw = self.model.next(&state)?;
        self.states_expanded += 1;
        let mut mass = Kahan::default();
        for &(_, p) in &raw {
            if !p.is_finite() || p <= 0.0 || p > 1.0 + tol::ENTRY_SLACK {
                return Err(ModelError::BadDistribution(format!(
                    "probability {} leaving state {}",
                    p,
                    self.model.state_label(&state)
                )));
            }
            mass.add(p);
        }
        if (mass.value() - 1.0).abs() > tol::SIMPLEX_SUM {
            return Err(ModelError::BadDistribution(format!(
                "outgoing mass {} from state {}",
                mass.value(),
                self.model.state_label(&state)
            )));
        }
        let resolved: Vec<(usize, f64)> = raw
            .iter()
            .map(|(succ, p)| (self.intern(succ), *p))
            .collect();
        let shared = Rc::new(resolved);
        self.succs[id] = Some(shared.clone());
        Ok(shared)
    }

    fn check_state(&mut self, id: usize, formula: &Formula) -> Result<bool, ModelError> {
        match formula {
            Formula::Atom(name) => {
                let model = self.model;
                model.lab_eval(&self.states[id], name)
            }
            Formula::Not(inner) => Ok(!self.check_state(id, inner)?),
            Formula::Or(lhs, rhs) => {
                Ok(self.check_state(id, lhs)? || self.check_state(id, rhs)?)
            }
            Formula::Prob { rel, bound, path } => {
                let (value, _) = self.eval_prob(id, *rel, *bound, path)?;
                Ok(value)
            }
        }
    }

    fn eval_prob(
        &mut self,
        id: usize,
        rel: ProbRel,
        bound: f64,
        path: &PathFormula,
    ) -> Result<(bool, f64), ModelError> {
        let node = path as *const PathFormula as usize;
        if self.opts.memoize {
            if let Some(&prob) = self.prob_memo.get(&(id, node)) {
                self.cache_hits += 1;
                return Ok((rel.holds(prob, bound), prob));
            }
        }
        let prob = self.eval_path(id, path)?;
        let gap = (prob - bound).abs();
        if gap <= self.opts.safety_epsilon {
            self.incidents.push(SafetyIncident {
                state: self.model.state_label(&self.states[id]),
                path_formula: path.to_string(),
                probability: prob,
                bound,
                gap,
            });
        }
        if self.opts.memoize {
            self.prob_memo.insert((id, node), prob);
        }
        Ok((rel.holds(prob, bound), prob))
    }

    fn eval_path(&mut self, id: usize, path: &PathFormula) -> Result<f64, ModelError> {
        match path {
            PathFormula::Next(inner) => {
                let succs = self.successors(id)?;
                let mut sum = Kahan::default();
                for &(sid, p) in succs.iter() {
                    if self.check_state(sid, inner)? {
                        sum.add(p);
                    }
                }
                Ok(sum.value())
            }
            PathFormula::Until { lhs, rhs, horizon } => {
                let node = path as *const PathFormula as usize;
                self.eval_until(id, node, lhs, rhs, *horizon)
            }
        }
    }

    /// Bounded until as a two-pass dynamic program. The forward pass grows
    /// (state, remaining-horizon) levels, stopping paths at decided states;
    /// the backward pass folds probabilities up toward the root.
    fn eval_until(
        &mut self,
        root: usize,
        node: usize,
        lhs: &Formula,
        rhs: &Formula,
        horizon: u32,
    ) -> Result<f64, ModelError> {
        if self.opts.memoize {
            if let Some(&prob) = self.until_memo.get(&(root, node, horizon)) {
                self.cache_hits += 1;
                return Ok(prob);
            }
        }
        let mut levels: Vec<Vec<(usize, Entry)>> = Vec::new();
        let mut frontier: Vec<usize> = vec![root];
        let mut depth = 0u32;
        loop {
            let remaining = horizon - depth;
            let mut level: Vec<(usize, Entry)> = Vec::with_capacity(frontier.len());
            let mut next_frontier: Vec<usize> = Vec::new();
            let mut queued: HashSet<usize> = HashSet::new();
            for id in frontier {
                let memo_hit = if self.opts.memoize {
                    self.until_memo.get(&(id, node, remaining)).copied()
                } else {
                    None
                };
                let entry = if let Some(prob) = memo_hit {
                    self.cache_hits += 1;
                    Entry::Value(prob)
                } else if self.check_state(id, rhs)? {
                    Entry::Value(1.0)
                } else if !self.check_state(id, lhs)? {
                    Entry::Value(0.0)
                } else if remaining == 0 {
                    Entry::Value(0.0)
                } else {
                    for &(sid, _) in self.successors(id)?.iter() {
                        if queued.insert(sid) {
                            next_frontier.push(sid);
                        }
                    }
                    Entry::Expand
                };
                level.push((id, entry));
            }
            levels.push(level);
            if next_frontier.is_empty() {
                break;
            }
            frontier = next_frontier;
            depth += 1;
        }

        let mut below: HashMap<usize, f64> = HashMap::new();
        for (level_depth, level) in levels.iter().enumerate().rev() {
            let remaining = horizon - level_depth as u32;
            let mut current: HashMap<usize, f64> = HashMap::with_capacity(level.len());
            for (id, entry) in level {
                let value = match entry {
                    Entry::Value(v) => *v,
                    Entry::Expand => {
                        let succs = self.succs[*id].clone().expect("expanded in forward pass");
                        let mut sum = Kahan::default();
                        for &(sid, p) in succs.iter() {
                            sum.add(p * below[&sid]);
                        }
                        sum.value()
                    }
                };
                if self.opts.memoize {
                    self.until_memo.insert((*id, node, remaining), value);
                }
                current.insert(*id, value);
            }
            below = current;
        }
        Ok(below[&root])
    }
}

/// Checks a state formula in `initial` and reports the verdict, the
/// top-level path probability when there is one, and all safety incidents
/// encountered anywhere in the evaluation.
pub fn check<M: Model>(
    model: &M,
    initial: &M::State,
    formula: &Formula,
    opts: &CheckOptions,
) -> Result<CheckResult, ModelError> {
    let started = Instant::now();
    let mut engine = Engine::new(model, *opts);
    let root = engine.intern(initial);
    let (value, probability) = match formula {
        Formula::Prob { rel, bound, path } => {
            let (value, prob) = engine.eval_prob(root, *rel, *bound, path)?;
            (value, Some(prob))
        }
        other => (engine.check_state(root, other)?, None),
    };
    Ok(CheckResult {
        value,
        probability,
        safety: engine.incidents,
        stats: CheckStats {
            states_expanded: engine.states_expanded,
            cache_hits: engine.cache_hits,
            wall: started.elapsed(),
        },
    })
}

/// Evaluates a bare path formula in `initial` and reports its probability.
/// Safety incidents can still arise from probability operators nested in
/// the operands.
pub fn check_path<M: Model>(
    model: &M,
    initial: &M::State,
    path: &PathFormula,
    opts: &CheckOptions,
) -> Result<PathCheckResult, ModelError> {
    let started = Instant::now();
    let mut engine = Engine::new(model, *opts);
    let root = engine.intern(initial);
    let probability = engine.eval_path(root, path)?;
    Ok(PathCheckResult {
        probability,
        safety: engine.incidents,
        stats: CheckStats {
            states_expanded: engine.states_expanded,
            cache_hits: engine.cache_hits,
            wall: started.elapsed(),
        },
    })
}
