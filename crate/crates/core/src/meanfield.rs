//! Mean-field semantics: the deterministic occupancy recurrence and the
//! time-inhomogeneous single-object chain driven by it.
//!
//! The occupancy trajectory follows mu(t+1) = mu(t) * K(mu(t)) and depends
//! only on mu(0), never on the population size. A tagged object then moves
//! through states <c, t> with the one-step probabilities K(mu(t))[c][c'].

use std::sync::RwLock;

use crate::ast::SystemSpec;
use crate::checker::Model;
use crate::error::ModelError;
use crate::eval::{eval_atom, initial_occupancy, object_matrix, ObjectMatrix, OccupancyVector};
use crate::tol;

fn advance(m: &OccupancyVector, k: &ObjectMatrix) -> Result<OccupancyVector, ModelError> {
    let size = m.len();
    let mut out = vec![0.0; size];
    for (i, &mi) in m.as_slice().iter().enumerate() {
        if mi == 0.0 {
            continue;
        }
        for (slot, &p) in out.iter_mut().zip(k.row(i)) {
            *slot += mi * p;
        }
    }
    let sum: f64 = out.iter().sum();
    let drift = sum - 1.0;
    if drift.abs() > tol::SIMPLEX_SUM {
        return Err(ModelError::SimplexDrift { drift });
    }
    for value in out.iter_mut() {
        *value /= sum;
    }
    OccupancyVector::new(out)
}

/// One step of the mean-field recurrence, renormalized against float drift.
pub fn mf_step(spec: &SystemSpec, m: &OccupancyVector) -> Result<OccupancyVector, ModelError> {
    let k = object_matrix(spec, m)?;
    advance(m, &k)
}

/// The occupancy trajectory mu(0), ..., mu(horizon).
pub fn mf_trajectory(
    spec: &SystemSpec,
    mu0: &OccupancyVector,
    horizon: u32,
) -> Result<Vec<OccupancyVector>, ModelError> {
    let mut out = Vec::with_capacity(horizon as usize + 1);
    out.push(mu0.clone());
    for _ in 0..horizon {
        let next = mf_step(spec, out.last().expect("nonempty trajectory"))?;
        out.push(next);
    }
    Ok(out)
}

/// A state of the time-inhomogeneous single-object chain: the tagged
/// object's state, the time step, and the occupancy measure at that time.
/// Only [`MeanFieldModel`] mints these, so the occupancy is always the
/// trajectory value for `time`.
#[derive(Debug, Clone)]
pub struct HState {
    c: usize,
    t: u32,
    m: OccupancyVector,
}

impl HState {
    pub fn object_state(&self) -> usize {
        self.c
    }

    pub fn time(&self) -> u32 {
        self.t
    }

    pub fn occupancy(&self) -> &OccupancyVector {
        &self.m
    }
}

/// Evaluates an atom in a mean-field state.
pub fn lab_eval_hd(spec: &SystemSpec, s: &HState, atom: &str) -> Result<bool, ModelError> {
    eval_atom(spec, s.c, &s.m, atom)
}

struct MfCache {
    mus: Vec<OccupancyVector>,
    mats: Vec<ObjectMatrix>,
}

/// The mean-field chain as a checkable model. The occupancy trajectory and
/// the matrices K(mu(t)) are extended lazily and shared across queries.
pub struct MeanFieldModel<'a> {
    spec: &'a SystemSpec,
    cache: RwLock<MfCache>,
}

impl<'a> MeanFieldModel<'a> {
    /// Builds the model with mu(0) taken from the spec's init proportions.
    pub fn new(spec: &'a SystemSpec) -> Result<Self, ModelError> {
        let mu0 = initial_occupancy(spec)?;
        Self::with_initial_occupancy(spec, mu0)
    }

    /// Builds the model with an explicit mu(0).
    pub fn with_initial_occupancy(
        spec: &'a SystemSpec,
        mu0: OccupancyVector,
    ) -> Result<Self, ModelError> {
        if mu0.len() != spec.state_count() {
            return Err(ModelError::InvalidOccupancy(format!(
                "expected {} entries, got {}",
                spec.state_count(),
                mu0.len()
            )));
        }
        Ok(MeanFieldModel {
            spec,
            cache: RwLock::new(MfCache {
                mus: vec![mu0],
                mats: Vec::new(),
            }),
        })
    }

    pub fn spec(&self) -> &SystemSpec {
        self.spec
    }

    /// Extends the cached trajectory so that mats[t] and mus[t + 1] exist.
    fn ensure_time(&self, t: u32) -> Result<(), ModelError> {
        {
            let cache = self.cache.read().expect("cache lock");
            if cache.mats.len() > t as usize {
                return Ok(());
            }
        }
        let mut cache = self.cache.write().expect("cache lock");
        while cache.mats.len() <= t as usize {
            let i = cache.mats.len();
            let k = object_matrix(self.spec, &cache.mus[i])?;
            let next = advance(&cache.mus[i], &k)?;
            cache.mats.push(k);
            cache.mus.push(next);
        }
        Ok(())
    }

    /// The occupancy measure at time `t`.
    pub fn occupancy_at(&self, t: u32) -> Result<OccupancyVector, ModelError> {
        if t > 0 {
            self.ensure_time(t - 1)?;
        }
        Ok(self.cache.read().expect("cache lock").mus[t as usize].clone())
    }

    /// The chain state for object state index `c` at time `t0`.
    pub fn state_at(&self, c: usize, t0: u32) -> Result<HState, ModelError> {
        if c >= self.spec.state_count() {
            return Err(ModelError::UndefinedState(format!("state index {}", c)));
        }
        Ok(HState {
            c,
            t: t0,
            m: self.occupancy_at(t0)?,
        })
    }

    /// The chain state of the spec's first object at time `t0`.
    pub fn initial_state(&self, t0: u32) -> Result<HState, ModelError> {
        let c = self
            .spec
            .first_object_state()
            .ok_or(ModelError::EmptyPopulation)?;
        self.state_at(c, t0)
    }
}

impl Model for MeanFieldModel<'_> {
    type State = HState;
    type Key = (usize, u32);

    fn next(&self, state: &HState) -> Result<Vec<(HState, f64)>, ModelError> {
        self.ensure_time(state.t)?;
        let cache = self.cache.read().expect("cache lock");
        let row = cache.mats[state.t as usize].row(state.c);
        let mu_next = &cache.mus[state.t as usize + 1];
        let mut out = Vec::new();
        for (target, &p) in row.iter().enumerate() {
            if p > 0.0 {
                out.push((
                    HState {
                        c: target,
                        t: state.t + 1,
                        m: mu_next.clone(),
                    },
                    p,
                ));
            }
        }
        Ok(out)
    }

    fn lab_eval(&self, state: &HState, atom: &str) -> Result<bool, ModelError> {
        lab_eval_hd(self.spec, state, atom)
    }

    fn memo_key(&self, state: &HState) -> (usize, u32) {
        (state.c, state.t)
    }

    fn state_label(&self, state: &HState) -> String {
        format!("({}, t={})", self.spec.state_name(state.c), state.t)
    }
}
