//! Evaluation kernel shared by the exact and mean-field semantics:
//! occupancy vectors, probability function evaluation, the object transition
//! matrix, and label evaluation.

use crate::ast::{BExp, BinOp, Expr, FBinOp, FuncExpr, SystemSpec, TRUE_ATOM};
use crate::error::ModelError;
use crate::tol;

/// A point on the occupancy simplex: one fraction per state, in state order,
/// summing to 1 within [`tol::SIMPLEX_SUM`].
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyVector(Vec<f64>);

impl OccupancyVector {
    /// Validates entries and total mass, clamping float noise within
    /// [`tol::ENTRY_SLACK`] back into [0, 1].
    pub fn new(entries: Vec<f64>) -> Result<Self, ModelError> {
        let mut entries = entries;
        let mut sum = 0.0;
        for value in entries.iter_mut() {
            if !value.is_finite() || *value < -tol::ENTRY_SLACK || *value > 1.0 + tol::ENTRY_SLACK
            {
                return Err(ModelError::InvalidOccupancy(format!(
                    "entry {} outside [0, 1]",
                    value
                )));
            }
            *value = value.clamp(0.0, 1.0);
            sum += *value;
        }
        if (sum - 1.0).abs() > tol::SIMPLEX_SUM {
            return Err(ModelError::InvalidOccupancy(format!(
                "total mass {} is not 1",
                sum
            )));
        }
        Ok(OccupancyVector(entries))
    }

    /// The occupancy measure of an explicit count vector.
    pub fn from_counts(counts: &[u64]) -> Result<Self, ModelError> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(ModelError::EmptyPopulation);
        }
        OccupancyVector::new(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// The initial occupancy measure of a spec's population.
pub fn initial_occupancy(spec: &SystemSpec) -> Result<OccupancyVector, ModelError> {
    OccupancyVector::from_counts(&spec.initial_counts())
}

/// Evaluates a probability function expression at occupancy `m`.
///
/// The expression must already be validated against the spec's state set;
/// an unresolved `frc` reference surfaces as [`ModelError::UndefinedState`].
pub fn eval_expr(spec: &SystemSpec, expr: &Expr, m: &OccupancyVector) -> Result<f64, ModelError> {
    match expr {
        Expr::Const(value, _) => Ok(*value),
        Expr::Frc(state, _) => {
            let index = spec
                .state_index(state)
                .ok_or_else(|| ModelError::UndefinedState(state.clone()))?;
            Ok(m.get(index))
        }
        Expr::Neg(inner) => Ok(-eval_expr(spec, inner, m)?),
        Expr::Bin(op, lhs, rhs, _) => {
            let l = eval_expr(spec, lhs, m)?;
            let r = eval_expr(spec, rhs, m)?;
            Ok(match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        return Err(ModelError::DivisionByZero(String::new()));
                    }
                    l / r
                }
                BinOp::Min => l.min(r),
                BinOp::Max => l.max(r),
            })
        }
    }
}

/// The probability of `action` at occupancy `m`.
///
/// Fails when the evaluated value falls outside [0, 1]; values within
/// [`tol::ENTRY_SLACK`] of the interval are clamped.
pub fn action_prob(spec: &SystemSpec, m: &OccupancyVector, action: &str) -> Result<f64, ModelError> {
    let def = spec
        .prob_def(action)
        .ok_or_else(|| ModelError::MissingProbDef(action.to_string()))?;
    let value = eval_expr(spec, &def.expr, m).map_err(|err| match err {
        ModelError::DivisionByZero(_) => ModelError::DivisionByZero(action.to_string()),
        other => other,
    })?;
    if !value.is_finite() {
        return Err(ModelError::NonFinite(action.to_string()));
    }
    if value < -tol::ENTRY_SLACK || value > 1.0 + tol::ENTRY_SLACK {
        return Err(ModelError::ActionProbOutOfRange {
            action: action.to_string(),
            value,
        });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// A dense S-by-S object transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectMatrix {
    size: usize,
    data: Vec<f64>,
}

impl ObjectMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.size + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.size..(row + 1) * self.size]
    }
}

/// Builds the object transition matrix K(m).
///
/// Off-diagonal entries sum the probabilities of actions moving between the
/// two states; the diagonal keeps the residual mass, so self-loop actions
/// contribute to neither side. Every state must be probabilistic: its total
/// action mass, self-loops included, must lie in [0, 1].
pub fn object_matrix(spec: &SystemSpec, m: &OccupancyVector) -> Result<ObjectMatrix, ModelError> {
    let size = spec.state_count();
    let mut data = vec![0.0; size * size];
    for (row, def) in spec.object.defs.iter().enumerate() {
        let mut moving = 0.0;
        let mut total = 0.0;
        for branch in &def.branches {
            let p = action_prob(spec, m, &branch.action)?;
            total += p;
            let col = spec
                .state_index(&branch.target)
                .ok_or_else(|| ModelError::UndefinedState(branch.target.clone()))?;
            if col != row {
                moving += p;
                data[row * size + col] += p;
            }
        }
        if total > 1.0 + tol::ENTRY_SLACK {
            return Err(ModelError::NotProbabilistic {
                state: def.name.clone(),
                mass: total,
            });
        }
        data[row * size + row] = (1.0 - moving).clamp(0.0, 1.0);
        for col in 0..size {
            data[row * size + col] = data[row * size + col].clamp(0.0, 1.0);
        }
    }
    Ok(ObjectMatrix { size, data })
}

/// Evaluates a global label body at occupancy `m`.
pub fn eval_bexp(spec: &SystemSpec, bexp: &BExp, m: &OccupancyVector) -> Result<bool, ModelError> {
    let mut values = Vec::with_capacity(bexp.args.len());
    for (state, _) in &bexp.args {
        let index = spec
            .state_index(state)
            .ok_or_else(|| ModelError::UndefinedState(state.clone()))?;
        values.push(m.get(index));
    }
    let value = eval_func(&bexp.func, &values);
    Ok(bexp.rel.holds(value, bexp.threshold))
}

fn eval_func(func: &FuncExpr, args: &[f64]) -> f64 {
    match func {
        FuncExpr::Arg(i) => args[*i],
        FuncExpr::Const(value, _) => *value,
        FuncExpr::Neg(inner) => -eval_func(inner, args),
        FuncExpr::Bin(op, lhs, rhs) => {
            let l = eval_func(lhs, args);
            let r = eval_func(rhs, args);
            match op {
                FBinOp::Add => l + r,
                FBinOp::Sub => l - r,
                FBinOp::Mul => l * r,
                FBinOp::Min => l.min(r),
                FBinOp::Max => l.max(r),
            }
        }
    }
}

/// Evaluates an atom for an object in state `state_index` under occupancy
/// `m`. [`TRUE_ATOM`] holds everywhere; local atoms depend on the object's
/// state; global atoms depend on `m` alone.
pub fn eval_atom(
    spec: &SystemSpec,
    state_index: usize,
    m: &OccupancyVector,
    atom: &str,
) -> Result<bool, ModelError> {
    if atom == TRUE_ATOM {
        return Ok(true);
    }
    if spec.labels.is_local(atom) {
        return Ok(spec.labels.local_holds(atom, spec.state_name(state_index)));
    }
    if let Some(def) = spec.labels.global_def(atom) {
        return eval_bexp(spec, &def.bexp, m);
    }
    Err(ModelError::UnknownAtom(atom.to_string()))
}
