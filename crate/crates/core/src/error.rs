//! Runtime errors raised while evaluating a model.

use thiserror::Error;

/// An error produced while evaluating probability functions, building
/// transition matrices, stepping a semantics, or checking a formula.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("undefined state `{0}`")]
    UndefinedState(String),
    #[error("no probability definition for action `{0}`")]
    MissingProbDef(String),
    #[error("division by zero in the probability definition of `{0}`")]
    DivisionByZero(String),
    #[error("probability definition of `{0}` evaluated to a non-finite value")]
    NonFinite(String),
    #[error("action probability out of range at m: `{action}` evaluated to {value}")]
    ActionProbOutOfRange { action: String, value: f64 },
    #[error("state `{state}` is not probabilistic at m: outgoing mass {mass}")]
    NotProbabilistic { state: String, mass: f64 },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("occupancy drift {drift} exceeds tolerance after a mean-field step")]
    SimplexDrift { drift: f64 },
    #[error("invalid occupancy vector: {0}")]
    InvalidOccupancy(String),
    #[error("population must be >= 1")]
    EmptyPopulation,
    #[error("population {0} is too large for the exact semantics")]
    PopulationTooLarge(u64),
    #[error("invalid successor distribution: {0}")]
    BadDistribution(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
