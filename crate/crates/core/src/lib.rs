//! Bounded PCTL checking for clock-synchronous population models.
//!
//! A population model is a set of identical probabilistic objects stepping
//! in lockstep, where action probabilities may depend on the current
//! occupancy measure (the fraction of objects per state). This crate
//! provides:
//!
//! * a small specification language for such models ([`parser`], [`ast`],
//!   [`validate`]),
//! * bounded PCTL formulas over a tagged object ([`formula`]),
//! * the exact semantics of the finite-N system, lumped by counting
//!   exchangeable objects ([`exact`]),
//! * the fast mean-field semantics, which replaces the crowd by its
//!   deterministic occupancy trajectory ([`meanfield`]),
//! * a model checker generic over both semantics, with a safety monitor
//!   that flags verdicts decided within epsilon of their probability
//!   bound ([`checker`]),
//! * CSV export of trajectories and check results ([`export`]).
//!
//! ```
//! use flyfast_core::{check, parse_formula, parse_system_spec, CheckOptions, MeanFieldModel};
//!
//! let spec = parse_system_spec(
//!     "S := infect.I;
//!      I := recover.S;
//!      infect :: 0.1 + 0.2 * frc I;
//!      recover :: 0.3;
//!      label local sick = I;
//!      init <S[100]>;",
//! ).expect("valid spec");
//! let formula = parse_formula("P<=0.9 [ true U<=20 sick ]").expect("valid formula");
//! let model = MeanFieldModel::new(&spec).expect("valid initial occupancy");
//! let initial = model.initial_state(0).expect("initial state");
//! let result = check(&model, &initial, &formula, &CheckOptions::default()).expect("check");
//! assert!(result.probability.is_some());
//! ```

pub mod ast;
pub mod checker;
pub mod diag;
pub mod error;
pub mod eval;
pub mod exact;
pub mod export;
pub mod formula;
pub mod lexer;
pub mod meanfield;
pub mod parser;
pub mod tol;
pub mod validate;

pub use ast::SystemSpec;
pub use checker::{
    check, check_path, CheckOptions, CheckResult, CheckStats, Model, PathCheckResult,
    SafetyIncident,
};
pub use diag::{Diagnostic, DiagnosticKind, Pos, Severity};
pub use error::ModelError;
pub use eval::{initial_occupancy, object_matrix, ObjectMatrix, OccupancyVector};
pub use exact::{
    initial_lumped_state, lab_eval_exact, next_exact, occupancy_measure, simulate, ExactModel,
    LumpedGlobalState,
};
pub use formula::{Formula, PathFormula, ProbRel};
pub use meanfield::{lab_eval_hd, mf_step, mf_trajectory, HState, MeanFieldModel};
pub use parser::{parse_formula, parse_formulas_file, parse_spec_source, parse_system_spec};
pub use validate::validate;
