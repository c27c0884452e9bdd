//! Numeric tolerances, pinned in one place.

/// Allowed deviation of a probability distribution's total mass from 1:
/// transition matrix rows, occupancy vectors, and successor lists.
pub const SIMPLEX_SUM: f64 = 1e-9;

/// Slack allowed on [0, 1] range checks before a value is treated as out of
/// range; values inside the slack are clamped.
pub const ENTRY_SLACK: f64 = 1e-12;

/// Aggregated successors with probability below this floor are dropped.
pub const SUCCESSOR_FLOOR: f64 = 1e-15;

/// Default gap under which a computed path probability counts as a safety
/// incident.
pub const DEFAULT_SAFETY_EPSILON: f64 = 1e-6;
