//! CSV rendering for trajectories, simulation means, and check results.
//!
//! Floats are printed with 12 significant digits in scientific notation so
//! results survive a round-trip through text and diff cleanly across runs.

use crate::ast::SystemSpec;
use crate::eval::OccupancyVector;

/// Formats a float with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    format!("{:.11e}", x)
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn header(spec: &SystemSpec) -> String {
    let mut cols = vec!["t".to_string()];
    for i in 0..spec.state_count() {
        cols.push(csv_field(spec.state_name(i)));
    }
    cols.join(",")
}

/// Renders a mean-field trajectory as CSV, one row per time step.
pub fn trajectory_csv(spec: &SystemSpec, trajectory: &[OccupancyVector]) -> String {
    let mut out = header(spec);
    out.push('\n');
    for (t, m) in trajectory.iter().enumerate() {
        out.push_str(&t.to_string());
        for &value in m.as_slice() {
            out.push(',');
            out.push_str(&fmt_sig(value));
        }
        out.push('\n');
    }
    out
}

/// Renders simulated mean occupancies as CSV, one row per time step.
pub fn simulate_csv(spec: &SystemSpec, means: &[Vec<f64>]) -> String {
    let mut out = header(spec);
    out.push('\n');
    for (t, row) in means.iter().enumerate() {
        out.push_str(&t.to_string());
        for &value in row {
            out.push(',');
            out.push_str(&fmt_sig(value));
        }
        out.push('\n');
    }
    out
}

/// One row of a check-results table.
#[derive(Debug, Clone)]
pub struct CheckRow {
    /// The sweep point this row belongs to.
    pub point: u64,
    /// The identifier of the checked formula (f1, f2, ...).
    pub formula_id: String,
    /// The top-level path probability, when the formula has one.
    pub probability: Option<f64>,
    pub verdict: bool,
    /// Safety incidents recorded while checking this formula.
    pub incidents: usize,
}

/// Renders check results as CSV. `var` names the sweep variable column.
pub fn check_csv(var: &str, rows: &[CheckRow]) -> String {
    let mut out = format!(
        "{},formula_id,prob,verdict,safety_incidents\n",
        csv_field(var)
    );
    for row in rows {
        out.push_str(&row.point.to_string());
        out.push(',');
        out.push_str(&csv_field(&row.formula_id));
        out.push(',');
        if let Some(p) = row.probability {
            out.push_str(&fmt_sig(p));
        }
        out.push(',');
        out.push_str(if row.verdict { "true" } else { "false" });
        out.push(',');
        out.push_str(&row.incidents.to_string());
        out.push('\n');
    }
    out
}
