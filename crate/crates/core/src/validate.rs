//! Semantic validation of parsed system specs.
//!
//! [`validate`] walks the spec in source order and collects every finding,
//! so a single run reports all problems deterministically. Errors make the
//! spec unusable; warnings (currently only the continuity warning for
//! division) do not.

use std::collections::HashSet;

use crate::ast::{Expr, SystemSpec, RESERVED_WORDS};
use crate::diag::{Diagnostic, DiagnosticKind};

fn reserved(name: &str) -> bool {
    RESERVED_WORDS.contains(&name)
}

/// Checks every well-formedness rule of a spec. The returned list is empty
/// exactly when the spec is fully valid; it is ordered by the spec's source
/// structure, so repeated runs agree.
pub fn validate(spec: &SystemSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let defined: HashSet<&str> = spec.object.defs.iter().map(|d| d.name.as_str()).collect();

    let mut seen_states: HashSet<&str> = HashSet::new();
    for def in &spec.object.defs {
        if reserved(&def.name) {
            out.push(Diagnostic::error(
                DiagnosticKind::ReservedName,
                def.pos,
                format!("`{}` is reserved and cannot name a state", def.name),
            ));
        }
        if !seen_states.insert(&def.name) {
            out.push(Diagnostic::error(
                DiagnosticKind::DuplicateStateDef,
                def.pos,
                format!("state `{}` is defined more than once", def.name),
            ));
        }
        let mut seen_actions: HashSet<&str> = HashSet::new();
        for branch in &def.branches {
            if reserved(&branch.action) {
                out.push(Diagnostic::error(
                    DiagnosticKind::ReservedName,
                    branch.action_pos,
                    format!("`{}` is reserved and cannot name an action", branch.action),
                ));
            }
            if !seen_actions.insert(&branch.action) {
                out.push(Diagnostic::error(
                    DiagnosticKind::DuplicateAction,
                    branch.action_pos,
                    format!(
                        "action `{}` occurs twice in the definition of `{}`",
                        branch.action, def.name
                    ),
                ));
            }
            if !defined.contains(branch.target.as_str()) {
                out.push(Diagnostic::error(
                    DiagnosticKind::UndefinedState,
                    branch.target_pos,
                    format!("undefined state `{}`", branch.target),
                ));
            }
        }
    }

    let mut seen_defs: HashSet<&str> = HashSet::new();
    let used_actions: Vec<&str> = spec
        .object
        .defs
        .iter()
        .flat_map(|d| d.branches.iter().map(|b| b.action.as_str()))
        .collect();
    for prob in &spec.probs {
        if reserved(&prob.action) {
            out.push(Diagnostic::error(
                DiagnosticKind::ReservedName,
                prob.pos,
                format!("`{}` is reserved and cannot name an action", prob.action),
            ));
        }
        if !seen_defs.insert(&prob.action) {
            out.push(Diagnostic::error(
                DiagnosticKind::DuplicateProbDef,
                prob.pos,
                format!("action `{}` has more than one probability definition", prob.action),
            ));
        }
        if !used_actions.contains(&prob.action.as_str()) {
            out.push(Diagnostic::error(
                DiagnosticKind::UnknownAction,
                prob.pos,
                format!("probability definition for unknown action `{}`", prob.action),
            ));
        }
        check_expr(&prob.expr, &defined, &mut out);
    }

    let mut seen_missing: HashSet<&str> = HashSet::new();
    for def in &spec.object.defs {
        for branch in &def.branches {
            if spec.prob_def(&branch.action).is_none()
                && seen_missing.insert(&branch.action)
            {
                out.push(Diagnostic::error(
                    DiagnosticKind::MissingProbDef,
                    branch.action_pos,
                    format!("action `{}` has no probability definition", branch.action),
                ));
            }
        }
    }

    let mut seen_atoms: HashSet<&str> = HashSet::new();
    for local in &spec.labels.locals {
        if reserved(&local.atom) {
            out.push(Diagnostic::error(
                DiagnosticKind::ReservedName,
                local.pos,
                format!("`{}` is reserved and cannot name an atom", local.atom),
            ));
        }
        if !seen_atoms.insert(&local.atom) {
            out.push(Diagnostic::error(
                DiagnosticKind::DuplicateLabelDef,
                local.pos,
                format!("atom `{}` is defined more than once", local.atom),
            ));
        }
        for (state, pos) in &local.states {
            if !defined.contains(state.as_str()) {
                out.push(Diagnostic::error(
                    DiagnosticKind::UndefinedState,
                    *pos,
                    format!("undefined state `{}`", state),
                ));
            }
        }
    }
    for global in &spec.labels.globals {
        if reserved(&global.atom) {
            out.push(Diagnostic::error(
                DiagnosticKind::ReservedName,
                global.pos,
                format!("`{}` is reserved and cannot name an atom", global.atom),
            ));
        }
        if spec.labels.is_local(&global.atom) {
            out.push(Diagnostic::error(
                DiagnosticKind::AtomNamespaceOverlap,
                global.pos,
                format!(
                    "atom `{}` is declared both as a local and as a global label",
                    global.atom
                ),
            ));
        } else if !seen_atoms.insert(&global.atom) {
            out.push(Diagnostic::error(
                DiagnosticKind::DuplicateLabelDef,
                global.pos,
                format!("atom `{}` is defined more than once", global.atom),
            ));
        }
        for (state, pos) in &global.bexp.args {
            if !defined.contains(state.as_str()) {
                out.push(Diagnostic::error(
                    DiagnosticKind::UndefinedState,
                    *pos,
                    format!("undefined state `{}`", state),
                ));
            }
        }
    }

    let mut seen_init: HashSet<&str> = HashSet::new();
    for entry in &spec.init {
        if !defined.contains(entry.state.as_str()) {
            out.push(Diagnostic::error(
                DiagnosticKind::UndefinedState,
                entry.pos,
                format!("undefined state `{}`", entry.state),
            ));
        }
        if !seen_init.insert(&entry.state) {
            out.push(Diagnostic::error(
                DiagnosticKind::DuplicateInitEntry,
                entry.pos,
                format!("state `{}` appears twice in the init statement", entry.state),
            ));
        }
    }
    if spec.population() == 0 {
        let pos = spec.init.first().map(|e| e.pos).unwrap_or_default();
        out.push(Diagnostic::error(
            DiagnosticKind::EmptyPopulation,
            pos,
            "the initial population is empty; at least one object is required",
        ));
    }

    out
}

fn check_expr(expr: &Expr, defined: &HashSet<&str>, out: &mut Vec<Diagnostic>) {
    match expr {
        Expr::Const(value, pos) => {
            if !(0.0..=1.0).contains(value) {
                out.push(Diagnostic::error(
                    DiagnosticKind::ProbOutOfRange,
                    *pos,
                    format!("probability constant {} lies outside [0, 1]", value),
                ));
            }
        }
        Expr::Frc(state, pos) => {
            if !defined.contains(state.as_str()) {
                out.push(Diagnostic::error(
                    DiagnosticKind::UndefinedState,
                    *pos,
                    format!("undefined state `{}`", state),
                ));
            }
        }
        Expr::Neg(inner) => check_expr(inner, defined, out),
        Expr::Bin(op, lhs, rhs, pos) => {
            if *op == crate::ast::BinOp::Div {
                out.push(Diagnostic::warning(
                    DiagnosticKind::ContinuityWarning,
                    *pos,
                    "division can make the transition matrix discontinuous in the occupancy",
                ));
            }
            check_expr(lhs, defined, out);
            check_expr(rhs, defined, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Severity;
    use crate::parser::parse_spec_source;

    fn kinds(src: &str) -> Vec<DiagnosticKind> {
        validate(&parse_spec_source(src).unwrap())
            .into_iter()
            .map(|d| d.kind)
            .collect()
    }

    #[test]
    fn a_valid_spec_has_no_findings() {
        assert!(kinds("S := a.E; E := b.S; a :: 0.1; b :: 0.2; init <S[3]>;").is_empty());
    }

    #[test]
    fn deleting_a_state_definition_reports_undefined_state() {
        let found = kinds(
            "S := inf_ext.E + inf_sus.E;
             I := patch.R;
             R := loss.S;
             inf_ext :: 0.1;
             inf_sus :: 0.2 * frc I;
             patch :: 0.2;
             loss :: 0.1;
             init <S[8]>;",
        );
        assert!(found.contains(&DiagnosticKind::UndefinedState));
    }

    #[test]
    fn duplicate_probability_definition_is_reported() {
        let found = kinds(
            "S := loss.S; loss :: 0.1; loss :: 0.2; init <S[1]>;",
        );
        assert_eq!(found, vec![DiagnosticKind::DuplicateProbDef]);
    }

    #[test]
    fn missing_probability_definition_is_reported() {
        let found = kinds("S := go.E; E := go2.S; go :: 0.1; init <S[1]>;");
        assert_eq!(found, vec![DiagnosticKind::MissingProbDef]);
    }

    #[test]
    fn duplicate_action_in_one_state_is_reported() {
        let found = kinds("S := a.E + a.S; E := b.S; a :: 0.1; b :: 0.1; init <S[1]>;");
        assert_eq!(found, vec![DiagnosticKind::DuplicateAction]);
    }

    #[test]
    fn shared_action_across_states_is_fine() {
        let found = kinds(
            "S := hop.E; E := hop.S; hop :: 0.5; init <S[2]>;",
        );
        assert!(found.is_empty());
    }

    #[test]
    fn empty_population_is_reported() {
        let found = kinds("S := a.S; a :: 0.5; init <S[0]>;");
        assert_eq!(found, vec![DiagnosticKind::EmptyPopulation]);
    }

    #[test]
    fn constants_outside_the_unit_interval_are_reported() {
        let found = kinds("S := a.S; a :: 1.5; init <S[1]>;");
        assert_eq!(found, vec![DiagnosticKind::ProbOutOfRange]);
    }

    #[test]
    fn division_raises_a_warning_not_an_error() {
        let spec = parse_spec_source(
            "S := a.E; E := b.S; a :: 0.1 / max(frc S, 0.5); b :: 0.2; init <S[1]>;",
        )
        .unwrap();
        let found = validate(&spec);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].kind, DiagnosticKind::ContinuityWarning);
        assert_eq!(found[0].severity, Severity::Warning);
        assert!(crate::parser::parse_system_spec(
            "S := a.E; E := b.S; a :: 0.1 / max(frc S, 0.5); b :: 0.2; init <S[1]>;"
        )
        .is_ok());
    }

    #[test]
    fn namespace_overlap_is_reported() {
        let found = kinds(
            "S := a.E; E := b.S; a :: 0.1; b :: 0.2;
             label local x = E;
             label global x = frc E > 0.5;
             init <S[1]>;",
        );
        assert_eq!(found, vec![DiagnosticKind::AtomNamespaceOverlap]);
    }

    #[test]
    fn reserved_words_cannot_name_things() {
        let found = kinds("frc := a.frc; a :: 0.1; init <frc[1]>;");
        assert!(found.contains(&DiagnosticKind::ReservedName));
    }

    #[test]
    fn diagnostics_are_deterministic() {
        let src = "S := a.E + a.X9; a :: 1.5; b :: 0.1; init <S[0], S[1]>;";
        let spec = parse_spec_source(src).unwrap();
        let first = validate(&spec);
        let second = validate(&spec);
        assert_eq!(first, second);
        assert!(first.len() >= 4);
    }
}
