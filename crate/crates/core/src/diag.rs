//! Diagnostics for parsing and validation.
//!
//! Every parse or validation failure is reported as a [`Diagnostic`] carrying
//! a machine-readable [`DiagnosticKind`], a severity, an optional source
//! position, and a human-readable message.

use std::fmt;

/// A 1-based line/column position in a source file.
///
/// Positions are diagnostic metadata only. They deliberately do not
/// participate in equality, so that a pretty-printed and reparsed tree
/// compares structurally equal to the original.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Pos {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Machine-readable class of a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    /// Unexpected character or malformed literal.
    Lexical,
    /// Token stream does not match the grammar.
    Syntax,
    /// The same action name occurs twice in one state definition.
    DuplicateAction,
    /// A state constant is defined by more than one state definition.
    DuplicateStateDef,
    /// A state constant is referenced but never defined.
    UndefinedState,
    /// An action has no probability function definition.
    MissingProbDef,
    /// An action has more than one probability function definition.
    DuplicateProbDef,
    /// A probability definition names an action that no state uses.
    UnknownAction,
    /// An atom is bound by more than one label definition.
    DuplicateLabelDef,
    /// An atom is declared both as a local and as a global label.
    AtomNamespaceOverlap,
    /// A population count in the init statement is negative.
    NegativeCount,
    /// A duplicate state entry in the init statement.
    DuplicateInitEntry,
    /// The initial population is empty.
    EmptyPopulation,
    /// A probability literal or bound lies outside [0, 1].
    ProbOutOfRange,
    /// An until horizon is negative.
    NegativeHorizon,
    /// A reserved word is used as a state, action, or atom name.
    ReservedName,
    /// Division appears in a probability expression; continuity of the
    /// induced transition matrix is no longer guaranteed.
    ContinuityWarning,
}

impl DiagnosticKind {
    /// Stable short code, used in CLI output and corpus file names.
    pub fn code(self) -> &'static str {
        match self {
            DiagnosticKind::Lexical => "lexical",
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::DuplicateAction => "duplicate-action",
            DiagnosticKind::DuplicateStateDef => "duplicate-state-def",
            DiagnosticKind::UndefinedState => "undefined-state",
            DiagnosticKind::MissingProbDef => "missing-prob-def",
            DiagnosticKind::DuplicateProbDef => "duplicate-prob-def",
            DiagnosticKind::UnknownAction => "unknown-action",
            DiagnosticKind::DuplicateLabelDef => "duplicate-label-def",
            DiagnosticKind::AtomNamespaceOverlap => "atom-namespace-overlap",
            DiagnosticKind::NegativeCount => "negative-count",
            DiagnosticKind::DuplicateInitEntry => "duplicate-init-entry",
            DiagnosticKind::EmptyPopulation => "empty-population",
            DiagnosticKind::ProbOutOfRange => "prob-out-of-range",
            DiagnosticKind::NegativeHorizon => "negative-horizon",
            DiagnosticKind::ReservedName => "reserved-name",
            DiagnosticKind::ContinuityWarning => "continuity-warning",
        }
    }
}

/// Severity of a diagnostic. Warnings do not prevent a spec from loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A single parse or validation finding.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub severity: Severity,
    pub pos: Option<Pos>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(kind: DiagnosticKind, pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            severity: Severity::Error,
            pos: Some(pos),
            message: message.into(),
        }
    }

    pub fn warning(kind: DiagnosticKind, pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            severity: Severity::Warning,
            pos: Some(pos),
            message: message.into(),
        }
    }

    pub fn error_nopos(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            severity: Severity::Error,
            pos: None,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.pos {
            Some(pos) => write!(f, "{}[{}] at {}: {}", sev, self.kind.code(), pos, self.message),
            None => write!(f, "{}[{}]: {}", sev, self.kind.code(), self.message),
        }
    }
}

impl std::error::Error for Diagnostic {}
