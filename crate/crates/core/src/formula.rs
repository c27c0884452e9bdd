//! Abstract syntax for bounded PCTL formulas.
//!
//! The core grammar is atoms, negation, disjunction, and the probabilistic
//! path operator with next and bounded until. Conjunction, implication, and
//! the `true`/`false` literals are parsed as sugar: `true` becomes the
//! reserved always-true atom, `false` its negation, and `&`/`=>` are
//! rewritten through `!` and `|`.

use std::fmt;

use crate::ast::TRUE_ATOM;

/// Comparison relation of the probabilistic operator `P rel p [path]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbRel {
    Ge,
    Gt,
    Le,
    Lt,
}

impl ProbRel {
    pub fn holds(self, prob: f64, bound: f64) -> bool {
        match self {
            ProbRel::Ge => prob >= bound,
            ProbRel::Gt => prob > bound,
            ProbRel::Le => prob <= bound,
            ProbRel::Lt => prob < bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ProbRel::Ge => ">=",
            ProbRel::Gt => ">",
            ProbRel::Le => "<=",
            ProbRel::Lt => "<",
        }
    }
}

/// A state formula.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    /// An atomic proposition, local or global; [`TRUE_ATOM`] holds everywhere.
    Atom(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `P rel bound [path]`.
    Prob {
        rel: ProbRel,
        bound: f64,
        path: Box<PathFormula>,
    },
}

/// A path formula under the probabilistic operator.
#[derive(Debug, Clone, PartialEq)]
pub enum PathFormula {
    /// `X phi`.
    Next(Formula),
    /// `lhs U<=horizon rhs`.
    Until {
        lhs: Formula,
        rhs: Formula,
        horizon: u32,
    },
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn truth() -> Self {
        Formula::Atom(TRUE_ATOM.to_string())
    }

    pub fn not(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    /// Conjunction, desugared as `!(!lhs | !rhs)`.
    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Formula::not(Formula::or(Formula::not(lhs), Formula::not(rhs)))
    }

    pub fn prob(rel: ProbRel, bound: f64, path: PathFormula) -> Self {
        Formula::Prob {
            rel,
            bound,
            path: Box::new(path),
        }
    }

    /// A copy of this formula with the outermost until horizon replaced by
    /// `horizon`. Returns `None` when the root is not a `P[... U<=k ...]`.
    pub fn with_outer_horizon(&self, horizon: u32) -> Option<Formula> {
        match self {
            Formula::Prob { rel, bound, path } => match path.as_ref() {
                PathFormula::Until { lhs, rhs, .. } => Some(Formula::prob(
                    *rel,
                    *bound,
                    PathFormula::Until {
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                        horizon,
                    },
                )),
                PathFormula::Next(_) => None,
            },
            Formula::Not(inner) => Some(Formula::not(inner.with_outer_horizon(horizon)?)),
            _ => None,
        }
    }
}

/// Where a subformula sits in its parent, for deciding parentheses.
///
/// `|` parses left-associatively, so a disjunction may print bare as the
/// left operand of another disjunction but must be parenthesized as the
/// right operand, and always under `!`, `X`, or beside `U`.
#[derive(Clone, Copy, PartialEq, Eq)]
enum ParenCtx {
    Free,
    OrRhs,
    Unary,
}

impl Formula {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: ParenCtx) -> fmt::Result {
        match self {
            Formula::Atom(name) => write!(f, "{}", name),
            Formula::Not(inner) => {
                write!(f, "!")?;
                inner.fmt_prec(f, ParenCtx::Unary)
            }
            Formula::Or(lhs, rhs) => {
                let parens = ctx != ParenCtx::Free;
                if parens {
                    write!(f, "(")?;
                }
                lhs.fmt_prec(f, ParenCtx::Free)?;
                write!(f, " | ")?;
                rhs.fmt_prec(f, ParenCtx::OrRhs)?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Prob { rel, bound, path } => {
                write!(f, "P{}{} [{}]", rel.symbol(), bound, path)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, ParenCtx::Free)
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathFormula::Next(inner) => {
                write!(f, "X ")?;
                inner.fmt_prec(f, ParenCtx::Unary)
            }
            PathFormula::Until { lhs, rhs, horizon } => {
                lhs.fmt_prec(f, ParenCtx::Unary)?;
                write!(f, " U<={} ", horizon)?;
                rhs.fmt_prec(f, ParenCtx::Unary)
            }
        }
    }
}
