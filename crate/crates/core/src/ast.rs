//! Abstract syntax for population model specifications.
//!
//! A specification consists of four parts: an object specification (the
//! per-object transition structure), probability function definitions for
//! every action, label definitions (local and global atomic propositions),
//! and an initial population. [`SystemSpec`] bundles them and implements
//! `Display` as a pretty-printer whose output reparses to a structurally
//! equal tree.

use std::collections::BTreeSet;
use std::fmt;

use crate::diag::Pos;

/// Words that may not be used as state, action, or atom names.
pub const RESERVED_WORDS: &[&str] = &[
    "frc", "min", "max", "label", "local", "global", "init", "true", "false", "P", "X", "U",
];

/// The always-true atomic proposition, satisfied in every state.
pub const TRUE_ATOM: &str = "true";

/// One action branch `action.Target` of a state definition.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub action: String,
    pub target: String,
    pub action_pos: Pos,
    pub target_pos: Pos,
}

/// A state definition `C := a1.C1 + a2.C2;`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDef {
    pub name: String,
    pub pos: Pos,
    pub branches: Vec<Branch>,
}

/// The ordered list of state definitions. Definition order fixes the total
/// order on states used by occupancy vectors and transition matrices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObjectSpec {
    pub defs: Vec<StateDef>,
}

/// Binary operators of probability function expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
}

/// A probability function expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// A real constant; must lie in [0, 1].
    Const(f64, Pos),
    /// `frc C`, the fraction of objects currently in state `C`.
    Frc(String, Pos),
    /// Unary minus.
    Neg(Box<Expr>),
    /// Binary operation; the position is the operator's, used for
    /// continuity warnings on division.
    Bin(BinOp, Box<Expr>, Box<Expr>, Pos),
}

/// A probability function definition `action :: expr;`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDef {
    pub action: String,
    pub pos: Pos,
    pub expr: Expr,
}

/// Operators usable inside global label functions. Division is excluded so
/// that the function stays continuous on the occupancy simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FBinOp {
    Add,
    Sub,
    Mul,
    Min,
    Max,
}

/// The function part of a global label, over argument placeholders.
#[derive(Debug, Clone, PartialEq)]
pub enum FuncExpr {
    /// The i-th `frc C` occurrence of the label definition.
    Arg(usize),
    Const(f64, Pos),
    Neg(Box<FuncExpr>),
    Bin(FBinOp, Box<FuncExpr>, Box<FuncExpr>),
}

/// Comparison relation of a global label. Only the strict relations are
/// allowed, so that satisfaction sets are open under the limit semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BRel {
    Lt,
    Gt,
}

impl BRel {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            BRel::Lt => lhs < rhs,
            BRel::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BRel::Lt => "<",
            BRel::Gt => ">",
        }
    }
}

/// A global label body `F(frc C1, ..., frc Cq) rel r` in factored form:
/// the function over placeholders, the state arguments in occurrence order,
/// the relation, and the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct BExp {
    pub func: FuncExpr,
    pub args: Vec<(String, Pos)>,
    pub rel: BRel,
    pub threshold: f64,
}

/// `label local atom = C1, C2;`
#[derive(Debug, Clone, PartialEq)]
pub struct LocalLabelDef {
    pub atom: String,
    pub pos: Pos,
    pub states: Vec<(String, Pos)>,
}

/// `label global atom = bexp;`
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalLabelDef {
    pub atom: String,
    pub pos: Pos,
    pub bexp: BExp,
}

/// All label definitions of a spec, in source order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabelDefs {
    pub locals: Vec<LocalLabelDef>,
    pub globals: Vec<GlobalLabelDef>,
}

impl LabelDefs {
    /// True if `atom` is declared as a local label.
    pub fn is_local(&self, atom: &str) -> bool {
        self.locals.iter().any(|l| l.atom == atom)
    }

    /// The global definition for `atom`, if any.
    pub fn global_def(&self, atom: &str) -> Option<&GlobalLabelDef> {
        self.globals.iter().find(|g| g.atom == atom)
    }

    /// True if the local label `atom` applies to state `state`.
    pub fn local_holds(&self, atom: &str, state: &str) -> bool {
        self.locals
            .iter()
            .filter(|l| l.atom == atom)
            .any(|l| l.states.iter().any(|(s, _)| s == state))
    }

    /// The set of local atoms of `state`, sorted.
    pub fn local_atoms_of(&self, state: &str) -> BTreeSet<&str> {
        self.locals
            .iter()
            .filter(|l| l.states.iter().any(|(s, _)| s == state))
            .map(|l| l.atom.as_str())
            .collect()
    }
}

/// One `C[count]` entry of the init statement.
#[derive(Debug, Clone, PartialEq)]
pub struct InitEntry {
    pub state: String,
    pub pos: Pos,
    pub count: u64,
}

/// A complete, parsed system specification.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub object: ObjectSpec,
    pub probs: Vec<ProbDef>,
    pub labels: LabelDefs,
    pub init: Vec<InitEntry>,
}

impl SystemSpec {
    /// Number of states S.
    pub fn state_count(&self) -> usize {
        self.object.defs.len()
    }

    /// Index of `name` in the total state order, if defined.
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.object.defs.iter().position(|d| d.name == name)
    }

    /// Name of the state at `index`.
    pub fn state_name(&self, index: usize) -> &str {
        &self.object.defs[index].name
    }

    /// The probability definition for `action`, if any.
    pub fn prob_def(&self, action: &str) -> Option<&ProbDef> {
        self.probs.iter().find(|p| p.action == action)
    }

    /// Total population size N.
    pub fn population(&self) -> u64 {
        self.init.iter().map(|e| e.count).sum()
    }

    /// Initial counts per state, in state order.
    pub fn initial_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.state_count()];
        for entry in &self.init {
            if let Some(i) = self.state_index(&entry.state) {
                counts[i] += entry.count;
            }
        }
        counts
    }

    /// State index of the tagged first object: the first init entry with a
    /// positive count.
    pub fn first_object_state(&self) -> Option<usize> {
        self.init
            .iter()
            .find(|e| e.count > 0)
            .and_then(|e| self.state_index(&e.state))
    }

    /// A copy of this spec whose initial counts are scaled proportionally to
    /// sum to `n`, using largest-remainder rounding. The tagged first
    /// object's state keeps at least one object.
    pub fn scaled_to_population(&self, n: u64) -> Result<SystemSpec, String> {
        if n == 0 {
            return Err("population must be >= 1".to_string());
        }
        let old_n = self.population();
        if old_n == 0 {
            return Err("population must be >= 1".to_string());
        }
        let mut scaled: Vec<(usize, u64, f64)> = Vec::with_capacity(self.init.len());
        let mut assigned: u64 = 0;
        for (idx, entry) in self.init.iter().enumerate() {
            let share = entry.count as f64 * n as f64 / old_n as f64;
            let floor = share.floor() as u64;
            assigned += floor;
            scaled.push((idx, floor, share - share.floor()));
        }
        let mut leftover = n - assigned;
        scaled.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));
        for item in scaled.iter_mut() {
            if leftover == 0 {
                break;
            }
            item.1 += 1;
            leftover -= 1;
        }
        scaled.sort_by_key(|item| item.0);
        let mut spec = self.clone();
        for (entry, (_, count, _)) in spec.init.iter_mut().zip(scaled.iter()) {
            entry.count = *count;
        }
        let first = self.init.iter().position(|e| e.count > 0);
        if let Some(i) = first {
            if spec.init[i].count == 0 {
                return Err(format!(
                    "scaling to population {} leaves the first object's state {} empty",
                    n, spec.init[i].state
                ));
            }
        }
        Ok(spec)
    }
}

fn fmt_f64(value: f64) -> String {
    format!("{}", value)
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Const(..) | Expr::Frc(..) => 4,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Min | BinOp::Max, ..) => 4,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.prec();
        let parens = prec < min_prec;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Const(v, _) => write!(f, "{}", fmt_f64(*v))?,
            Expr::Frc(state, _) => write!(f, "frc {}", state)?,
            Expr::Neg(inner) => {
                write!(f, "-")?;
                inner.fmt_prec(f, 3)?;
            }
            Expr::Bin(op @ (BinOp::Min | BinOp::Max), lhs, rhs, _) => {
                let name = if *op == BinOp::Min { "min" } else { "max" };
                write!(f, "{}(", name)?;
                lhs.fmt_prec(f, 0)?;
                write!(f, ", ")?;
                rhs.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            Expr::Bin(op, lhs, rhs, _) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Min | BinOp::Max => unreachable!(),
                };
                lhs.fmt_prec(f, prec)?;
                write!(f, " {} ", sym)?;
                rhs.fmt_prec(f, prec + 1)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl FuncExpr {
    fn prec(&self) -> u8 {
        match self {
            FuncExpr::Arg(_) | FuncExpr::Const(..) => 4,
            FuncExpr::Neg(_) => 3,
            FuncExpr::Bin(FBinOp::Min | FBinOp::Max, ..) => 4,
            FuncExpr::Bin(FBinOp::Mul, ..) => 2,
            FuncExpr::Bin(FBinOp::Add | FBinOp::Sub, ..) => 1,
        }
    }

    fn fmt_prec(
        &self,
        f: &mut fmt::Formatter<'_>,
        args: &[(String, Pos)],
        min_prec: u8,
    ) -> fmt::Result {
        let prec = self.prec();
        let parens = prec < min_prec;
        if parens {
            write!(f, "(")?;
        }
        match self {
            FuncExpr::Arg(i) => write!(f, "frc {}", args[*i].0)?,
            FuncExpr::Const(v, _) => write!(f, "{}", fmt_f64(*v))?,
            FuncExpr::Neg(inner) => {
                write!(f, "-")?;
                inner.fmt_prec(f, args, 3)?;
            }
            FuncExpr::Bin(op @ (FBinOp::Min | FBinOp::Max), lhs, rhs) => {
                let name = if *op == FBinOp::Min { "min" } else { "max" };
                write!(f, "{}(", name)?;
                lhs.fmt_prec(f, args, 0)?;
                write!(f, ", ")?;
                rhs.fmt_prec(f, args, 0)?;
                write!(f, ")")?;
            }
            FuncExpr::Bin(op, lhs, rhs) => {
                let sym = match op {
                    FBinOp::Add => "+",
                    FBinOp::Sub => "-",
                    FBinOp::Mul => "*",
                    FBinOp::Min | FBinOp::Max => unreachable!(),
                };
                lhs.fmt_prec(f, args, prec)?;
                write!(f, " {} ", sym)?;
                rhs.fmt_prec(f, args, prec + 1)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for BExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.func.fmt_prec(f, &self.args, 0)?;
        write!(f, " {} {}", self.rel.symbol(), fmt_f64(self.threshold))
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for def in &self.object.defs {
            write!(f, "{} := ", def.name)?;
            for (i, branch) in def.branches.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "{}.{}", branch.action, branch.target)?;
            }
            writeln!(f, ";")?;
        }
        writeln!(f)?;
        for prob in &self.probs {
            writeln!(f, "{} :: {};", prob.action, prob.expr)?;
        }
        if !self.labels.locals.is_empty() || !self.labels.globals.is_empty() {
            writeln!(f)?;
        }
        for local in &self.labels.locals {
            write!(f, "label local {} = ", local.atom)?;
            for (i, (state, _)) in local.states.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", state)?;
            }
            writeln!(f, ";")?;
        }
        for global in &self.labels.globals {
            writeln!(f, "label global {} = {};", global.atom, global.bexp)?;
        }
        writeln!(f)?;
        write!(f, "init <")?;
        for (i, entry) in self.init.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}[{}]", entry.state, entry.count)?;
        }
        writeln!(f, ">;")
    }
}
