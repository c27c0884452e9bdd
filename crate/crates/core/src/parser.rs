//! Recursive descent parsers for system specs and formulas.
//!
//! [`parse_spec_source`] handles syntax only; [`parse_system_spec`] chains it
//! with [`crate::validate::validate`] and fails when any error-severity
//! diagnostic is found. Formulas are parsed one per line by
//! [`parse_formulas_file`] or individually by [`parse_formula`].

use crate::ast::{
    BExp, BRel, BinOp, Branch, Expr, FBinOp, FuncExpr, GlobalLabelDef, InitEntry, LabelDefs,
    LocalLabelDef, ObjectSpec, ProbDef, StateDef, SystemSpec,
};
use crate::diag::{Diagnostic, DiagnosticKind, Pos};
use crate::formula::{Formula, PathFormula, ProbRel};
use crate::lexer::{tokenize, Token, TokenKind};
use crate::validate::validate;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, pos: 0 }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn peek_ident(&self) -> Option<&str> {
        match self.peek_kind() {
            Some(TokenKind::Ident(name)) => Some(name.as_str()),
            _ => None,
        }
    }

    fn advance(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).cloned();
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn here(&self) -> Pos {
        match self.peek() {
            Some(token) => token.pos,
            None => self
                .tokens
                .last()
                .map(|t| Pos::new(t.pos.line, t.pos.col + 1))
                .unwrap_or_else(|| Pos::new(1, 1)),
        }
    }

    fn syntax_error(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error(DiagnosticKind::Syntax, self.here(), message)
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let found = match self.peek_kind() {
            Some(kind) => kind.describe(),
            None => "end of input".to_string(),
        };
        self.syntax_error(format!("expected {}, found {}", expected, found))
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> Result<Token, Diagnostic> {
        match self.peek_kind() {
            Some(found) if *found == kind => Ok(self.advance().unwrap()),
            _ => Err(self.unexpected(expected)),
        }
    }

    fn expect_ident(&mut self, expected: &str) -> Result<(String, Pos), Diagnostic> {
        match self.peek_kind() {
            Some(TokenKind::Ident(_)) => {
                let token = self.advance().unwrap();
                match token.kind {
                    TokenKind::Ident(name) => Ok((name, token.pos)),
                    _ => unreachable!(),
                }
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }
}

/// Parses a system spec, reporting syntax errors only.
pub fn parse_spec_source(src: &str) -> Result<SystemSpec, Diagnostic> {
    let tokens = tokenize(src)?;
    let mut parser = Parser::new(tokens);
    let mut object = ObjectSpec::default();
    let mut probs = Vec::new();
    let mut labels = LabelDefs::default();
    let mut init: Option<Vec<InitEntry>> = None;
    while !parser.at_end() {
        match parser.peek_ident() {
            Some("label") => {
                parser.advance();
                parse_label_def(&mut parser, &mut labels)?;
            }
            Some("init") => {
                let pos = parser.here();
                parser.advance();
                let entries = parse_init_def(&mut parser)?;
                if init.is_some() {
                    return Err(Diagnostic::error(
                        DiagnosticKind::Syntax,
                        pos,
                        "more than one init statement",
                    ));
                }
                init = Some(entries);
            }
            Some(_) => {
                let (name, pos) = parser.expect_ident("a statement")?;
                match parser.peek_kind() {
                    Some(TokenKind::Assign) => {
                        parser.advance();
                        object.defs.push(parse_state_def(&mut parser, name, pos)?);
                    }
                    Some(TokenKind::DoubleColon) => {
                        parser.advance();
                        let expr = parse_expr(&mut parser)?;
                        parser.expect(TokenKind::Semi, "`;`")?;
                        probs.push(ProbDef {
                            action: name,
                            pos,
                            expr,
                        });
                    }
                    _ => {
                        return Err(parser.unexpected("`:=` or `::`"));
                    }
                }
            }
            None => {
                return Err(parser.unexpected("a statement"));
            }
        }
    }
    let init = init.ok_or_else(|| {
        Diagnostic::error_nopos(DiagnosticKind::Syntax, "missing init statement")
    })?;
    Ok(SystemSpec {
        object,
        probs,
        labels,
        init,
    })
}

/// Parses and validates a system spec. On failure, the returned list holds
/// either the single syntax error or every validation error found.
pub fn parse_system_spec(src: &str) -> Result<SystemSpec, Vec<Diagnostic>> {
    let spec = parse_spec_source(src).map_err(|d| vec![d])?;
    let errors: Vec<Diagnostic> = validate(&spec).into_iter().filter(|d| d.is_error()).collect();
    if errors.is_empty() {
        Ok(spec)
    } else {
        Err(errors)
    }
}

fn parse_state_def(parser: &mut Parser, name: String, pos: Pos) -> Result<StateDef, Diagnostic> {
    let mut branches = Vec::new();
    loop {
        let (action, action_pos) = parser.expect_ident("an action name")?;
        parser.expect(TokenKind::Dot, "`.`")?;
        let (target, target_pos) = parser.expect_ident("a target state")?;
        branches.push(Branch {
            action,
            target,
            action_pos,
            target_pos,
        });
        match parser.peek_kind() {
            Some(TokenKind::Plus) => {
                parser.advance();
            }
            Some(TokenKind::Semi) => {
                parser.advance();
                break;
            }
            _ => return Err(parser.unexpected("`+` or `;`")),
        }
    }
    Ok(StateDef {
        name,
        pos,
        branches,
    })
}

fn parse_expr(parser: &mut Parser) -> Result<Expr, Diagnostic> {
    let mut lhs = parse_term(parser)?;
    loop {
        let op = match parser.peek_kind() {
            Some(TokenKind::Plus) => BinOp::Add,
            Some(TokenKind::Minus) => BinOp::Sub,
            _ => break,
        };
        let op_pos = parser.here();
        parser.advance();
        let rhs = parse_term(parser)?;
        lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), op_pos);
    }
    Ok(lhs)
}

fn parse_term(parser: &mut Parser) -> Result<Expr, Diagnostic> {
    let mut lhs = parse_factor(parser)?;
    loop {
        let op = match parser.peek_kind() {
            Some(TokenKind::Star) => BinOp::Mul,
            Some(TokenKind::Slash) => BinOp::Div,
            _ => break,
        };
        let op_pos = parser.here();
        parser.advance();
        let rhs = parse_factor(parser)?;
        lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), op_pos);
    }
    Ok(lhs)
}

fn parse_factor(parser: &mut Parser) -> Result<Expr, Diagnostic> {
    match parser.peek_kind() {
        Some(TokenKind::Number { value, .. }) => {
            let value = *value;
            let pos = parser.here();
            parser.advance();
            Ok(Expr::Const(value, pos))
        }
        Some(TokenKind::Minus) => {
            parser.advance();
            let inner = parse_factor(parser)?;
            Ok(Expr::Neg(Box::new(inner)))
        }
        Some(TokenKind::LParen) => {
            parser.advance();
            let inner = parse_expr(parser)?;
            parser.expect(TokenKind::RParen, "`)`")?;
            Ok(inner)
        }
        Some(TokenKind::Ident(name)) => match name.as_str() {
            "frc" => {
                parser.advance();
                let (state, pos) = parser.expect_ident("a state name after `frc`")?;
                Ok(Expr::Frc(state, pos))
            }
            "min" | "max" => {
                let op = if name == "min" { BinOp::Min } else { BinOp::Max };
                let op_pos = parser.here();
                parser.advance();
                parser.expect(TokenKind::LParen, "`(`")?;
                let lhs = parse_expr(parser)?;
                parser.expect(TokenKind::Comma, "`,`")?;
                let rhs = parse_expr(parser)?;
                parser.expect(TokenKind::RParen, "`)`")?;
                Ok(Expr::Bin(op, Box::new(lhs), Box::new(rhs), op_pos))
            }
            other => Err(parser.syntax_error(format!(
                "unexpected identifier `{}` in expression; state fractions are written `frc {}`",
                other, other
            ))),
        },
        _ => Err(parser.unexpected("an expression")),
    }
}

fn parse_label_def(parser: &mut Parser, labels: &mut LabelDefs) -> Result<(), Diagnostic> {
    let (scope, scope_pos) = parser.expect_ident("`local` or `global`")?;
    match scope.as_str() {
        "local" => {
            let (atom, pos) = parser.expect_ident("an atom name")?;
            parser.expect(TokenKind::Eq, "`=`")?;
            let mut states = Vec::new();
            loop {
                let entry = parser.expect_ident("a state name")?;
                states.push(entry);
                match parser.peek_kind() {
                    Some(TokenKind::Comma) => {
                        parser.advance();
                    }
                    Some(TokenKind::Semi) => {
                        parser.advance();
                        break;
                    }
                    _ => return Err(parser.unexpected("`,` or `;`")),
                }
            }
            labels.locals.push(LocalLabelDef { atom, pos, states });
        }
        "global" => {
            let (atom, pos) = parser.expect_ident("an atom name")?;
            parser.expect(TokenKind::Eq, "`=`")?;
            let bexp = parse_bexp(parser)?;
            parser.expect(TokenKind::Semi, "`;`")?;
            labels.globals.push(GlobalLabelDef { atom, pos, bexp });
        }
        _ => {
            return Err(Diagnostic::error(
                DiagnosticKind::Syntax,
                scope_pos,
                format!("expected `local` or `global` after `label`, found `{}`", scope),
            ));
        }
    }
    Ok(())
}

fn parse_bexp(parser: &mut Parser) -> Result<BExp, Diagnostic> {
    let mut args = Vec::new();
    let func = parse_fexpr(parser, &mut args)?;
    let rel = match parser.peek_kind() {
        Some(TokenKind::Lt) => BRel::Lt,
        Some(TokenKind::Gt) => BRel::Gt,
        Some(TokenKind::Le) | Some(TokenKind::Ge) => {
            return Err(parser.syntax_error(
                "global labels allow only the strict comparisons `<` and `>`",
            ));
        }
        _ => return Err(parser.unexpected("`<` or `>`")),
    };
    parser.advance();
    let negative = if parser.peek_kind() == Some(&TokenKind::Minus) {
        parser.advance();
        true
    } else {
        false
    };
    let threshold = match parser.peek_kind() {
        Some(TokenKind::Number { value, .. }) => {
            let value = *value;
            parser.advance();
            if negative {
                -value
            } else {
                value
            }
        }
        _ => return Err(parser.unexpected("a threshold number")),
    };
    Ok(BExp {
        func,
        args,
        rel,
        threshold,
    })
}

fn parse_fexpr(
    parser: &mut Parser,
    args: &mut Vec<(String, Pos)>,
) -> Result<FuncExpr, Diagnostic> {
    let mut lhs = parse_fterm(parser, args)?;
    loop {
        let op = match parser.peek_kind() {
            Some(TokenKind::Plus) => FBinOp::Add,
            Some(TokenKind::Minus) => FBinOp::Sub,
            _ => break,
        };
        parser.advance();
        let rhs = parse_fterm(parser, args)?;
        lhs = FuncExpr::Bin(op, Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_fterm(
    parser: &mut Parser,
    args: &mut Vec<(String, Pos)>,
) -> Result<FuncExpr, Diagnostic> {
    let mut lhs = parse_ffactor(parser, args)?;
    loop {
        match parser.peek_kind() {
            Some(TokenKind::Star) => {
                parser.advance();
                let rhs = parse_ffactor(parser, args)?;
                lhs = FuncExpr::Bin(FBinOp::Mul, Box::new(lhs), Box::new(rhs));
            }
            Some(TokenKind::Slash) => {
                return Err(parser.syntax_error(
                    "division is not allowed in global label functions",
                ));
            }
            _ => break,
        }
    }
    Ok(lhs)
}

fn parse_ffactor(
    parser: &mut Parser,
    args: &mut Vec<(String, Pos)>,
) -> Result<FuncExpr, Diagnostic> {
    match parser.peek_kind() {
        Some(TokenKind::Number { value, .. }) => {
            let value = *value;
            let pos = parser.here();
            parser.advance();
            Ok(FuncExpr::Const(value, pos))
        }
        Some(TokenKind::Minus) => {
            parser.advance();
            let inner = parse_ffactor(parser, args)?;
            Ok(FuncExpr::Neg(Box::new(inner)))
        }
        Some(TokenKind::LParen) => {
            parser.advance();
            let inner = parse_fexpr(parser, args)?;
            parser.expect(TokenKind::RParen, "`)`")?;
            Ok(inner)
        }
        Some(TokenKind::Ident(name)) => match name.as_str() {
            "frc" => {
                parser.advance();
                let (state, pos) = parser.expect_ident("a state name after `frc`")?;
                args.push((state, pos));
                Ok(FuncExpr::Arg(args.len() - 1))
            }
            "min" | "max" => {
                let op = if name == "min" { FBinOp::Min } else { FBinOp::Max };
                parser.advance();
                parser.expect(TokenKind::LParen, "`(`")?;
                let lhs = parse_fexpr(parser, args)?;
                parser.expect(TokenKind::Comma, "`,`")?;
                let rhs = parse_fexpr(parser, args)?;
                parser.expect(TokenKind::RParen, "`)`")?;
                Ok(FuncExpr::Bin(op, Box::new(lhs), Box::new(rhs)))
            }
            other => Err(parser.syntax_error(format!(
                "unexpected identifier `{}` in a global label function",
                other
            ))),
        },
        _ => Err(parser.unexpected("a label function expression")),
    }
}

fn parse_init_def(parser: &mut Parser) -> Result<Vec<InitEntry>, Diagnostic> {
    parser.expect(TokenKind::Lt, "`<`")?;
    let mut entries = Vec::new();
    loop {
        let (state, pos) = parser.expect_ident("a state name")?;
        parser.expect(TokenKind::LBracket, "`[`")?;
        let negative = if parser.peek_kind() == Some(&TokenKind::Minus) {
            parser.advance();
            true
        } else {
            false
        };
        let count_pos = parser.here();
        let count = match parser.peek_kind() {
            Some(TokenKind::Number { int: Some(n), .. }) => {
                let n = *n;
                parser.advance();
                n
            }
            Some(TokenKind::Number { .. }) => {
                return Err(Diagnostic::error(
                    DiagnosticKind::Syntax,
                    count_pos,
                    "population counts must be plain integers",
                ));
            }
            _ => return Err(parser.unexpected("a population count")),
        };
        if negative {
            return Err(Diagnostic::error(
                DiagnosticKind::NegativeCount,
                count_pos,
                format!("population count of {} must not be negative", state),
            ));
        }
        parser.expect(TokenKind::RBracket, "`]`")?;
        entries.push(InitEntry { state, pos, count });
        match parser.peek_kind() {
            Some(TokenKind::Comma) => {
                parser.advance();
            }
            Some(TokenKind::Gt) => {
                parser.advance();
                break;
            }
            _ => return Err(parser.unexpected("`,` or `>`")),
        }
    }
    parser.expect(TokenKind::Semi, "`;`")?;
    Ok(entries)
}

/// Parses a single formula from `src`.
pub fn parse_formula(src: &str) -> Result<Formula, Diagnostic> {
    let tokens = tokenize(src)?;
    parse_formula_tokens(tokens)
}

fn parse_formula_tokens(tokens: Vec<Token>) -> Result<Formula, Diagnostic> {
    let mut parser = Parser::new(tokens);
    if parser.at_end() {
        return Err(parser.syntax_error("empty formula"));
    }
    let formula = parse_impl(&mut parser)?;
    if !parser.at_end() {
        return Err(parser.unexpected("end of formula"));
    }
    Ok(formula)
}

/// Parses a formula file: one formula per line, blank lines and comment-only
/// lines skipped.
pub fn parse_formulas_file(src: &str) -> Result<Vec<Formula>, Diagnostic> {
    let tokens = tokenize(src)?;
    let mut formulas = Vec::new();
    let mut line_tokens: Vec<Token> = Vec::new();
    for token in tokens {
        if let Some(last) = line_tokens.last() {
            if token.pos.line != last.pos.line {
                formulas.push(parse_formula_tokens(std::mem::take(&mut line_tokens))?);
            }
        }
        line_tokens.push(token);
    }
    if !line_tokens.is_empty() {
        formulas.push(parse_formula_tokens(line_tokens)?);
    }
    Ok(formulas)
}

fn parse_impl(parser: &mut Parser) -> Result<Formula, Diagnostic> {
    let lhs = parse_or(parser)?;
    if parser.peek_kind() == Some(&TokenKind::Imply) {
        parser.advance();
        let rhs = parse_impl(parser)?;
        return Ok(Formula::or(Formula::not(lhs), rhs));
    }
    Ok(lhs)
}

fn parse_or(parser: &mut Parser) -> Result<Formula, Diagnostic> {
    let mut lhs = parse_and(parser)?;
    while parser.peek_kind() == Some(&TokenKind::Pipe) {
        parser.advance();
        let rhs = parse_and(parser)?;
        lhs = Formula::or(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_and(parser: &mut Parser) -> Result<Formula, Diagnostic> {
    let mut lhs = parse_unary(parser)?;
    while parser.peek_kind() == Some(&TokenKind::Amp) {
        parser.advance();
        let rhs = parse_unary(parser)?;
        lhs = Formula::and(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_unary(parser: &mut Parser) -> Result<Formula, Diagnostic> {
    if parser.peek_kind() == Some(&TokenKind::Bang) {
        parser.advance();
        let inner = parse_unary(parser)?;
        return Ok(Formula::not(inner));
    }
    parse_primary(parser)
}

fn parse_primary(parser: &mut Parser) -> Result<Formula, Diagnostic> {
    match parser.peek_kind() {
        Some(TokenKind::LParen) => {
            parser.advance();
            let inner = parse_impl(parser)?;
            parser.expect(TokenKind::RParen, "`)`")?;
            Ok(inner)
        }
        Some(TokenKind::Ident(name)) => match name.as_str() {
            "P" => parse_prob(parser),
            "true" => {
                parser.advance();
                Ok(Formula::truth())
            }
            "false" => {
                parser.advance();
                Ok(Formula::not(Formula::truth()))
            }
            "X" | "U" => Err(parser.syntax_error(format!(
                "`{}` is reserved and cannot be used as an atom",
                name
            ))),
            _ => {
                let (name, _) = parser.expect_ident("an atom")?;
                Ok(Formula::Atom(name))
            }
        },
        _ => Err(parser.unexpected("a formula")),
    }
}

fn parse_prob(parser: &mut Parser) -> Result<Formula, Diagnostic> {
    parser.advance();
    let rel = match parser.peek_kind() {
        Some(TokenKind::Ge) => ProbRel::Ge,
        Some(TokenKind::Gt) => ProbRel::Gt,
        Some(TokenKind::Le) => ProbRel::Le,
        Some(TokenKind::Lt) => ProbRel::Lt,
        _ => return Err(parser.unexpected("a comparison after `P`")),
    };
    parser.advance();
    let negative = if parser.peek_kind() == Some(&TokenKind::Minus) {
        parser.advance();
        true
    } else {
        false
    };
    let bound_pos = parser.here();
    let bound = match parser.peek_kind() {
        Some(TokenKind::Number { value, .. }) => {
            let value = *value;
            parser.advance();
            if negative {
                -value
            } else {
                value
            }
        }
        _ => return Err(parser.unexpected("a probability bound")),
    };
    if !(0.0..=1.0).contains(&bound) {
        return Err(Diagnostic::error(
            DiagnosticKind::ProbOutOfRange,
            bound_pos,
            format!("probability bound {} lies outside [0, 1]", bound),
        ));
    }
    parser.expect(TokenKind::LBracket, "`[`")?;
    let path = parse_path(parser)?;
    parser.expect(TokenKind::RBracket, "`]`")?;
    Ok(Formula::prob(rel, bound, path))
}

fn parse_path(parser: &mut Parser) -> Result<PathFormula, Diagnostic> {
    if parser.peek_ident() == Some("X") {
        parser.advance();
        let inner = parse_impl(parser)?;
        return Ok(PathFormula::Next(inner));
    }
    let lhs = parse_impl(parser)?;
    match parser.peek_ident() {
        Some("U") => {
            parser.advance();
        }
        _ => return Err(parser.unexpected("`U<=` in a path formula")),
    }
    parser.expect(TokenKind::Le, "`<=` after `U`")?;
    let negative = if parser.peek_kind() == Some(&TokenKind::Minus) {
        parser.advance();
        true
    } else {
        false
    };
    let horizon_pos = parser.here();
    let horizon = match parser.peek_kind() {
        Some(TokenKind::Number { int: Some(n), .. }) => {
            let n = *n;
            parser.advance();
            n
        }
        Some(TokenKind::Number { .. }) => {
            return Err(Diagnostic::error(
                DiagnosticKind::Syntax,
                horizon_pos,
                "until horizons must be plain integers",
            ));
        }
        _ => return Err(parser.unexpected("an until horizon")),
    };
    if negative {
        return Err(Diagnostic::error(
            DiagnosticKind::NegativeHorizon,
            horizon_pos,
            "until horizons must not be negative",
        ));
    }
    let horizon: u32 = horizon.try_into().map_err(|_| {
        Diagnostic::error(DiagnosticKind::Syntax, horizon_pos, "until horizon too large")
    })?;
    let rhs = parse_impl(parser)?;
    Ok(PathFormula::Until { lhs, rhs, horizon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::TRUE_ATOM;

    const EPIDEMIC: &str = "\
S := inf_ext.E + inf_sus.E;
E := activate.I;
I := patch.R;
R := loss.S;

inf_ext :: 0.1;
inf_sus :: 0.2 * frc I;
activate :: 0.4;
patch :: 0.2;
loss :: 0.1;

label local i = I;
label local e = E;
label local r = R;
label global LowInf = (frc I) < 0.25;

init <S[8]>;
";

    #[test]
    fn parses_the_epidemic_spec() {
        let spec = parse_spec_source(EPIDEMIC).unwrap();
        assert_eq!(spec.state_count(), 4);
        assert_eq!(spec.state_name(0), "S");
        assert_eq!(spec.state_name(3), "R");
        assert_eq!(spec.object.defs[0].branches.len(), 2);
        assert_eq!(spec.probs.len(), 5);
        assert_eq!(spec.labels.locals.len(), 3);
        assert_eq!(spec.labels.globals.len(), 1);
        assert_eq!(spec.population(), 8);
        assert_eq!(spec.first_object_state(), Some(0));
    }

    #[test]
    fn global_label_is_factored_over_frc_occurrences() {
        let spec = parse_spec_source(EPIDEMIC).unwrap();
        let bexp = &spec.labels.globals[0].bexp;
        assert_eq!(bexp.args.len(), 1);
        assert_eq!(bexp.args[0].0, "I");
        assert_eq!(bexp.rel, BRel::Lt);
        assert_eq!(bexp.threshold, 0.25);
        assert_eq!(bexp.func, FuncExpr::Arg(0));
    }

    #[test]
    fn division_in_global_label_is_rejected() {
        let err = parse_spec_source(
            "S := a.S; a :: 1.0; label global g = frc S / 2 > 0.1; init <S[1]>;",
        )
        .unwrap_err();
        assert_eq!(err.kind, DiagnosticKind::Syntax);
        assert!(err.message.contains("division"));
    }

    #[test]
    fn negative_count_has_its_own_class() {
        let err =
            parse_spec_source("S := a.S; a :: 1.0; init <S[-1]>;").unwrap_err();
        assert_eq!(err.kind, DiagnosticKind::NegativeCount);
    }

    #[test]
    fn missing_semicolon_is_a_syntax_error() {
        let err = parse_spec_source("S := a.S\ninit <S[1]>;").unwrap_err();
        assert_eq!(err.kind, DiagnosticKind::Syntax);
        assert_eq!(err.pos.unwrap().line, 2);
    }

    #[test]
    fn parses_an_until_formula() {
        let formula = parse_formula("P<=0.5 [ true U<=30 i ]").unwrap();
        let expected = Formula::prob(
            ProbRel::Le,
            0.5,
            PathFormula::Until {
                lhs: Formula::atom(TRUE_ATOM),
                rhs: Formula::atom("i"),
                horizon: 30,
            },
        );
        assert_eq!(formula, expected);
    }

    #[test]
    fn parses_a_next_formula() {
        let formula = parse_formula("P>0.3 [ X i ]").unwrap();
        let expected = Formula::prob(ProbRel::Gt, 0.3, PathFormula::Next(Formula::atom("i")));
        assert_eq!(formula, expected);
    }

    #[test]
    fn conjunction_desugars_through_not_and_or() {
        let formula = parse_formula("a & b").unwrap();
        assert_eq!(formula, Formula::and(Formula::atom("a"), Formula::atom("b")));
    }

    #[test]
    fn implication_desugars_to_disjunction() {
        let formula = parse_formula("a => b").unwrap();
        assert_eq!(
            formula,
            Formula::or(Formula::not(Formula::atom("a")), Formula::atom("b"))
        );
    }

    #[test]
    fn nested_probability_operators_parse() {
        let formula =
            parse_formula("P<=0.1 [ true U<=30 (!e & !i & P>0.3 [ true U<=5 i ]) ]").unwrap();
        match formula {
            Formula::Prob { path, .. } => match *path {
                PathFormula::Until { horizon, .. } => assert_eq!(horizon, 30),
                _ => panic!("expected until"),
            },
            _ => panic!("expected P operator"),
        }
    }

    #[test]
    fn bound_outside_unit_interval_is_rejected() {
        let err = parse_formula("P<=1.5 [ X a ]").unwrap_err();
        assert_eq!(err.kind, DiagnosticKind::ProbOutOfRange);
    }

    #[test]
    fn negative_horizon_is_rejected() {
        let err = parse_formula("P<0.5 [ true U<=-3 a ]").unwrap_err();
        assert_eq!(err.kind, DiagnosticKind::NegativeHorizon);
    }

    #[test]
    fn formulas_file_is_line_oriented() {
        let formulas = parse_formulas_file(
            "# first\nP<=0.5 [ true U<=30 i ]\n\nP>0.3 [ X i ]\n",
        )
        .unwrap();
        assert_eq!(formulas.len(), 2);
    }

    #[test]
    fn trailing_tokens_are_rejected() {
        assert!(parse_formula("a b").is_err());
    }

    #[test]
    fn printing_preserves_disjunction_shape() {
        for src in [
            "x => (y => z)",
            "(x | y) & !z",
            "a | (b | c)",
            "(a | b) | c",
            "P<0.5 [ (x | y) U<=3 (P>=0.25 [ X z ]) ]",
        ] {
            let formula = parse_formula(src).unwrap();
            let reparsed = parse_formula(&formula.to_string()).unwrap();
            assert_eq!(reparsed, formula, "round-trip of `{}`", src);
        }
    }
}
