//! Tokenizer shared by the system spec and formula parsers.
//!
//! The lexer is keyword-free: words like `frc`, `init`, or `U` come out as
//! plain identifiers and are given meaning by the parsers. Comments run from
//! `//` or `#` to the end of the line.

use crate::diag::{Diagnostic, DiagnosticKind, Pos};

/// One lexical token.
#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// A numeric literal. `int` is set when the literal is written as a
    /// plain unsigned integer that fits in a `u64`.
    Number { value: f64, int: Option<u64> },
    Semi,
    Comma,
    Dot,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Le,
    Ge,
    Assign,
    DoubleColon,
    Eq,
    Imply,
    Bang,
    Amp,
    Pipe,
}

impl TokenKind {
    /// Short description for error messages.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("identifier `{}`", name),
            TokenKind::Number { value, .. } => format!("number `{}`", value),
            TokenKind::Semi => "`;`".to_string(),
            TokenKind::Comma => "`,`".to_string(),
            TokenKind::Dot => "`.`".to_string(),
            TokenKind::Plus => "`+`".to_string(),
            TokenKind::Minus => "`-`".to_string(),
            TokenKind::Star => "`*`".to_string(),
            TokenKind::Slash => "`/`".to_string(),
            TokenKind::LParen => "`(`".to_string(),
            TokenKind::RParen => "`)`".to_string(),
            TokenKind::LBracket => "`[`".to_string(),
            TokenKind::RBracket => "`]`".to_string(),
            TokenKind::Lt => "`<`".to_string(),
            TokenKind::Gt => "`>`".to_string(),
            TokenKind::Le => "`<=`".to_string(),
            TokenKind::Ge => "`>=`".to_string(),
            TokenKind::Assign => "`:=`".to_string(),
            TokenKind::DoubleColon => "`::`".to_string(),
            TokenKind::Eq => "`=`".to_string(),
            TokenKind::Imply => "`=>`".to_string(),
            TokenKind::Bang => "`!`".to_string(),
            TokenKind::Amp => "`&`".to_string(),
            TokenKind::Pipe => "`|`".to_string(),
        }
    }
}

/// A token with its source position.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

/// Tokenizes `src`, failing on the first unexpected character.
pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos::new(line, col);
        let advance = |i: &mut usize, col: &mut u32| {
            *i += 1;
            *col += 1;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                advance(&mut i, &mut col);
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    advance(&mut i, &mut col);
                }
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    advance(&mut i, &mut col);
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    advance(&mut i, &mut col);
                }
                let name: String = chars[start..i].iter().collect();
                tokens.push(Token {
                    kind: TokenKind::Ident(name),
                    pos,
                });
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(&mut i, &mut col);
                }
                let mut is_int = true;
                if chars.get(i) == Some(&'.')
                    && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())
                {
                    is_int = false;
                    advance(&mut i, &mut col);
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        advance(&mut i, &mut col);
                    }
                }
                if matches!(chars.get(i), Some('e') | Some('E')) {
                    let mut j = i + 1;
                    if matches!(chars.get(j), Some('+') | Some('-')) {
                        j += 1;
                    }
                    if chars.get(j).is_some_and(|d| d.is_ascii_digit()) {
                        is_int = false;
                        while i < j {
                            advance(&mut i, &mut col);
                        }
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            advance(&mut i, &mut col);
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text.parse().map_err(|_| {
                    Diagnostic::error(
                        DiagnosticKind::Lexical,
                        pos,
                        format!("malformed number literal `{}`", text),
                    )
                })?;
                let int = if is_int { text.parse::<u64>().ok() } else { None };
                tokens.push(Token {
                    kind: TokenKind::Number { value, int },
                    pos,
                });
            }
            ':' => {
                if chars.get(i + 1) == Some(&'=') {
                    i += 2;
                    col += 2;
                    tokens.push(Token {
                        kind: TokenKind::Assign,
                        pos,
                    });
                } else if chars.get(i + 1) == Some(&':') {
                    i += 2;
                    col += 2;
                    tokens.push(Token {
                        kind: TokenKind::DoubleColon,
                        pos,
                    });
                } else {
                    return Err(Diagnostic::error(
                        DiagnosticKind::Lexical,
                        pos,
                        "expected `:=` or `::` after `:`",
                    ));
                }
            }
            '<' | '>' | '=' => {
                let two = chars.get(i + 1).copied();
                let (kind, len) = match (c, two) {
                    ('<', Some('=')) => (TokenKind::Le, 2),
                    ('>', Some('=')) => (TokenKind::Ge, 2),
                    ('=', Some('>')) => (TokenKind::Imply, 2),
                    ('<', _) => (TokenKind::Lt, 1),
                    ('>', _) => (TokenKind::Gt, 1),
                    ('=', _) => (TokenKind::Eq, 1),
                    _ => unreachable!(),
                };
                i += len;
                col += len as u32;
                tokens.push(Token { kind, pos });
            }
            _ => {
                let kind = match c {
                    ';' => TokenKind::Semi,
                    ',' => TokenKind::Comma,
                    '.' => TokenKind::Dot,
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '*' => TokenKind::Star,
                    '/' => TokenKind::Slash,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    '!' => TokenKind::Bang,
                    '&' => TokenKind::Amp,
                    '|' => TokenKind::Pipe,
                    other => {
                        return Err(Diagnostic::error(
                            DiagnosticKind::Lexical,
                            pos,
                            format!("unexpected character `{}`", other.escape_default()),
                        ));
                    }
                };
                advance(&mut i, &mut col);
                tokens.push(Token { kind, pos });
            }
        }
    }
    Ok(tokens)
}
