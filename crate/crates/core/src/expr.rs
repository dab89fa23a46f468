//! The surface-definition expression language: parsing and evaluation.
//!
//! Grammar (EBNF):
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := '-' factor | power
//! power   := atom ('^' number)?
//! atom    := number | ident | func '(' expr ')' | '(' expr ')'
//! ```
//! Identifiers are `u1,u2,u3`; the exponent of `^` must be a numeric
//! literal (optionally signed), so the power operator binds tighter than
//! unary minus: `-u1^2` is `-(u1^2)`. General powers are written
//! `exp(b*log(a))`.

use crate::jet::{Jet, JetError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("unknown identifier `{name}` at {line}:{col}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        col: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Abs,
    Cbrt,
}

impl Function {
    fn from_name(name: &str) -> Option<Function> {
        match name {
            "sin" => Some(Function::Sin),
            "cos" => Some(Function::Cos),
            "tan" => Some(Function::Tan),
            "exp" => Some(Function::Exp),
            "log" => Some(Function::Log),
            "sqrt" => Some(Function::Sqrt),
            "sinh" => Some(Function::Sinh),
            "cosh" => Some(Function::Cosh),
            "abs" => Some(Function::Abs),
            "cbrt" => Some(Function::Cbrt),
            _ => None,
        }
    }
}

/// Abstract syntax tree over the chart variables `u1,u2,u3` (indices 0..2).
#[derive(Clone, Debug, PartialEq)]
pub enum Expression {
    Number(f64),
    Variable(usize),
    Neg(Box<Expression>),
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
    Div(Box<Expression>, Box<Expression>),
    /// Power with a constant exponent, fixed at parse time.
    Pow(Box<Expression>, f64),
    Call(Function, Box<Expression>),
}

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    line: usize,
    col: usize,
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = source.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match ch {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '0'..='9' => {
                let mut text = String::new();
                while let Some(c) = chars.peek() {
                    if c.is_ascii_digit() || *c == '.' {
                        text.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                if let Some(&e) = chars.peek() {
                    if e == 'e' || e == 'E' {
                        let mut clone = chars.clone();
                        clone.next();
                        let next = clone.peek().copied();
                        if matches!(next, Some(c) if c.is_ascii_digit() || c == '+' || c == '-') {
                            text.push(bump(&mut chars));
                            if matches!(chars.peek(), Some('+') | Some('-')) {
                                text.push(bump(&mut chars));
                            }
                            while matches!(chars.peek(), Some(c) if c.is_ascii_digit()) {
                                text.push(bump(&mut chars));
                            }
                        }
                    }
                }
                let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                    line: tline,
                    col: tcol,
                    msg: format!("malformed number `{text}`"),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Number(value),
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::new();
                while let Some(c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || *c == '_' {
                        text.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text),
                    line: tline,
                    col: tcol,
                });
            }
            _ => {
                let c = bump(&mut chars);
                let kind = match c {
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '*' => TokenKind::Star,
                    '/' => TokenKind::Slash,
                    '^' => TokenKind::Caret,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    other => {
                        return Err(ParseError::Syntax {
                            line: tline,
                            col: tcol,
                            msg: format!("unexpected character `{other}`"),
                        })
                    }
                };
                tokens.push(Token {
                    kind,
                    line: tline,
                    col: tcol,
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(k) if *k == kind => {
                self.next();
                Ok(())
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(TokenKind::Plus) => {
                    self.next();
                    lhs = Expression::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(TokenKind::Minus) => {
                    self.next();
                    lhs = Expression::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(TokenKind::Star) => {
                    self.next();
                    lhs = Expression::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(TokenKind::Slash) => {
                    self.next();
                    lhs = Expression::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expression, ParseError> {
        if matches!(self.peek(), Some(TokenKind::Minus)) {
            self.next();
            return Ok(Expression::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(TokenKind::Caret)) {
            self.next();
            let negated = if matches!(self.peek(), Some(TokenKind::Minus)) {
                self.next();
                true
            } else {
                false
            };
            match self.next() {
                Some(Token {
                    kind: TokenKind::Number(n),
                    ..
                }) => {
                    let exponent = if negated { -n } else { n };
                    return Ok(Expression::Pow(Box::new(base), exponent));
                }
                _ => return Err(self.error("expected a constant exponent after `^`")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expression, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token {
                kind: TokenKind::Number(n),
                ..
            }) => Ok(Expression::Number(n)),
            Some(Token {
                kind: TokenKind::Ident(name),
                ..
            }) => {
                if let Some(axis) = match name.as_str() {
                    "u1" => Some(0),
                    "u2" => Some(1),
                    "u3" => Some(2),
                    _ => None,
                } {
                    return Ok(Expression::Variable(axis));
                }
                if let Some(func) = Function::from_name(&name) {
                    self.expect(TokenKind::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(TokenKind::RParen, "`)`")?;
                    return Ok(Expression::Call(func, Box::new(arg)));
                }
                Err(ParseError::UnknownIdentifier { name, line, col })
            }
            Some(Token {
                kind: TokenKind::LParen,
                ..
            }) => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(ParseError::Syntax {
                line,
                col,
                msg: "expected a number, variable, function call or `(`".into(),
            }),
        }
    }
}

/// Parse a source string into an expression tree.
pub fn parse(source: &str) -> Result<Expression, ParseError> {
    let tokens = lex(source)?;
    let lines = source.lines().count().max(1);
    let end_col = source
        .lines()
        .last()
        .map(|l| l.chars().count())
        .unwrap_or(0)
        + 1;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end_line: lines,
        end_col,
    };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("trailing input after expression"));
    }
    Ok(expr)
}

/// Evaluate an expression as an order-4 jet at a chart point.
pub fn eval_jet(expr: &Expression, point: [f64; 3]) -> Result<Jet, JetError> {
    match expr {
        Expression::Number(n) => Ok(Jet::constant(*n, point)),
        Expression::Variable(axis) => Ok(Jet::variable(*axis, point)),
        Expression::Neg(inner) => Ok(-eval_jet(inner, point)?),
        Expression::Add(a, b) => Ok(eval_jet(a, point)? + eval_jet(b, point)?),
        Expression::Sub(a, b) => Ok(eval_jet(a, point)? - eval_jet(b, point)?),
        Expression::Mul(a, b) => Ok(eval_jet(a, point)? * eval_jet(b, point)?),
        Expression::Div(a, b) => eval_jet(a, point)?.div(&eval_jet(b, point)?),
        Expression::Pow(base, exponent) => eval_jet(base, point)?.powf(*exponent),
        Expression::Call(func, arg) => {
            let inner = eval_jet(arg, point)?;
            match func {
                Function::Sin => Ok(inner.sin()),
                Function::Cos => Ok(inner.cos()),
                Function::Tan => inner.tan(),
                Function::Exp => Ok(inner.exp()),
                Function::Log => inner.ln(),
                Function::Sqrt => inner.sqrt(),
                Function::Sinh => Ok(inner.sinh()),
                Function::Cosh => Ok(inner.cosh()),
                Function::Abs => inner.abs(),
                Function::Cbrt => inner.cbrt(),
            }
        }
    }
}

/// Plain `f64` evaluation; an independent path used to cross-check the jet
/// engine against finite differences.
pub fn eval_value(expr: &Expression, point: [f64; 3]) -> Result<f64, JetError> {
    let domain = |func: &'static str, value: f64, ok: bool| {
        if ok {
            Ok(value)
        } else {
            Err(JetError::Domain { func, value })
        }
    };
    match expr {
        Expression::Number(n) => Ok(*n),
        Expression::Variable(axis) => Ok(point[*axis]),
        Expression::Neg(inner) => Ok(-eval_value(inner, point)?),
        Expression::Add(a, b) => Ok(eval_value(a, point)? + eval_value(b, point)?),
        Expression::Sub(a, b) => Ok(eval_value(a, point)? - eval_value(b, point)?),
        Expression::Mul(a, b) => Ok(eval_value(a, point)? * eval_value(b, point)?),
        Expression::Div(a, b) => {
            let denom = eval_value(b, point)?;
            domain("div", denom, denom != 0.0)?;
            Ok(eval_value(a, point)? / denom)
        }
        Expression::Pow(base, exponent) => {
            let v = eval_value(base, point)?;
            if exponent.fract() == 0.0 {
                Ok(v.powi(*exponent as i32))
            } else {
                domain("pow", v, v > 0.0)?;
                Ok(v.powf(*exponent))
            }
        }
        Expression::Call(func, arg) => {
            let v = eval_value(arg, point)?;
            match func {
                Function::Sin => Ok(v.sin()),
                Function::Cos => Ok(v.cos()),
                Function::Tan => Ok(v.tan()),
                Function::Exp => Ok(v.exp()),
                Function::Log => domain("log", v, v > 0.0).map(|v| v.ln()),
                Function::Sqrt => domain("sqrt", v, v > 0.0).map(|v| v.sqrt()),
                Function::Sinh => Ok(v.sinh()),
                Function::Cosh => Ok(v.cosh()),
                Function::Abs => domain("abs", v, v != 0.0).map(|v| v.abs()),
                Function::Cbrt => domain("cbrt", v, v != 0.0).map(|v| v.cbrt()),
            }
        }
    }
}
