//! A small arithmetic language for user-supplied objectives `F(x)`.
//!
//! Grammar (precedence from loosest to tightest):
//!
//! | level | operators       | associativity |
//! |-------|-----------------|---------------|
//! | 1     | `+` `-`         | left          |
//! | 2     | `*` `/`         | left          |
//! | 3     | `^`             | right         |
//! | 4     | unary `-`       | prefix        |
//!
//! Atoms are numeric literals (`1`, `2.5`, `.5`, `1e-3`), the variable `x`, the
//! constants `pi` and `e`, parenthesized expressions, and calls to `exp`, `ln`,
//! `sqrt`, `abs`, `sin`, `cos`. Whitespace is insignificant. There is no implicit
//! multiplication, so `2x` is an error.
//!
//! Unary minus binds tighter than `^`: `-2^2` is `(-2)^2 = 4`.

use std::fmt;

use thiserror::Error;

use crate::error::{Error, Result};

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    /// (left binding power, right binding power)
    fn binding(self) -> (u8, u8) {
        match self {
            BinOp::Add | BinOp::Sub => (10, 11),
            BinOp::Mul | BinOp::Div => (20, 21),
            BinOp::Pow => (31, 30),
        }
    }
}

const PREFIX_NEG_BP: u8 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sin,
    Cos,
}

impl Func {
    const ALL: [Func; 6] = [Func::Exp, Func::Ln, Func::Sqrt, Func::Abs, Func::Sin, Func::Cos];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Variable,
    Constant(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Unexpected { expected: String },
    UnknownIdentifier(String),
    TooDeep,
}

/// A parse failure at a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", self.describe())]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn describe(&self) -> String {
        match &self.kind {
            ParseErrorKind::Unexpected { expected } => {
                format!("at offset {}: expected {}", self.offset, expected)
            }
            ParseErrorKind::UnknownIdentifier(name) => {
                format!("at offset {}: unknown identifier {:?}", self.offset, name)
            }
            ParseErrorKind::TooDeep => format!("at offset {}: expression nested too deeply", self.offset),
        }
    }

    fn expected(offset: usize, what: &str) -> Self {
        ParseError { offset, kind: ParseErrorKind::Unexpected { expected: what.to_string() } }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next_token(&mut self) -> core::result::Result<(usize, Tok), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(start) else {
            return Ok((start, Tok::End));
        };
        let tok = match c {
            b'0'..=b'9' | b'.' => return self.number(start),
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = start;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                    end += 1;
                }
                self.pos = end;
                return Ok((start, Tok::Ident(self.src[start..end].to_string())));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => return Err(ParseError::expected(start, "a number, identifier, operator or parenthesis")),
        };
        self.pos += 1;
        Ok((start, tok))
    }

    fn number(&mut self, start: usize) -> core::result::Result<(usize, Tok), ParseError> {
        let bytes = self.src.as_bytes();
        let mut end = start;
        let digits = |mut i: usize| {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        end = digits(end);
        let int_len = end - start;
        let mut frac_len = 0;
        if end < bytes.len() && bytes[end] == b'.' {
            let after = digits(end + 1);
            frac_len = after - end - 1;
            end = after;
        }
        if int_len == 0 && frac_len == 0 {
            return Err(ParseError::expected(start, "a digit"));
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut j = end + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                end = digits(j);
            }
        }
        self.pos = end;
        let value: f64 = self.src[start..end].parse().map_err(|_| ParseError::expected(start, "a numeric literal"))?;
        Ok((start, Tok::Num(value)))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(usize, Tok)>,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> core::result::Result<&(usize, Tok), ParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(self.peeked.as_ref().expect("peeked"))
    }

    fn bump(&mut self) -> core::result::Result<(usize, Tok), ParseError> {
        self.peek()?;
        Ok(self.peeked.take().expect("peeked"))
    }

    fn expr(&mut self, min_bp: u8) -> core::result::Result<Expr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let offset = self.peek()?.0;
            return Err(ParseError { offset, kind: ParseErrorKind::TooDeep });
        }
        let mut lhs = self.prefix()?;
        while let (_, Tok::Op(c)) = self.peek()? {
            let op = match c {
                '+' => BinOp::Add,
                '-' => BinOp::Sub,
                '*' => BinOp::Mul,
                '/' => BinOp::Div,
                '^' => BinOp::Pow,
                _ => unreachable!("lexer only emits known operators"),
            };
            let (lbp, rbp) = op.binding();
            if lbp < min_bp {
                break;
            }
            self.bump()?;
            let rhs = self.expr(rbp)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn prefix(&mut self) -> core::result::Result<Expr, ParseError> {
        let (offset, tok) = self.bump()?;
        match tok {
            Tok::Num(v) => Ok(Expr::Number(v)),
            Tok::Op('-') => Ok(Expr::Neg(Box::new(self.expr(PREFIX_NEG_BP)?))),
            Tok::LParen => {
                let inner = self.expr(0)?;
                self.close_paren()?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Variable),
                "pi" => Ok(Expr::Constant(Constant::Pi)),
                "e" => Ok(Expr::Constant(Constant::E)),
                _ => match Func::lookup(&name) {
                    Some(f) => {
                        let (at, t) = self.bump()?;
                        if t != Tok::LParen {
                            return Err(ParseError::expected(at, "'(' after function name"));
                        }
                        let arg = self.expr(0)?;
                        self.close_paren()?;
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                    None => Err(ParseError { offset, kind: ParseErrorKind::UnknownIdentifier(name) }),
                },
            },
            _ => Err(ParseError::expected(offset, "an expression")),
        }
    }

    fn close_paren(&mut self) -> core::result::Result<(), ParseError> {
        let (at, t) = self.bump()?;
        if t == Tok::RParen {
            Ok(())
        } else {
            Err(ParseError::expected(at, "')'"))
        }
    }
}

/// Parse an expression in the single free variable `x`.
pub fn parse(text: &str) -> core::result::Result<Expr, ParseError> {
    let mut parser = Parser { lexer: Lexer { src: text, pos: 0 }, peeked: None, depth: 0 };
    let expr = parser.expr(0)?;
    match parser.bump()? {
        (_, Tok::End) => Ok(expr),
        (at, _) => Err(ParseError::expected(at, "an operator or end of input")),
    }
}

impl Expr {
    /// Evaluate at `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Expr::Number(v) => Ok(*v),
            Expr::Variable => Ok(x),
            Expr::Constant(Constant::Pi) => Ok(std::f64::consts::PI),
            Expr::Constant(Constant::E) => Ok(std::f64::consts::E),
            Expr::Neg(a) => Ok(-a.eval(x)?),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(x)?, b.eval(x)?);
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div => {
                        if b == 0.0 {
                            Err(Error::ExpressionDomain(format!("division by zero at x = {x}")))
                        } else {
                            Ok(a / b)
                        }
                    }
                    BinOp::Pow => {
                        let r = a.powf(b);
                        if r.is_nan() && !a.is_nan() && !b.is_nan() {
                            Err(Error::ExpressionDomain(format!("{a}^{b} is undefined")))
                        } else {
                            Ok(r)
                        }
                    }
                }
            }
            Expr::Call(f, a) => {
                let a = a.eval(x)?;
                match f {
                    Func::Exp => Ok(a.exp()),
                    Func::Ln if a <= 0.0 => Err(Error::ExpressionDomain(format!("ln({a})"))),
                    Func::Ln => Ok(a.ln()),
                    Func::Sqrt if a < 0.0 => Err(Error::ExpressionDomain(format!("sqrt({a})"))),
                    Func::Sqrt => Ok(a.sqrt()),
                    Func::Abs => Ok(a.abs()),
                    Func::Sin => Ok(a.sin()),
                    Func::Cos => Ok(a.cos()),
                }
            }
        }
    }
}

/// Evaluate a parsed expression at `x`.
pub fn eval_expr(ast: &Expr, x: f64) -> Result<f64> {
    ast.eval(x)
}

/// Fully parenthesized rendering; re-parsing it yields an equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v:?}"),
            Expr::Variable => f.write_str("x"),
            Expr::Constant(Constant::Pi) => f.write_str("pi"),
            Expr::Constant(Constant::E) => f.write_str("e"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
