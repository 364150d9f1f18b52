//! Expressions in the family parameter `lambda`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right associative
//! primary := number | 'lambda' | 'pi' | 'e'
//!          | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | sqrt | abs
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamExpr {
    Num(f64),
    Lambda,
    Pi,
    E,
    Neg(Box<ParamExpr>),
    Bin(BinOp, Box<ParamExpr>, Box<ParamExpr>),
    Call(Func, Box<ParamExpr>),
}

/// Why an expression could not be evaluated at a given parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct Poison(pub String);

impl fmt::Display for Poison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl ParamExpr {
    pub fn parse(text: &str) -> Result<ParamExpr> {
        parse_param_expr(text)
    }

    pub fn eval(&self, lambda: f64) -> std::result::Result<f64, Poison> {
        let v = match self {
            ParamExpr::Num(v) => *v,
            ParamExpr::Lambda => lambda,
            ParamExpr::Pi => std::f64::consts::PI,
            ParamExpr::E => std::f64::consts::E,
            ParamExpr::Neg(a) => -a.eval(lambda)?,
            ParamExpr::Bin(op, a, b) => {
                let (a, b) = (a.eval(lambda)?, b.eval(lambda)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return Err(Poison("division by zero".into())),
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            ParamExpr::Call(f, a) => {
                let a = a.eval(lambda)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Sqrt if a < 0.0 => {
                        return Err(Poison(format!("sqrt of negative argument {a}")))
                    }
                    Func::Sqrt => a.sqrt(),
                    Func::Abs => a.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Poison(format!("non-finite value {v}")))
        }
    }

    /// True when the expression does not mention `lambda`.
    pub fn is_constant(&self) -> bool {
        match self {
            ParamExpr::Lambda => false,
            ParamExpr::Num(_) | ParamExpr::Pi | ParamExpr::E => true,
            ParamExpr::Neg(a) | ParamExpr::Call(_, a) => a.is_constant(),
            ParamExpr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn bin(op: BinOp, a: ParamExpr, b: ParamExpr) -> ParamExpr {
        ParamExpr::Bin(op, Box::new(a), Box::new(b))
    }
}

impl std::ops::Neg for ParamExpr {
    type Output = ParamExpr;

    fn neg(self) -> ParamExpr {
        ParamExpr::Neg(Box::new(self))
    }
}

/// Fully parenthesized; reparses to an equivalent tree.
impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamExpr::Num(v) => write!(f, "{v:?}"),
            ParamExpr::Lambda => f.write_str("lambda"),
            ParamExpr::Pi => f.write_str("pi"),
            ParamExpr::E => f.write_str("e"),
            ParamExpr::Neg(a) => write!(f, "(-{a})"),
            ParamExpr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                    BinOp::Pow => '^',
                };
                write!(f, "({a} {sym} {b})")
            }
            ParamExpr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (at, tok) = lx.next()?;
            let end = tok == Tok::End;
            out.push((at, tok));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next(&mut self) -> Result<(usize, Tok)> {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(b) = self.peek() else {
            return Ok((start, Tok::End));
        };
        if b.is_ascii_digit() || b == b'.' {
            return self.number(start);
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                self.pos += 1;
            }
            return Ok((start, Tok::Ident(self.src[start..self.pos].to_string())));
        }
        if b"+-*/^()".contains(&b) {
            self.pos += 1;
            return Ok((start, Tok::Sym(b as char)));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(Error::Syntax { position: start, message: format!("unexpected character '{ch}'") })
    }

    fn number(&mut self, start: usize) -> Result<(usize, Tok)> {
        let digits = |lx: &mut Lexer| {
            let s = lx.pos;
            while matches!(lx.peek(), Some(c) if c.is_ascii_digit()) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(Error::Syntax { position: start, message: "malformed number".into() });
        }
        // exponent only when followed by digits, so `2e` stays an error at `e`
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map(|v| (start, Tok::Num(v)))
            .map_err(|_| Error::Syntax { position: start, message: format!("malformed number '{text}'") })
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

const PRIMARY_START: &str = "number, 'lambda', 'pi', 'e', function name, '(' or '-'";

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        let found = match self.peek() {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".to_string(),
        };
        Err(Error::Syntax { position: self.pos(), message: format!("expected {expected}, found {found}") })
    }

    fn expr(&mut self) -> Result<ParamExpr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = ParamExpr::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<ParamExpr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = ParamExpr::bin(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<ParamExpr> {
        if self.peek() == &Tok::Sym('-') {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<ParamExpr> {
        let base = self.primary()?;
        if self.peek() == &Tok::Sym('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(ParamExpr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ParamExpr> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(ParamExpr::Num(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_close()?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "lambda" => {
                    self.bump();
                    Ok(ParamExpr::Lambda)
                }
                "pi" => {
                    self.bump();
                    Ok(ParamExpr::Pi)
                }
                "e" => {
                    self.bump();
                    Ok(ParamExpr::E)
                }
                _ => match Func::from_name(&name) {
                    Some(func) => {
                        self.bump();
                        if self.peek() != &Tok::Sym('(') {
                            return self.fail("'(' after function name");
                        }
                        self.bump();
                        let arg = self.expr()?;
                        self.expect_close()?;
                        Ok(ParamExpr::Call(func, Box::new(arg)))
                    }
                    None => Err(Error::Syntax {
                        position: self.pos(),
                        message: format!(
                            "unknown identifier '{name}'; expected one of lambda, pi, e, sin, cos, exp, sqrt, abs"
                        ),
                    }),
                },
            },
            _ => self.fail(PRIMARY_START),
        }
    }

    fn expect_close(&mut self) -> Result<()> {
        if self.peek() == &Tok::Sym(')') {
            self.bump();
            Ok(())
        } else {
            self.fail("')' or an operator")
        }
    }
}

pub fn parse_param_expr(text: &str) -> Result<ParamExpr> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return p.fail("an operator or end of input");
    }
    Ok(e)
}
