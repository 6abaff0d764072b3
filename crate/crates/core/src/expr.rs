//! A tiny expression language for parametric curve components.
//!
//! Grammar (whitespace-insensitive, left-associative binary operators):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' INTEGER)?
//! atom    := NUMBER | 'u' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
//! FUNC    := sin | cos | sqrt | exp
//! ```
//!
//! `^` binds tighter than unary minus, so `-u^2` is `-(u^2)`. Exponents are
//! non-negative integer literals.

use std::fmt;

use crate::dual::DualScalar;
use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
    Exp,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            "exp" => Some(Func::Exp),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Pi,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

/// Scalar types an [`Expr`] can be evaluated over.
pub trait ExprScalar: Sized + Clone {
    fn lift_constant(value: f64, like: &Self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Result<Self>;
    fn exp(&self) -> Self;

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::lift_constant(1.0, self);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

impl ExprScalar for f64 {
    fn lift_constant(value: f64, _: &Self) -> Self {
        value
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        if *rhs == 0.0 {
            return Err(Error::Domain {
                function: "division",
                argument: 0.0,
            });
        }
        Ok(self / rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sqrt(&self) -> Result<Self> {
        if *self < 0.0 {
            return Err(Error::Domain {
                function: "sqrt",
                argument: *self,
            });
        }
        Ok(f64::sqrt(*self))
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
}

impl ExprScalar for DualScalar {
    fn lift_constant(value: f64, _: &Self) -> Self {
        DualScalar::real(value)
    }
    fn add(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        *self - *rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        self.checked_div(*rhs)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn sin(&self) -> Self {
        DualScalar::sin(*self)
    }
    fn cos(&self) -> Self {
        DualScalar::cos(*self)
    }
    fn sqrt(&self) -> Result<Self> {
        DualScalar::sqrt(*self)
    }
    fn exp(&self) -> Self {
        DualScalar::exp(*self)
    }
}

impl ExprScalar for Jet {
    fn lift_constant(value: f64, like: &Self) -> Self {
        Jet::constant(value, like.order())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        Jet::div(self, rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sin(&self) -> Self {
        Jet::sin(self)
    }
    fn cos(&self) -> Self {
        Jet::cos(self)
    }
    fn sqrt(&self) -> Result<Self> {
        Jet::sqrt(self)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut parser = Parser { src: text, pos: 0 };
        let expr = parser.expr()?;
        parser.skip_ws();
        if parser.pos < text.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(expr)
    }

    /// Evaluates with `u` bound to `var`.
    pub fn eval<T: ExprScalar>(&self, var: &T) -> Result<T> {
        Ok(match self {
            Expr::Num(v) => T::lift_constant(*v, var),
            Expr::Var => var.clone(),
            Expr::Pi => T::lift_constant(std::f64::consts::PI, var),
            Expr::Neg(e) => e.eval(var)?.neg(),
            Expr::Binary(op, l, r) => {
                let (l, r) = (l.eval(var)?, r.eval(var)?);
                match op {
                    BinOp::Add => l.add(&r),
                    BinOp::Sub => l.sub(&r),
                    BinOp::Mul => l.mul(&r),
                    BinOp::Div => l.div(&r)?,
                }
            }
            Expr::Pow(e, n) => e.eval(var)?.powi(*n),
            Expr::Call(f, e) => {
                let x = e.eval(var)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => x.sqrt()?,
                    Func::Exp => x.exp(),
                }
            }
        })
    }

    pub fn eval_f64(&self, u: f64) -> Result<f64> {
        self.eval(&u)
    }

    pub fn eval_jet(&self, u: f64, order: usize) -> Result<Jet> {
        self.eval(&Jet::variable(u, order))
    }
}

/// Prints a normal form that parses back to the same tree: every binary
/// operation is parenthesised, literals use shortest round-trip formatting.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => f.write_str("u"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Pow(e, n) => write!(f, "({e})^{n}"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        let digits = self.src[start..]
            .bytes()
            .take_while(u8::is_ascii_digit)
            .count();
        if digits == 0 {
            return Err(self.error("exponent must be a non-negative integer literal"));
        }
        self.pos += digits;
        let n = self.src[start..self.pos]
            .parse::<u32>()
            .map_err(|_| Error::Syntax {
                offset: start,
                message: "exponent too large".into(),
            })?;
        if matches!(self.src[self.pos..].chars().next(), Some('.' | 'e' | 'E')) {
            return Err(self.error("exponent must be a non-negative integer literal"));
        }
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.identifier(),
            Some(c) => Err(self.error(&format!("unexpected character `{c}`"))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut exp = end + 1;
            if exp < bytes.len() && (bytes[exp] == b'+' || bytes[exp] == b'-') {
                exp += 1;
            }
            let digits_start = exp;
            while exp < bytes.len() && bytes[exp].is_ascii_digit() {
                exp += 1;
            }
            if exp > digits_start {
                end = exp;
            }
        }
        let text = &self.src[start..end];
        let value = text.parse::<f64>().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        self.pos = end;
        Ok(Expr::Num(value))
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        let len = self.src[start..]
            .bytes()
            .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
            .count();
        self.pos += len;
        let name = &self.src[start..self.pos];
        match name {
            "u" => return Ok(Expr::Var),
            "pi" => return Ok(Expr::Pi),
            _ => {}
        }
        let Some(func) = Func::from_name(name) else {
            return Err(Error::UnknownIdentifier {
                name: name.to_string(),
                offset: start,
            });
        };
        if !self.eat('(') {
            return Err(self.error(&format!("expected `(` after `{name}`")));
        }
        let arg = self.expr()?;
        if !self.eat(')') {
            return Err(self.error("expected `)`"));
        }
        Ok(Expr::Call(func, Box::new(arg)))
    }
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn tree() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::Var),
            Just(Expr::Pi),
            prop::sample::select(vec![0.0, 0.5, 1.0, 2.0, 3.25, 1e-3, 12.0]).prop_map(Expr::Num),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            let op = prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]);
            let func = prop::sample::select(vec![Func::Sin, Func::Cos, Func::Sqrt, Func::Exp]);
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Binary(
                    o,
                    Box::new(a),
                    Box::new(b)
                )),
                (inner.clone(), 0u32..4).prop_map(|(e, n)| Expr::Pow(Box::new(e), n)),
                (func, inner).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
            ]
        })
    }

    proptest! {
        #[test]
        fn printing_is_a_normal_form(e in tree()) {
            let printed = e.to_string();
            let once = Expr::parse(&printed).unwrap();
            prop_assert_eq!(&once, &e);
            let twice = Expr::parse(&once.to_string()).unwrap();
            prop_assert_eq!(twice, once);
        }

        #[test]
        fn first_order_jets_agree_with_dual_numbers(e in tree(), u in 0.1..3.0f64) {
            let jet = e.eval_jet(u, 1);
            let dual = e.eval(&DualScalar::variable(u));
            match (jet, dual) {
                (Ok(j), Ok(d)) => {
                    prop_assert_eq!(j.coeff(0).to_bits(), d.real.to_bits());
                    prop_assert_eq!(j.coeff(1).to_bits(), d.dual.to_bits());
                }
                (Err(_), Err(_)) => {}
                (j, d) => prop_assert!(false, "jet {:?} vs dual {:?}", j, d),
            }
        }
    }
}
