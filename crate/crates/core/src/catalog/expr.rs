//! Polynomial expressions in named algebraic numbers with rational
//! coefficients, e.g. `(2*t^3 + t^2 + t + 2)/5` or `-phi*i`.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*      divisor must be a rational constant
//! unary := '-' unary | power
//! power := atom ('^' ['-'] integer)?
//! atom  := integer | identifier | '(' expr ')'
//! ```

use std::fmt;

use dashu_int::IBig;
use dashu_ratio::RBig;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("parse error in {src:?} at byte {at}: {msg}")]
    Parse { src: String, at: usize, msg: String },
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("denominator {0} is not invertible in the target ring")]
    BadDenominator(IBig),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(RBig),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
}

/// A commutative ring in which expressions can be evaluated.
pub trait ExprRing {
    type Elem: Clone;

    fn rational(&self, q: &RBig) -> Result<Self::Elem, ExprError>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, ExprError>;

    fn one(&self) -> Self::Elem {
        self.rational(&RBig::ONE).expect("1 is always representable")
    }

    fn pow(&self, a: &Self::Elem, exp: i32) -> Result<Self::Elem, ExprError> {
        let base = if exp < 0 { self.inv(a)? } else { a.clone() };
        let mut acc = self.one();
        for _ in 0..exp.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        Ok(acc)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let mut p = Parser { src, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Value of a variable-free expression.
    pub fn constant_value(&self) -> Option<RBig> {
        Some(match self {
            Expr::Const(q) => q.clone(),
            Expr::Var(_) => return None,
            Expr::Add(a, b) => a.constant_value()? + b.constant_value()?,
            Expr::Sub(a, b) => a.constant_value()? - b.constant_value()?,
            Expr::Mul(a, b) => a.constant_value()? * b.constant_value()?,
            Expr::Neg(a) => -a.constant_value()?,
            Expr::Pow(a, e) => {
                let v = a.constant_value()?;
                if *e < 0 && v == RBig::ZERO {
                    return None;
                }
                let mut acc = RBig::ONE;
                for _ in 0..e.unsigned_abs() {
                    acc *= &v;
                }
                if *e < 0 {
                    RBig::ONE / acc
                } else {
                    acc
                }
            }
        })
    }

    /// Symbols referenced by the expression, in first-use order.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_symbols(out),
        }
    }

    /// Denominators of every rational constant appearing in the expression.
    pub fn denominators(&self) -> Vec<IBig> {
        let mut out = Vec::new();
        self.collect_denominators(&mut out);
        out
    }

    fn collect_denominators(&self, out: &mut Vec<IBig>) {
        match self {
            Expr::Const(q) => {
                let d = IBig::from(q.denominator().clone());
                if d != IBig::ONE {
                    out.push(d);
                }
            }
            Expr::Var(_) => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_denominators(out);
                b.collect_denominators(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_denominators(out),
        }
    }

    pub fn eval<R: ExprRing>(
        &self,
        ring: &R,
        lookup: &dyn Fn(&str) -> Option<R::Elem>,
    ) -> Result<R::Elem, ExprError> {
        Ok(match self {
            Expr::Const(q) => ring.rational(q)?,
            Expr::Var(v) => lookup(v).ok_or_else(|| ExprError::UnknownSymbol(v.clone()))?,
            Expr::Add(a, b) => ring.add(&a.eval(ring, lookup)?, &b.eval(ring, lookup)?),
            Expr::Sub(a, b) => ring.sub(&a.eval(ring, lookup)?, &b.eval(ring, lookup)?),
            Expr::Mul(a, b) => ring.mul(&a.eval(ring, lookup)?, &b.eval(ring, lookup)?),
            Expr::Neg(a) => ring.neg(&a.eval(ring, lookup)?),
            Expr::Pow(a, e) => ring.pow(&a.eval(ring, lookup)?, *e)?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(q) => write!(f, "({q})"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::Pow(a, e) => write!(f, "{a}^{e}"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExprError {
        ExprError::Parse {
            src: self.src.to_string(),
            at: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                let at = self.pos;
                let rhs = self.unary()?;
                let q = rhs.constant_value().filter(|q| *q != RBig::ZERO).ok_or_else(|| {
                    ExprError::Parse {
                        src: self.src.to_string(),
                        at,
                        msg: "divisor must be a nonzero rational constant".into(),
                    }
                })?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(Expr::Const(RBig::ONE / q)));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            self.skip_ws();
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected an integer exponent"));
            }
            let e: i32 = digits.parse().map_err(|_| self.error("exponent out of range"))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().to_string();
                let n: IBig = d.parse().map_err(|_| self.error("bad integer"))?;
                Ok(Expr::Const(RBig::from(n)))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.pos += self.peek().unwrap().len_utf8();
                }
                Ok(Expr::Var(self.src[start..self.pos].to_string()))
            }
            _ => Err(self.error("expected a number, symbol or '('")),
        }
    }
}

/// Evaluation in the rationals; used for tests and constant folding.
pub struct Rationals;

impl ExprRing for Rationals {
    type Elem = RBig;

    fn rational(&self, q: &RBig) -> Result<RBig, ExprError> {
        Ok(q.clone())
    }
    fn add(&self, a: &RBig, b: &RBig) -> RBig {
        a + b
    }
    fn sub(&self, a: &RBig, b: &RBig) -> RBig {
        a - b
    }
    fn mul(&self, a: &RBig, b: &RBig) -> RBig {
        a * b
    }
    fn neg(&self, a: &RBig) -> RBig {
        -a
    }
    fn inv(&self, a: &RBig) -> Result<RBig, ExprError> {
        if *a == RBig::ZERO {
            return Err(ExprError::NotInvertible);
        }
        Ok(RBig::ONE / a)
    }
}
