//! Gate expressions: sums of cochain expressions with rational phase
//! coefficients.
//!
//! Text syntax, one expression per string:
//!
//! ```text
//! 1/2*CUP(a0,a1) - 1/4*PONT(a0,2) + 1/8*SQ(2,CONST(s))
//! ```
//!
//! `aK` (or `FIELD(K)`) is the gauge field of copy `K`, `CONST(name)` a named
//! constant cochain, `CUP` a left-associated cup product, `CUPI(i,x,y)` the
//! higher cup `x ∪_i y`, `SQ(i,x) = x ∪_{deg x - i} x` and `PONT(x,n)` the
//! higher Pontryagin power. A term `p/M * e` contributes the phase
//! `exp(2πi p ∫e / M)`.

use std::fmt;

use crate::cochain::formula::{pontryagin_local, Local};
use crate::error::{input, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Field(usize),
    Const(String),
    Cup(Vec<Expr>),
    CupI(usize, Box<Expr>, Box<Expr>),
    Sq(usize, Box<Expr>),
    Pont(Box<Expr>, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub num: i64,
    pub den: u64,
    pub expr: Expr,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateExpression {
    pub terms: Vec<Term>,
}

/// What a leaf of a [`Local`] built from an [`Expr`] refers to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafRef {
    Field(usize),
    Const(String),
}

impl Expr {
    pub fn field(k: usize) -> Expr {
        Expr::Field(k)
    }

    pub fn cup(factors: Vec<Expr>) -> Expr {
        Expr::Cup(factors)
    }

    /// Degree, given the degrees of fields and constants.
    pub fn degree(&self, field: &dyn Fn(usize) -> Option<usize>, constant: &dyn Fn(&str) -> Option<usize>) -> Result<usize> {
        Ok(match self {
            Expr::Field(k) => field(*k).ok_or_else(|| Error::Input(format!("no field a{k}")))?,
            Expr::Const(s) => constant(s).ok_or_else(|| Error::Input(format!("unknown constant \"{s}\"")))?,
            Expr::Cup(f) => {
                let mut d = 0;
                for e in f {
                    d += e.degree(field, constant)?;
                }
                d
            }
            Expr::CupI(i, x, y) => {
                let s = x.degree(field, constant)? + y.degree(field, constant)?;
                if *i > s {
                    return input(format!("CUPI({i},..) of total degree {s} has negative degree"));
                }
                s - i
            }
            Expr::Sq(i, x) => x.degree(field, constant)? + i,
            Expr::Pont(x, n) => {
                let d = x.degree(field, constant)?;
                if d % 2 != 0 {
                    return input(format!("PONT needs an even-degree argument, got degree {d}"));
                }
                d * n
            }
        })
    }

    /// Fields read by the expression, in first-appearance order.
    pub fn fields(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Field(k) = e {
                if !out.contains(k) {
                    out.push(*k);
                }
            }
        });
        out
    }

    pub fn constants(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Const(s) = e {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
        });
        out
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Cup(v) => v.iter().for_each(|e| e.visit(f)),
            Expr::CupI(_, x, y) => {
                x.visit(f);
                y.visit(f);
            }
            Expr::Sq(_, x) | Expr::Pont(x, _) => x.visit(f),
            _ => {}
        }
    }

    pub fn has_nested_pont(&self) -> bool {
        let mut depth_hit = false;
        fn walk(e: &Expr, inside: bool, hit: &mut bool) {
            match e {
                Expr::Pont(x, _) => {
                    if inside {
                        *hit = true;
                    }
                    walk(x, true, hit);
                }
                Expr::Cup(v) => v.iter().for_each(|x| walk(x, inside, hit)),
                Expr::CupI(_, x, y) => {
                    walk(x, inside, hit);
                    walk(y, inside, hit);
                }
                Expr::Sq(_, x) => walk(x, inside, hit),
                _ => {}
            }
        }
        walk(self, false, &mut depth_hit);
        depth_hit
    }

    /// Cell-local form. Leaves are numbered in `leaves`, which is extended
    /// as new fields and constants are met.
    pub fn to_local(
        &self,
        leaves: &mut Vec<LeafRef>,
        field: &dyn Fn(usize) -> Option<usize>,
        constant: &dyn Fn(&str) -> Option<usize>,
    ) -> Result<Local> {
        let mut leaf = |r: LeafRef, d: usize| {
            let id = match leaves.iter().position(|x| *x == r) {
                Some(i) => i,
                None => {
                    leaves.push(r);
                    leaves.len() - 1
                }
            };
            Local::leaf(id, d)
        };
        Ok(match self {
            Expr::Field(k) => {
                let d = self.degree(field, constant)?;
                leaf(LeafRef::Field(*k), d)
            }
            Expr::Const(s) => {
                let d = self.degree(field, constant)?;
                leaf(LeafRef::Const(s.clone()), d)
            }
            Expr::Cup(v) => {
                let mut parts = Vec::with_capacity(v.len());
                for e in v {
                    parts.push(e.to_local(leaves, field, constant)?);
                }
                Local::cup_chain(parts)
            }
            Expr::CupI(i, x, y) => {
                self.degree(field, constant)?;
                let a = x.to_local(leaves, field, constant)?;
                let b = y.to_local(leaves, field, constant)?;
                Local::cup_i(*i, a, b)
            }
            Expr::Sq(i, x) => {
                let d = x.degree(field, constant)?;
                let a = x.to_local(leaves, field, constant)?;
                if *i > d {
                    // Sq^i vanishes above the degree; the zero-weighted
                    // placeholder only carries the degree
                    Local::Lin(vec![(0, Local::leaf(usize::MAX, d + i))])
                } else {
                    Local::cup_i(d - i, a.clone(), a)
                }
            }
            Expr::Pont(x, n) => {
                self.degree(field, constant)?;
                let a = x.to_local(leaves, field, constant)?;
                pontryagin_local(&a, *n)
            }
        })
    }
}

impl GateExpression {
    pub fn parse(text: &str) -> Result<GateExpression> {
        Parser::new(text).parse_sum()
    }

    pub fn single(num: i64, den: u64, expr: Expr) -> GateExpression {
        GateExpression {
            terms: vec![Term { num, den, expr }],
        }
    }

    /// Least common multiple of the term denominators.
    pub fn denominator(&self) -> u64 {
        self.terms.iter().fold(1, |m, t| num_integer::lcm(m, t.den))
    }

    pub fn fields(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for t in &self.terms {
            for k in t.expr.fields() {
                if !out.contains(&k) {
                    out.push(k);
                }
            }
        }
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Field(k) => write!(f, "a{k}"),
            Expr::Const(s) => write!(f, "CONST({s})"),
            Expr::Cup(v) => {
                write!(f, "CUP(")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            Expr::CupI(i, x, y) => write!(f, "CUPI({i},{x},{y})"),
            Expr::Sq(i, x) => write!(f, "SQ({i},{x})"),
            Expr::Pont(x, n) => write!(f, "PONT({x},{n})"),
        }
    }
}

impl fmt::Display for GateExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let (sign, num) = if t.num < 0 { ("-", -t.num) } else { ("+", t.num) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            write!(f, "{num}/{}*{}", t.den, t.expr)?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
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

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(format!("expected '{c}'"))
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a number");
        }
        self.src[start..self.pos].parse().or_else(|_| self.error("number too large"))
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a name");
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn parse_sum(&mut self) -> Result<GateExpression> {
        let mut terms = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return self.error("empty expression");
        }
        let mut sign = if self.eat('-') { -1 } else { 1 };
        if sign == 1 {
            self.eat('+');
        }
        loop {
            terms.push(self.parse_term(sign)?);
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                break;
            }
        }
        self.skip_ws();
        if self.peek().is_some() {
            return self.error("unexpected trailing input");
        }
        Ok(GateExpression { terms })
    }

    fn parse_term(&mut self, sign: i64) -> Result<Term> {
        self.skip_ws();
        let (mut num, mut den) = (1i64, 1u64);
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            num = self.number()? as i64;
            if self.eat('/') {
                den = self.number()?;
                if den == 0 {
                    return self.error("zero denominator");
                }
            }
            self.expect('*')?;
        }
        let expr = self.parse_expr()?;
        Ok(Term {
            num: sign * num,
            den,
            expr,
        })
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        let name = self.ident()?;
        let upper = name.to_ascii_uppercase();
        if let Some(k) = name.strip_prefix('a') {
            if let Ok(k) = k.parse::<usize>() {
                return Ok(Expr::Field(k));
            }
        }
        match upper.as_str() {
            "FIELD" => {
                self.expect('(')?;
                let k = self.number()? as usize;
                self.expect(')')?;
                Ok(Expr::Field(k))
            }
            "CONST" => {
                self.expect('(')?;
                let s = self.ident()?;
                self.expect(')')?;
                Ok(Expr::Const(s))
            }
            "CUP" => {
                self.expect('(')?;
                let mut v = vec![self.parse_expr()?];
                while self.eat(',') {
                    v.push(self.parse_expr()?);
                }
                self.expect(')')?;
                Ok(Expr::Cup(v))
            }
            "CUPI" => {
                self.expect('(')?;
                let i = self.number()? as usize;
                self.expect(',')?;
                let x = self.parse_expr()?;
                self.expect(',')?;
                let y = self.parse_expr()?;
                self.expect(')')?;
                Ok(Expr::CupI(i, Box::new(x), Box::new(y)))
            }
            "SQ" => {
                self.expect('(')?;
                let i = self.number()? as usize;
                self.expect(',')?;
                let x = self.parse_expr()?;
                self.expect(')')?;
                Ok(Expr::Sq(i, Box::new(x)))
            }
            "PONT" => {
                self.expect('(')?;
                let x = self.parse_expr()?;
                self.expect(',')?;
                let n = self.number()? as usize;
                if n == 0 {
                    return self.error("PONT power must be positive");
                }
                self.expect(')')?;
                Ok(Expr::Pont(Box::new(x), n))
            }
            _ => {
                self.pos = start;
                self.error(format!("unknown operator \"{name}\""))
            }
        }
    }
}
