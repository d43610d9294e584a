//! Arithmetic DSL for real-valued functions of one variable `x`.
//!
//! Expressions are immutable trees supporting pointwise evaluation and exact
//! symbolic differentiation (repeatable to any order). The grammar covers
//! numbers, `x`, `+ - * / ^`, parentheses and the functions
//! `exp sin cos sinh cosh tanh sqrt ln`. `^` requires an exponent that folds
//! to a constant at parse time, which keeps differentiation total, and it
//! binds tighter than unary minus (`-x^2` is `-(x^2)`).

use std::fmt;
use thiserror::Error;

/// Single-argument functions understood by the DSL.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
    Ln,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
            Func::Ln => "ln",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            "ln" => Func::Ln,
            _ => return None,
        })
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sinh => v.sinh(),
            Func::Cosh => v.cosh(),
            Func::Tanh => v.tanh(),
            Func::Sqrt => v.sqrt(),
            Func::Ln => v.ln(),
        }
    }
}

/// Immutable expression tree for a real-valued function of `x`.
///
/// Stored constants are always finite; `Pow` carries its constant exponent
/// directly so derivatives never have to differentiate an exponent.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Apply(Func, Box<Expr>),
}

/// Parse failure with a 1-based byte position into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown function `{name}` at offset {position}")]
    UnknownFunction { name: String, position: usize },
}

/// Evaluation failure at a concrete point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error at x = {x}: {op}")]
    Domain { x: f64, op: &'static str },
    #[error("overflow at x = {x}: value exceeds the representable range")]
    Overflow { x: f64 },
}

// The fold-on-build constructors share names with the std operator traits
// on purpose; they take operands by value and are not operator impls.
#[allow(clippy::should_implement_trait, clippy::redundant_guards)]
impl Expr {
    pub fn constant(v: f64) -> Expr {
        assert!(v.is_finite(), "expression constants must be finite");
        Expr::Const(v)
    }

    pub fn x() -> Expr {
        Expr::X
    }

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(v) => Expr::Const(-v),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(u), Expr::Const(v)) if (u + v).is_finite() => Expr::Const(u + v),
            (Expr::Const(u), b) if u == 0.0 => b,
            (a, Expr::Const(v)) if v == 0.0 => a,
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(u), Expr::Const(v)) if (u - v).is_finite() => Expr::Const(u - v),
            (Expr::Const(u), b) if u == 0.0 => Expr::neg(b),
            (a, Expr::Const(v)) if v == 0.0 => a,
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(u), Expr::Const(v)) if (u * v).is_finite() => Expr::Const(u * v),
            (Expr::Const(u), _) | (_, Expr::Const(u)) if u == 0.0 => Expr::Const(0.0),
            (Expr::Const(u), b) if u == 1.0 => b,
            (a, Expr::Const(v)) if v == 1.0 => a,
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(u), Expr::Const(v)) if v != 0.0 && (u / v).is_finite() => {
                Expr::Const(u / v)
            }
            (a, Expr::Const(v)) if v == 1.0 => a,
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(base: Expr, exponent: f64) -> Expr {
        assert!(exponent.is_finite(), "power exponents must be finite");
        if exponent == 0.0 {
            return Expr::Const(1.0);
        }
        if exponent == 1.0 {
            return base;
        }
        if let Expr::Const(v) = base {
            let folded = pow_value(v, exponent);
            if let Ok(w) = folded {
                if w.is_finite() {
                    return Expr::Const(w);
                }
            }
        }
        Expr::Pow(Box::new(base), exponent)
    }

    pub fn apply(f: Func, e: Expr) -> Expr {
        if let Expr::Const(v) = e {
            let w = f.apply(v);
            if w.is_finite() {
                return Expr::Const(w);
            }
        }
        Expr::Apply(f, Box::new(e))
    }

    /// Evaluate at a finite point, flagging every non-finite intermediate.
    pub fn evaluate(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::X => x,
            Expr::Neg(e) => -e.evaluate(x)?,
            Expr::Add(a, b) => a.evaluate(x)? + b.evaluate(x)?,
            Expr::Sub(a, b) => a.evaluate(x)? - b.evaluate(x)?,
            Expr::Mul(a, b) => a.evaluate(x)? * b.evaluate(x)?,
            Expr::Div(a, b) => {
                let den = b.evaluate(x)?;
                if den == 0.0 {
                    return Err(EvalError::Domain {
                        x,
                        op: "division by zero",
                    });
                }
                a.evaluate(x)? / den
            }
            Expr::Pow(base, p) => {
                let b = base.evaluate(x)?;
                pow_value(b, *p).map_err(|op| EvalError::Domain { x, op })?
            }
            Expr::Apply(f, e) => {
                let u = e.evaluate(x)?;
                match f {
                    Func::Ln if u <= 0.0 => {
                        return Err(EvalError::Domain {
                            x,
                            op: "ln of a non-positive value",
                        })
                    }
                    Func::Sqrt if u < 0.0 => {
                        return Err(EvalError::Domain {
                            x,
                            op: "sqrt of a negative value",
                        })
                    }
                    _ => {}
                }
                f.apply(u)
            }
        };
        if v.is_nan() {
            return Err(EvalError::Domain {
                x,
                op: "indeterminate value",
            });
        }
        if v.is_infinite() {
            return Err(EvalError::Overflow { x });
        }
        Ok(v)
    }

    /// Exact symbolic derivative. The result is lightly folded but otherwise
    /// unsimplified; it evaluates correctly wherever the inputs do.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::X => Expr::Const(1.0),
            Expr::Neg(e) => Expr::neg(e.differentiate()),
            Expr::Add(a, b) => Expr::add(a.differentiate(), b.differentiate()),
            Expr::Sub(a, b) => Expr::sub(a.differentiate(), b.differentiate()),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.differentiate(), (**b).clone()),
                Expr::mul((**a).clone(), b.differentiate()),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.differentiate(), (**b).clone()),
                    Expr::mul((**a).clone(), b.differentiate()),
                ),
                Expr::pow((**b).clone(), 2.0),
            ),
            Expr::Pow(base, p) => Expr::mul(
                Expr::mul(Expr::Const(*p), Expr::pow((**base).clone(), p - 1.0)),
                base.differentiate(),
            ),
            Expr::Apply(f, u) => {
                let du = u.differentiate();
                let inner = (**u).clone();
                match f {
                    Func::Exp => Expr::mul(Expr::apply(Func::Exp, inner), du),
                    Func::Sin => Expr::mul(Expr::apply(Func::Cos, inner), du),
                    Func::Cos => Expr::mul(Expr::neg(Expr::apply(Func::Sin, inner)), du),
                    Func::Sinh => Expr::mul(Expr::apply(Func::Cosh, inner), du),
                    Func::Cosh => Expr::mul(Expr::apply(Func::Sinh, inner), du),
                    Func::Tanh => Expr::mul(
                        Expr::sub(
                            Expr::Const(1.0),
                            Expr::pow(Expr::apply(Func::Tanh, inner), 2.0),
                        ),
                        du,
                    ),
                    Func::Sqrt => Expr::div(
                        du,
                        Expr::mul(Expr::Const(2.0), Expr::apply(Func::Sqrt, inner)),
                    ),
                    Func::Ln => Expr::div(du, inner),
                }
            }
        }
    }
}

fn pow_value(base: f64, p: f64) -> Result<f64, &'static str> {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        if base == 0.0 && p < 0.0 {
            return Err("zero raised to a negative power");
        }
        Ok(base.powi(p as i32))
    } else {
        if base < 0.0 {
            return Err("negative base with a non-integer exponent");
        }
        if base == 0.0 && p < 0.0 {
            return Err("zero raised to a negative power");
        }
        Ok(base.powf(p))
    }
}

/// Parse DSL source text into an expression tree.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            position: self.pos + 1,
            expected: expected.to_string(),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::add(acc, self.term()?);
            } else if self.eat(b'-') {
                acc = Expr::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::mul(acc, self.unary()?);
            } else if self.eat(b'/') {
                acc = Expr::div(acc, self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            Ok(Expr::neg(self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            self.skip_ws();
            let at = self.pos + 1;
            let exponent = self.unary()?;
            match exponent {
                Expr::Const(k) => base = Expr::pow(base, k),
                _ => {
                    return Err(ParseError::Syntax {
                        position: at,
                        expected: "a constant exponent".to_string(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("an expression")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("`)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(self.syntax(&format!("an expression, found `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len()
                && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // `e` was the start of an identifier, not an exponent
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Const(v)),
            _ => Err(ParseError::Syntax {
                position: start + 1,
                expected: "a finite number".to_string(),
            }),
        }
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        if name == "x" {
            return Ok(Expr::X);
        }
        let f = Func::from_name(name).ok_or_else(|| ParseError::UnknownFunction {
            name: name.to_string(),
            position: start + 1,
        })?;
        if !self.eat(b'(') {
            return Err(self.syntax("`(` after function name"));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.syntax("`)`"));
        }
        Ok(Expr::apply(f, arg))
    }
}

// Printing uses explicit precedence levels so `parse(e.to_string())`
// evaluates identically to `e`.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(v) if *v < 0.0 => PREC_NEG,
        Expr::Const(_) | Expr::X | Expr::Apply(..) => PREC_ATOM,
        Expr::Neg(_) => PREC_NEG,
        Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
        Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
        Expr::Pow(..) => PREC_POW,
    }
}

fn fmt_prec(e: &Expr, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let own = precedence(e);
    if own < min {
        write!(out, "(")?;
    }
    match e {
        Expr::Const(v) => write!(out, "{}", v)?,
        Expr::X => write!(out, "x")?,
        Expr::Neg(inner) => {
            write!(out, "-")?;
            fmt_prec(inner, PREC_NEG, out)?;
        }
        Expr::Add(a, b) => {
            fmt_prec(a, PREC_ADD, out)?;
            write!(out, " + ")?;
            fmt_prec(b, PREC_ADD + 1, out)?;
        }
        Expr::Sub(a, b) => {
            fmt_prec(a, PREC_ADD, out)?;
            write!(out, " - ")?;
            fmt_prec(b, PREC_ADD + 1, out)?;
        }
        Expr::Mul(a, b) => {
            fmt_prec(a, PREC_MUL, out)?;
            write!(out, "*")?;
            fmt_prec(b, PREC_MUL + 1, out)?;
        }
        Expr::Div(a, b) => {
            fmt_prec(a, PREC_MUL, out)?;
            write!(out, "/")?;
            fmt_prec(b, PREC_MUL + 1, out)?;
        }
        Expr::Pow(base, p) => {
            fmt_prec(base, PREC_ATOM, out)?;
            if *p < 0.0 {
                write!(out, "^({})", p)?;
            } else {
                write!(out, "^{}", p)?;
            }
        }
        Expr::Apply(f, arg) => {
            write!(out, "{}(", f.name())?;
            fmt_prec(arg, 0, out)?;
            write!(out, ")")?;
        }
    }
    if own < min {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}
