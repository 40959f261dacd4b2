//! Profile expressions: a tiny language for user-supplied `F(x)`.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?          right associative
//! atom    := number | "x" | func "(" expr ")" | "(" expr ")"
//! func    := "exp" | "log" | "sqrt"
//! ```
//!
//! A power whose exponent is an integer literal (optionally negated) accepts
//! any base; every other power requires a positive base. There is no implicit
//! multiplication, so `2x` is rejected.

mod jet;
mod parse;

pub use jet::Jet2;

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// A parsed expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileExpression {
    ast: Expr,
    text: String,
}

pub fn parse(text: &str) -> Result<ProfileExpression> {
    Ok(ProfileExpression {
        ast: parse::parse_expr(text)?,
        text: text.to_string(),
    })
}

impl ProfileExpression {
    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Plain value at `x`, without derivatives.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = eval_value(&self.ast, x)?;
        check_finite(v, x)
    }

    /// Value, first and second derivative at `x`.
    pub fn eval_jet2(&self, x: f64) -> Result<(f64, f64, f64)> {
        let j = eval_jet(&self.ast, x)?;
        if !j.is_finite() {
            return Err(Error::Overflow(format!(
                "`{}` is not representable at x = {x}",
                self.text
            )));
        }
        Ok((j.v, j.d1, j.d2))
    }
}

impl fmt::Display for ProfileExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized; parses back to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v:?}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Exp => "exp",
                    Func::Log => "log",
                    Func::Sqrt => "sqrt",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}

fn check_finite(v: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("non-finite value at x = {x}")))
    }
}

/// Integer exponent written as a literal, e.g. `2` or `-3`.
fn integer_literal(e: &Expr) -> Option<i32> {
    let as_int = |v: f64| {
        (v.fract() == 0.0 && v.abs() <= i32::MAX as f64).then_some(v as i32)
    };
    match e {
        Expr::Const(v) => as_int(*v),
        Expr::Neg(inner) => match inner.as_ref() {
            Expr::Const(v) => as_int(*v).map(|n| -n),
            _ => None,
        },
        _ => None,
    }
}

fn domain(msg: String) -> Error {
    Error::Domain(msg)
}

fn eval_value(e: &Expr, x: f64) -> Result<f64> {
    Ok(match e {
        Expr::Const(v) => *v,
        Expr::Var => x,
        Expr::Neg(a) => -eval_value(a, x)?,
        Expr::Binary(op, a, b) => {
            let (a, b) = (eval_value(a, x)?, eval_value(b, x)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(domain(format!("division by zero at x = {x}")));
                    }
                    a / b
                }
            }
        }
        Expr::Pow(base, exp) => {
            let b = eval_value(base, x)?;
            if let Some(n) = integer_literal(exp) {
                if b == 0.0 && n < 0 {
                    return Err(domain(format!("zero to a negative power at x = {x}")));
                }
                b.powi(n)
            } else {
                if b <= 0.0 {
                    return Err(domain(format!(
                        "real power of non-positive base {b} at x = {x}"
                    )));
                }
                b.powf(eval_value(exp, x)?)
            }
        }
        Expr::Call(func, a) => {
            let a = eval_value(a, x)?;
            match func {
                Func::Exp => a.exp(),
                Func::Log => {
                    if a <= 0.0 {
                        return Err(domain(format!("log of non-positive {a} at x = {x}")));
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a <= 0.0 {
                        return Err(domain(format!("sqrt of non-positive {a} at x = {x}")));
                    }
                    a.sqrt()
                }
            }
        }
    })
}

fn eval_jet(e: &Expr, x: f64) -> Result<Jet2> {
    Ok(match e {
        Expr::Const(v) => Jet2::constant(*v),
        Expr::Var => Jet2::variable(x),
        Expr::Neg(a) => -eval_jet(a, x)?,
        Expr::Binary(op, a, b) => {
            let (a, b) = (eval_jet(a, x)?, eval_jet(b, x)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.v == 0.0 {
                        return Err(domain(format!("division by zero at x = {x}")));
                    }
                    a / b
                }
            }
        }
        Expr::Pow(base, exp) => {
            let b = eval_jet(base, x)?;
            if let Some(n) = integer_literal(exp) {
                if b.v == 0.0 && n < 0 {
                    return Err(domain(format!("zero to a negative power at x = {x}")));
                }
                b.powi(n)
            } else {
                if b.v <= 0.0 {
                    return Err(domain(format!(
                        "real power of non-positive base {} at x = {x}",
                        b.v
                    )));
                }
                match exp.as_ref() {
                    Expr::Const(a) => b.powf(*a),
                    _ => (eval_jet(exp, x)? * b.ln()).exp(),
                }
            }
        }
        Expr::Call(func, a) => {
            let a = eval_jet(a, x)?;
            match func {
                Func::Exp => a.exp(),
                Func::Log => {
                    if a.v <= 0.0 {
                        return Err(domain(format!("log of non-positive {} at x = {x}", a.v)));
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a.v <= 0.0 {
                        return Err(domain(format!("sqrt of non-positive {} at x = {x}", a.v)));
                    }
                    a.sqrt()
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn parses_affine_profile() {
        let e = parse("1 - x").unwrap();
        assert_eq!(
            e.ast(),
            &Expr::Binary(BinOp::Sub, bx(Expr::Const(1.0)), bx(Expr::Var))
        );
    }

    #[test]
    fn parses_exponential_profile() {
        let e = parse("exp(-x)").unwrap();
        assert_eq!(e.ast(), &Expr::Call(Func::Exp, bx(Expr::Neg(bx(Expr::Var)))));
    }

    #[test]
    fn dangling_operator_reports_end_offset() {
        match parse("1 -") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        match parse("sin(x)") {
            Err(Error::UnknownIdentifier { offset, name }) => {
                assert_eq!((offset, name.as_str()), (0, "sin"))
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("1 + y"), Err(Error::UnknownIdentifier { offset: 4, .. })));
    }

    #[test]
    fn no_implicit_multiplication() {
        assert!(matches!(parse("2x"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse("(1)(2)"), Err(Error::Syntax { offset: 3, .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        // power binds tighter than unary minus
        let e = parse("-x^2").unwrap();
        assert_eq!(
            e.ast(),
            &Expr::Neg(bx(Expr::Pow(bx(Expr::Var), bx(Expr::Const(2.0)))))
        );
        assert_eq!(parse("2^3^2").unwrap().eval(0.0).unwrap(), 512.0);
        assert_eq!(parse("8 - 4 - 2").unwrap().eval(0.0).unwrap(), 2.0);
        assert_eq!(parse("8 / 4 / 2").unwrap().eval(0.0).unwrap(), 1.0);
        assert_eq!(parse("1 + 2 * 3").unwrap().eval(0.0).unwrap(), 7.0);
        assert_eq!(parse("2 ^ -1").unwrap().eval(0.0).unwrap(), 0.5);
    }

    #[test]
    fn unbalanced_parentheses() {
        assert!(matches!(parse("(1 + x"), Err(Error::Syntax { offset: 6, .. })));
        assert!(matches!(parse("1 + x)"), Err(Error::Syntax { offset: 5, .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn jets_of_reference_profiles() {
        let (v, d1, d2) = parse("1 - x").unwrap().eval_jet2(0.3).unwrap();
        assert!((v - 0.7).abs() < 1e-15);
        assert_eq!((d1, d2), (-1.0, 0.0));

        let e2 = (-2.0f64).exp();
        let (v, d1, d2) = parse("exp(-x)").unwrap().eval_jet2(2.0).unwrap();
        for (got, want) in [(v, e2), (d1, -e2), (d2, e2)] {
            assert!((got - want).abs() <= 1e-15 * want.abs());
        }
    }

    #[test]
    fn real_power_jet_matches_hand_derivatives() {
        let (v, d1, d2) = parse("(1 - x)^2.5").unwrap().eval_jet2(0.19).unwrap();
        let b: f64 = 0.81;
        let want = [b.powf(2.5), -2.5 * b.powf(1.5), 3.75 * b.sqrt()];
        for (got, w) in [v, d1, d2].into_iter().zip(want) {
            assert!((got - w).abs() <= 1e-14 * w.abs(), "{got} vs {w}");
        }
    }

    #[test]
    fn integer_powers_accept_negative_bases() {
        let e = parse("x^2").unwrap();
        assert_eq!(e.eval_jet2(-3.0).unwrap(), (9.0, -6.0, 2.0));
        assert_eq!(parse("x^-1").unwrap().eval(-2.0).unwrap(), -0.5);
        assert!(matches!(parse("x^2.5").unwrap().eval(-1.0), Err(Error::Domain(_))));
        assert!(matches!(parse("x^-1").unwrap().eval_jet2(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn domain_and_overflow_errors_are_distinct() {
        assert!(matches!(parse("log(x)").unwrap().eval_jet2(0.0), Err(Error::Domain(_))));
        assert!(matches!(parse("sqrt(x)").unwrap().eval_jet2(-1.0), Err(Error::Domain(_))));
        assert!(matches!(parse("1 / x").unwrap().eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(parse("exp(exp(x))").unwrap().eval_jet2(10.0), Err(Error::Overflow(_))));
        assert!(matches!(parse("1e999"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn display_round_trips() {
        for text in ["1 - x", "exp(-x)", "(1 - x)^2.5", "-x^2 / (1 + 2e-7*x)", "sqrt(log(2 + x)) ^ -2"] {
            let e = parse(text).unwrap();
            let back = parse(&e.to_string()).unwrap();
            assert_eq!(e.ast(), back.ast(), "{text} -> {e}");
        }
    }
}
