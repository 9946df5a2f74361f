//! Recursive-descent parser for coordinate expressions.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := base ("^" signed-integer)?
//! base   := rational | identifier | "(" expr ")" | func "(" expr ")"
//! func   := "exp" | "sin" | "cos" | "sinh" | "cosh"
//! ```
//!
//! A leading `-` or `+` is also accepted in front of a term (`-x + y`).

use num_bigint::BigInt;

use super::{Expression, LinearForm, RatExpr, Rational, TrigKind};
use crate::chart::Chart;
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((Tok::Int(n), start));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    chart: &'a Chart,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.pos(),
                msg: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<RatExpr, ParseError> {
        let mut acc = self.signed_term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn signed_term(&mut self) -> Result<RatExpr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-&self.term()?)
            }
            Tok::Plus => {
                self.bump();
                self.term()
            }
            _ => self.term(),
        }
    }

    fn term(&mut self) -> Result<RatExpr, ParseError> {
        let (base, k) = self.factor()?;
        let mut acc = RatExpr::one();
        acc = self.apply(acc, &base, k, false)?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let (b, k) = self.factor()?;
                    acc = self.apply(acc, &b, k, false)?;
                }
                Tok::Slash => {
                    self.bump();
                    let pos = self.pos();
                    let (b, k) = self.factor()?;
                    acc = self.apply(acc, &b, k, true).map_err(|e| match e {
                        ParseError::DivisionByZero { .. } => ParseError::DivisionByZero { pos },
                        other => other,
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    /// Multiplies (or divides) `acc` by `base^k`, dividing repeatedly so that
    /// denominator powers stay factored.
    fn apply(&self, acc: RatExpr, base: &RatExpr, k: i32, divide: bool) -> Result<RatExpr, ParseError> {
        let k = if divide { -k } else { k };
        if k >= 0 {
            let p = base.powi(k).expect("nonnegative power");
            return Ok(&acc * &p);
        }
        let mut acc = acc;
        for _ in 0..(-k) {
            acc = acc
                .checked_div(base)
                .ok_or(ParseError::DivisionByZero { pos: self.pos() })?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<(RatExpr, i32), ParseError> {
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let pos = self.pos();
            let neg = match self.peek() {
                Tok::Minus => {
                    self.bump();
                    true
                }
                Tok::Plus => {
                    self.bump();
                    false
                }
                _ => false,
            };
            match self.bump() {
                Tok::Int(n) => {
                    let k: i32 = i32::try_from(&n).map_err(|_| ParseError::Syntax {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    let k = if neg { -k } else { k };
                    if k < 0 && base.is_zero() {
                        return Err(ParseError::DivisionByZero { pos });
                    }
                    if *self.peek() == Tok::Slash {
                        if let Tok::Int(_) = self.toks[self.at + 1].0 {
                            return Err(ParseError::NonIntegerExponent { pos });
                        }
                    }
                    Ok((base, k))
                }
                _ => Err(ParseError::NonIntegerExponent { pos }),
            }
        } else {
            Ok((base, 1))
        }
    }

    fn base(&mut self) -> Result<RatExpr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(RatExpr::constant(Rational::from_integer(n))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "sinh" => Some(Func::Sinh),
                    "cosh" => Some(Func::Cosh),
                    _ => None,
                };
                if let Some(f) = func {
                    if *self.peek() == Tok::LParen {
                        self.bump();
                        let arg_pos = self.pos();
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        let lin = linear_argument(&arg).ok_or_else(|| ParseError::NonLinearArgument {
                            pos: arg_pos,
                            func: name.clone(),
                        })?;
                        return Ok(apply_func(f, &lin));
                    }
                }
                if let Some(i) = self.chart.index_of(&name) {
                    Ok(RatExpr::var(i))
                } else if let Some(v) = self.chart.param(&name) {
                    Ok(RatExpr::constant(v.clone()))
                } else {
                    Err(ParseError::Undeclared { pos, name })
                }
            }
            Tok::End => Err(ParseError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            other => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected token {}", describe(&other)),
            }),
        }
    }
}

#[derive(Clone, Copy)]
enum Func {
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("`{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn linear_argument(e: &RatExpr) -> Option<LinearForm> {
    if !e.has_trivial_den() {
        return None;
    }
    e.num().as_linear()
}

fn apply_func(f: Func, l: &LinearForm) -> RatExpr {
    let half = super::rat(1, 2);
    let e = match f {
        Func::Exp => Expression::exp(l),
        Func::Sin => Expression::trig(TrigKind::Sin, l),
        Func::Cos => Expression::trig(TrigKind::Cos, l),
        Func::Sinh => (&Expression::exp(l) - &Expression::exp(&l.neg())).scale(&half),
        Func::Cosh => (&Expression::exp(l) + &Expression::exp(&l.neg())).scale(&half),
    };
    RatExpr::from_expr(e)
}

/// Parses `text` over the coordinates and bound parameters of `chart`.
pub fn parse_expr(text: &str, chart: &Chart) -> Result<RatExpr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, chart };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        other => Err(ParseError::Syntax {
            pos: p.pos(),
            msg: format!("unexpected token {}", describe(other)),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    fn chart() -> Chart {
        Chart::new(&["x", "y", "z"]).unwrap().with_param("c", rat(1, 1))
    }

    #[test]
    fn pythagorean_identity_parses_to_one() {
        let e = parse_expr("sin(x)^2 + cos(x)^2", &chart()).unwrap();
        assert!(e.is_one());
    }

    #[test]
    fn parameter_substitution() {
        let e = parse_expr("2*(2-c)*exp(c*x)", &chart()).unwrap();
        let expected = RatExpr::from_expr(Expression::exp(&LinearForm::var(0)).scale(&rat(2, 1)));
        assert_eq!(e, expected);
    }

    #[test]
    fn quotient_keeps_numerator_and_denominator() {
        let e = parse_expr("x/y^3", &chart()).unwrap();
        assert_eq!(e.num(), &Expression::var(0));
        assert_eq!(e.den(), Expression::var(1).pow(3));
    }

    #[test]
    fn hyperbolic_functions_become_exponentials() {
        let e = parse_expr("cosh(x)^2 - sinh(x)^2", &chart()).unwrap();
        assert!(e.is_one());
    }

    #[test]
    fn error_positions() {
        match parse_expr("x + w", &chart()) {
            Err(ParseError::Undeclared { pos, name }) => {
                assert_eq!(pos, 4);
                assert_eq!(name, "w");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_expr("exp(x*y)", &chart()),
            Err(ParseError::NonLinearArgument { pos: 4, .. })
        ));
        assert!(matches!(
            parse_expr("x^(1/2)", &chart()),
            Err(ParseError::NonIntegerExponent { pos: 2 })
        ));
        assert!(matches!(parse_expr("x^1/2", &chart()), Err(ParseError::NonIntegerExponent { .. })));
        assert!(matches!(parse_expr("(x + y", &chart()), Err(ParseError::Syntax { pos: 6, .. })));
        assert!(matches!(parse_expr("x $ y", &chart()), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_expr("1/(x-x)", &chart()), Err(ParseError::DivisionByZero { .. })));
    }

    #[test]
    fn negative_exponents_and_rationals() {
        let e = parse_expr("3/4*x^-2", &chart()).unwrap();
        assert_eq!(e.num(), &Expression::constant(rat(3, 4)));
        assert_eq!(e.den(), Expression::var(0).pow(2));
    }
}
