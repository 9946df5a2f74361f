//! Exact expressions: polynomial × exponential × trigonometric terms and
//! their quotients.

mod eval;
mod expression;
mod linear;
mod parse;
mod ratexpr;
mod term;

pub use eval::{evaluate_at, to_bigfloat, FloatCtx};
pub use expression::{Expression, Term};
pub use linear::LinearForm;
pub use parse::parse_expr;
pub use ratexpr::RatExpr;
pub use term::{Monomial, Signature, Trig, TrigKind};

use num_traits::One;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

