use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_traits::Zero;

use super::{Expression, RatExpr, Rational, TrigKind};
use crate::error::EvalError;

const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: usize = 64;

/// Working precision plus the constant cache astro-float needs for
/// transcendental functions.
pub struct FloatCtx {
    pub bits: usize,
    cc: Consts,
}

impl FloatCtx {
    pub fn new(bits: usize) -> Self {
        FloatCtx {
            bits,
            cc: Consts::new().expect("astro-float constant cache"),
        }
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_i64(0, self.bits)
    }

    pub fn int(&self, k: i64) -> BigFloat {
        BigFloat::from_i64(k, self.bits)
    }

    pub fn rational(&mut self, q: &Rational) -> BigFloat {
        let n = BigFloat::parse(&q.numer().to_string(), Radix::Dec, self.bits, RM, &mut self.cc);
        let d = BigFloat::parse(&q.denom().to_string(), Radix::Dec, self.bits, RM, &mut self.cc);
        n.div(&d, self.bits, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.bits, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.bits, RM, &mut self.cc)
    }

    /// Binary exponent, `None` for zero.
    pub fn exponent(a: &BigFloat) -> Option<i64> {
        if a.is_zero() {
            None
        } else {
            a.exponent().map(|e| e as i64)
        }
    }

    pub fn to_decimal(&mut self, a: &BigFloat) -> String {
        a.format(Radix::Dec, RM, &mut self.cc)
            .unwrap_or_else(|_| "NaN".to_string())
    }
}

/// Value of `e` with the largest term magnitude, for cancellation checks.
fn eval_expression(e: &Expression, point: &[BigFloat], ctx: &mut FloatCtx) -> (BigFloat, Option<i64>) {
    let mut acc = ctx.zero();
    let mut scale: Option<i64> = None;
    for t in e.terms() {
        let mut v = ctx.rational(&t.coeff);
        for &(i, k) in t.sig.mono.pairs() {
            v = ctx.mul(&v, &point[i].powi(k as usize, ctx.bits, RM));
        }
        if let Some(l) = &t.sig.exp {
            let a = eval_linear(l, point, ctx);
            let ea = ctx.exp(&a);
            v = ctx.mul(&v, &ea);
        }
        if let Some(tr) = &t.sig.trig {
            let a = eval_linear(&tr.arg, point, ctx);
            let s = match tr.kind {
                TrigKind::Sin => ctx.sin(&a),
                TrigKind::Cos => ctx.cos(&a),
            };
            v = ctx.mul(&v, &s);
        }
        if let Some(ex) = FloatCtx::exponent(&v) {
            scale = Some(scale.map_or(ex, |s| s.max(ex)));
        }
        acc = ctx.add(&acc, &v);
    }
    (acc, scale)
}

fn eval_linear(l: &super::LinearForm, point: &[BigFloat], ctx: &mut FloatCtx) -> BigFloat {
    let mut acc = ctx.rational(l.constant_part());
    for (i, c) in l.coeffs() {
        let ci = ctx.rational(c);
        acc = ctx.add(&acc, &ctx.mul(&ci, &point[*i]));
    }
    acc
}

/// Converts a rational to a float at `bits` of precision.
pub fn to_bigfloat(q: &Rational, bits: usize) -> BigFloat {
    FloatCtx::new(bits).rational(q)
}

/// Evaluates `e` at a rational point to `bits` of precision.
///
/// The computation runs with guard bits; a result whose magnitude falls
/// below the largest intermediate term by more than the guard is reported as
/// precision loss rather than returned as noise. Values without surviving
/// transcendental factors are computed exactly first.
pub fn evaluate_at(e: &RatExpr, point: &[Rational], bits: usize) -> Result<BigFloat, EvalError> {
    let den = e.den();
    if let (Some(n), Some(d)) = (e.num().eval_rational(point), den.eval_rational(point)) {
        if d.is_zero() {
            return Err(EvalError::DenominatorVanishes);
        }
        return Ok(to_bigfloat(&(n / d), bits));
    }
    let mut ctx = FloatCtx::new(bits + GUARD_BITS);
    let p: Vec<BigFloat> = point.iter().map(|q| ctx.rational(q)).collect();
    let (dv, dscale) = eval_expression(&den, &p, &mut ctx);
    if cancelled(&dv, dscale, bits) {
        return Err(EvalError::DenominatorVanishes);
    }
    let (nv, nscale) = eval_expression(e.num(), &p, &mut ctx);
    if !e.num().is_zero() && cancelled(&nv, nscale, bits) {
        return Err(EvalError::PrecisionLoss);
    }
    let mut v = ctx.div(&nv, &dv);
    v.set_precision(bits, RM).map_err(|_| EvalError::PrecisionLoss)?;
    Ok(v)
}

fn cancelled(v: &BigFloat, scale: Option<i64>, bits: usize) -> bool {
    match (FloatCtx::exponent(v), scale) {
        (None, _) => true,
        (Some(e), Some(s)) => s - e > (bits as i64),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::{parse_expr, rat};

    fn close(a: &BigFloat, b: &BigFloat, bits: usize) -> bool {
        let d = a.sub(b, bits, RM).abs();
        d.is_zero() || FloatCtx::exponent(&d).unwrap() < FloatCtx::exponent(b).unwrap_or(0) - (bits as i64 - 8)
    }

    #[test]
    fn exact_values() {
        let ch = Chart::new(&["x", "y"]).unwrap();
        let e = parse_expr("x^2", &ch).unwrap();
        let v = evaluate_at(&e, &[rat(3, 2), rat(0, 1)], 128).unwrap();
        assert!(close(&v, &to_bigfloat(&rat(9, 4), 128), 128));
        let e = parse_expr("exp(x)", &ch).unwrap();
        let v = evaluate_at(&e, &[rat(0, 1), rat(1, 1)], 128).unwrap();
        assert!(close(&v, &to_bigfloat(&rat(1, 1), 128), 128));
    }

    #[test]
    fn vanishing_denominator_is_reported() {
        let ch = Chart::new(&["x", "y"]).unwrap();
        let e = parse_expr("1/(x-y)", &ch).unwrap();
        assert!(matches!(
            evaluate_at(&e, &[rat(1, 3), rat(1, 3)], 128),
            Err(EvalError::DenominatorVanishes)
        ));
        let e = parse_expr("1/(exp(x) - exp(y))", &ch).unwrap();
        assert!(matches!(
            evaluate_at(&e, &[rat(1, 3), rat(1, 3)], 128),
            Err(EvalError::DenominatorVanishes)
        ));
    }

    #[test]
    fn transcendental_value() {
        let ch = Chart::new(&["x", "y"]).unwrap();
        let e = parse_expr("sin(x)^2 + exp(2*y)", &ch).unwrap();
        let v = evaluate_at(&e, &[rat(1, 2), rat(1, 5)], 256).unwrap();
        let expected = (0.5f64).sin().powi(2) + (0.4f64).exp();
        let approx: f64 = FloatCtx::new(256).to_decimal(&v).parse().unwrap();
        assert!((approx - expected).abs() < 1e-12);
    }
}
