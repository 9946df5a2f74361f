use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Expression, LinearForm, Monomial, Rational, Signature};

/// Quotient `num / den` of canonical expressions.
///
/// The denominator is stored factored: a map from primitive factors (leading
/// coefficient 1, no monomial or exponential content) and single coordinates
/// to their multiplicities. Keeping the factorization makes sums of
/// quotients with shared factors cheap, and derivatives raise each factor
/// by one power instead of squaring the denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatExpr {
    num: Expression,
    den: BTreeMap<Expression, u32>,
}

impl Default for RatExpr {
    fn default() -> Self {
        RatExpr::zero()
    }
}

/// Content split of a would-be denominator: `e = coeff · exp(E) · Π factors`.
struct FactorSplit {
    coeff: Rational,
    exp: Option<LinearForm>,
    factors: Vec<(Expression, u32)>,
}

fn split_factor(e: &Expression) -> FactorSplit {
    debug_assert!(!e.is_zero());
    let mut factors = Vec::new();
    let content = e.monomial_content();
    let mut rest = e.clone();
    for &(i, k) in content.pairs() {
        rest = rest.div_var(i, k);
        factors.push((Expression::var(i), k));
    }
    let first_exp = rest.terms()[0].sig.exp.clone();
    let mut exp = None;
    if first_exp.is_some() && rest.terms().iter().all(|t| t.sig.exp == first_exp) {
        let e_form = first_exp.unwrap();
        rest = rest.mul_sig(
            &Rational::one(),
            &Signature::with_exp(Monomial::one(), Some(e_form.neg()), None),
        );
        exp = Some(e_form);
    }
    let coeff = rest.terms()[0].coeff.clone();
    let rest = rest.scale(&coeff.recip());
    if !(rest.len() == 1 && rest.terms()[0].sig.is_one()) {
        factors.push((rest, 1));
    }
    FactorSplit {
        coeff,
        exp,
        factors,
    }
}

impl RatExpr {
    pub fn zero() -> Self {
        RatExpr {
            num: Expression::zero(),
            den: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        RatExpr::from_expr(Expression::one())
    }

    pub fn constant(c: Rational) -> Self {
        RatExpr::from_expr(Expression::constant(c))
    }

    pub fn int(c: i64) -> Self {
        RatExpr::constant(Rational::from_integer(c.into()))
    }

    pub fn var(i: usize) -> Self {
        RatExpr::from_expr(Expression::var(i))
    }

    pub fn from_expr(num: Expression) -> Self {
        RatExpr {
            num,
            den: BTreeMap::new(),
        }
    }

    /// Builds `num / den`, extracting denominator content into the numerator.
    pub fn from_parts(num: Expression, den: &Expression) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(RatExpr::from_expr(num).div_expr(den))
    }

    pub fn num(&self) -> &Expression {
        &self.num
    }

    /// Factored denominator as `(factor, multiplicity)` pairs.
    pub fn den_factors(&self) -> impl Iterator<Item = (&Expression, u32)> {
        self.den.iter().map(|(f, k)| (f, *k))
    }

    /// Expanded denominator.
    pub fn den(&self) -> Expression {
        let mut acc = Expression::one();
        for (f, k) in &self.den {
            acc = &acc * &f.pow(*k);
        }
        acc
    }

    /// Numerator after rewriting over the common denominator `Π f^k` of
    /// `common`; `None` if `common` does not contain this denominator.
    pub fn numerator_over(&self, common: &BTreeMap<Expression, u32>) -> Option<Expression> {
        let mut acc = self.num.clone();
        for (f, k) in &self.den {
            if common.get(f).is_none_or(|c| c < k) {
                return None;
            }
        }
        for (f, c) in common {
            let k = self.den.get(f).copied().unwrap_or(0);
            if *c > k {
                acc = &acc * &f.pow(c - k);
            }
        }
        Some(acc)
    }

    /// Merges this denominator into a running least common multiple.
    pub fn lcm_den_into(&self, common: &mut BTreeMap<Expression, u32>) {
        for (f, k) in &self.den {
            let slot = common.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(*k);
        }
    }

    pub fn has_trivial_den(&self) -> bool {
        self.den.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num == Expression::one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            self.num.ratio_to(&self.den())
        }
    }

    /// Exact functional equality.
    pub fn equals(&self, other: &RatExpr) -> bool {
        (self - other).is_zero()
    }

    fn normalized(mut num: Expression, mut den: BTreeMap<Expression, u32>) -> RatExpr {
        if num.is_zero() {
            return RatExpr::zero();
        }
        den.retain(|_, k| *k > 0);
        // cancel coordinate factors against the numerator's monomial content
        let content = num.monomial_content();
        for &(i, e) in content.pairs() {
            let key = Expression::var(i);
            if let Some(k) = den.get_mut(&key) {
                let c = (*k).min(e);
                num = num.div_var(i, c);
                *k -= c;
            }
        }
        den.retain(|_, k| *k > 0);
        // exact division by non-coordinate factors
        let keys: Vec<Expression> = den.keys().filter(|f| f.len() > 1).cloned().collect();
        for f in keys {
            while let Some(k) = den.get_mut(&f) {
                if *k == 0 || num.len() < f.len() {
                    break;
                }
                match num.exact_div(&f) {
                    Some(q) => {
                        num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
        den.retain(|_, k| *k > 0);
        // numerator proportional to a single factor
        let hit = den
            .keys()
            .find_map(|f| num.ratio_to(f).map(|q| (f.clone(), q)));
        if let Some((f, q)) = hit {
            num = Expression::constant(q);
            if let Some(k) = den.get_mut(&f) {
                *k -= 1;
            }
            den.retain(|_, k| *k > 0);
        }
        RatExpr { num, den }
    }

    fn div_expr(&self, e: &Expression) -> RatExpr {
        let split = split_factor(e);
        let mut num = self.num.scale(&split.coeff.recip());
        if let Some(l) = &split.exp {
            num = num.mul_sig(
                &Rational::one(),
                &Signature::with_exp(Monomial::one(), Some(l.neg()), None),
            );
        }
        let mut den = self.den.clone();
        for (f, k) in split.factors {
            *den.entry(f).or_insert(0) += k;
        }
        RatExpr::normalized(num, den)
    }

    pub fn recip(&self) -> Option<RatExpr> {
        if self.is_zero() {
            return None;
        }
        Some(RatExpr::from_expr(self.den()).div_expr(&self.num))
    }

    pub fn checked_div(&self, other: &RatExpr) -> Option<RatExpr> {
        if other.is_zero() {
            return None;
        }
        let mut den = self.den.clone();
        let num = &self.num * &other.den();
        let split = split_factor(&other.num);
        let mut num = num.scale(&split.coeff.recip());
        if let Some(l) = &split.exp {
            num = num.mul_sig(
                &Rational::one(),
                &Signature::with_exp(Monomial::one(), Some(l.neg()), None),
            );
        }
        for (f, k) in split.factors {
            *den.entry(f).or_insert(0) += k;
        }
        Some(RatExpr::normalized(num, den))
    }

    pub fn scale(&self, k: &Rational) -> RatExpr {
        if k.is_zero() {
            return RatExpr::zero();
        }
        RatExpr {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn powi(&self, k: i32) -> Option<RatExpr> {
        if k >= 0 {
            let k = k as u32;
            let num = self.num.pow(k);
            let den = self.den.iter().map(|(f, m)| (f.clone(), m * k)).collect();
            Some(RatExpr::normalized(num, den))
        } else {
            self.recip()?.powi(-k)
        }
    }

    /// Exact partial derivative with respect to coordinate `i`.
    pub fn differentiate(&self, i: usize) -> RatExpr {
        let dnum = self.num.differentiate(i);
        if self.den.is_empty() {
            return RatExpr::from_expr(dnum);
        }
        // (N/D)' = (N'·F − N·Σ k_f f'·F/f) / (D·F), F = Π f
        let factors: Vec<(&Expression, u32)> = self.den.iter().map(|(f, k)| (f, *k)).collect();
        let mut numer = dnum.clone();
        let mut full = Expression::one();
        for (f, _) in &factors {
            full = &full * f;
        }
        numer = &numer * &full;
        for (j, (f, k)) in factors.iter().enumerate() {
            let df = f.differentiate(i);
            if df.is_zero() {
                continue;
            }
            let mut others = Expression::one();
            for (l, (g, _)) in factors.iter().enumerate() {
                if l != j {
                    others = &others * g;
                }
            }
            let piece = &(&self.num * &df) * &others;
            numer = &numer - &piece.scale(&Rational::from_integer((*k).into()));
        }
        let den = self.den.iter().map(|(f, k)| (f.clone(), k + 1)).collect();
        RatExpr::normalized(numer, den)
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        let num = self.num.fmt_with(names);
        if self.den.is_empty() {
            return num;
        }
        let num = if self.num.len() > 1 {
            format!("({num})")
        } else {
            num
        };
        let parts: Vec<String> = self
            .den
            .iter()
            .map(|(f, k)| {
                let s = f.fmt_with(names);
                let s = if f.len() > 1 { format!("({s})") } else { s };
                if *k == 1 {
                    s
                } else {
                    format!("{s}^{k}")
                }
            })
            .collect();
        format!("{num}/{}", parts.join("/"))
    }
}

impl From<Expression> for RatExpr {
    fn from(e: Expression) -> Self {
        RatExpr::from_expr(e)
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&|i| format!("x{}", i + 1)))
    }
}

fn lcm_add(a: &RatExpr, b: &RatExpr, negate_b: bool) -> RatExpr {
    if a.is_zero() {
        return if negate_b { -b } else { b.clone() };
    }
    if b.is_zero() {
        return a.clone();
    }
    let mut lcm: BTreeMap<Expression, u32> = a.den.clone();
    for (f, k) in &b.den {
        let e = lcm.entry(f.clone()).or_insert(0);
        *e = (*e).max(*k);
    }
    let lift = |r: &RatExpr| -> Expression {
        let mut acc = r.num.clone();
        for (f, k) in &lcm {
            let have = r.den.get(f).copied().unwrap_or(0);
            if *k > have {
                acc = &acc * &f.pow(k - have);
            }
        }
        acc
    };
    let na = lift(a);
    let nb = lift(b);
    let num = if negate_b { &na - &nb } else { &na + &nb };
    RatExpr::normalized(num, lcm)
}

impl Add for &RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: &RatExpr) -> RatExpr {
        lcm_add(self, rhs, false)
    }
}

impl Sub for &RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: &RatExpr) -> RatExpr {
        lcm_add(self, rhs, true)
    }
}

impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        RatExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: &RatExpr) -> RatExpr {
        if self.is_zero() || rhs.is_zero() {
            return RatExpr::zero();
        }
        let num = &self.num * &rhs.num;
        let mut den = self.den.clone();
        for (f, k) in &rhs.den {
            *den.entry(f.clone()).or_insert(0) += k;
        }
        RatExpr::normalized(num, den)
    }
}

impl Add for RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: RatExpr) -> RatExpr {
        &self + &rhs
    }
}

impl Sub for RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: RatExpr) -> RatExpr {
        &self - &rhs
    }
}

impl Mul for RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: RatExpr) -> RatExpr {
        &self * &rhs
    }
}

impl Neg for RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    #[test]
    fn quotient_of_monomials_cancels_common_powers() {
        let x = RatExpr::var(0);
        let y = RatExpr::var(1);
        let q = (&x * &y).checked_div(&y.powi(3).unwrap()).unwrap();
        assert_eq!(q.num(), &Expression::var(0));
        assert_eq!(q.den(), Expression::var(1).pow(2));
    }

    #[test]
    fn trig_quotient_constant_is_detected() {
        let c = crate::Chart::new(&["t", "p"]).unwrap();
        let e = crate::parse_expr("(1 - cos(2*t))^2/(sin(t)^2)^2", &c).unwrap();
        assert_eq!(e.as_constant(), Some(rat(4, 1)));
        let f = crate::parse_expr("cos(t)/(1 - cos(2*t))", &c).unwrap();
        assert_eq!(f.as_constant(), None);
    }

    #[test]
    fn zero_over_anything_is_zero() {
        let d = &RatExpr::one() + &RatExpr::var(0);
        let z = RatExpr::zero().checked_div(&d).unwrap();
        assert!(z.is_zero());
        assert!(RatExpr::one().checked_div(&RatExpr::zero()).is_none());
    }

    #[test]
    fn exponential_denominator_moves_to_numerator() {
        let e = RatExpr::from_expr(Expression::exp(&LinearForm::var(0)));
        let q = RatExpr::one().checked_div(&e).unwrap();
        assert!(q.has_trivial_den());
        assert_eq!(q.num(), &Expression::exp(&LinearForm::var(0).neg()));
    }

    #[test]
    fn derivative_of_reciprocal() {
        let d = &RatExpr::one() + &RatExpr::var(0).powi(2).unwrap();
        let f = d.recip().unwrap();
        let df = f.differentiate(0);
        let expected = RatExpr::var(0)
            .scale(&rat(-2, 1))
            .checked_div(&d.powi(2).unwrap())
            .unwrap();
        assert!(df.equals(&expected));
        let (_, k) = df.den_factors().next().unwrap();
        assert_eq!(k, 2);
    }

    #[test]
    fn sum_with_shared_factor_keeps_single_power() {
        let d = &RatExpr::one() + &RatExpr::var(0);
        let a = RatExpr::one().checked_div(&d).unwrap();
        let b = RatExpr::var(1).checked_div(&d).unwrap();
        let s = &a + &b;
        assert_eq!(s.den_factors().count(), 1);
        assert_eq!(s.den_factors().next().unwrap().1, 1);
    }
}
