use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{fmt_rational, LinearForm, Monomial, Rational, Signature, Trig, TrigKind};

/// One summand `coeff · monomial · exp(L₁) · trig(L₂)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub coeff: Rational,
    pub sig: Signature,
}

/// A finite sum of terms in canonical form.
///
/// Terms are sorted by signature, signatures are pairwise distinct and all
/// coefficients are nonzero. Since the basis functions
/// `x^m · e^{L₁} · {1, cos L₂, sin L₂}` are linearly independent, the empty
/// sum is the only representation of the zero function.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expression {
    terms: Vec<Term>,
}

/// Accumulates `(coeff, signature)` pairs and emits the canonical sum.
#[derive(Default)]
pub(crate) struct TermSum(BTreeMap<Signature, Rational>);

impl TermSum {
    pub(crate) fn push(&mut self, coeff: Rational, sig: Signature) {
        if coeff.is_zero() {
            return;
        }
        match self.0.get_mut(&sig) {
            Some(acc) => *acc += coeff,
            None => {
                self.0.insert(sig, coeff);
            }
        }
    }

    pub(crate) fn finish(self) -> Expression {
        Expression {
            terms: self
                .0
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(sig, coeff)| Term { coeff, sig })
                .collect(),
        }
    }
}

impl Expression {
    pub fn zero() -> Self {
        Expression { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Expression::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expression::term(c, Signature::one())
    }

    pub fn var(i: usize) -> Self {
        Expression::term(
            Rational::one(),
            Signature::with_exp(Monomial::var(i), None, None),
        )
    }

    pub fn term(coeff: Rational, sig: Signature) -> Self {
        let mut s = TermSum::default();
        s.push(coeff, sig);
        s.finish()
    }

    pub fn exp(arg: &LinearForm) -> Self {
        Expression::term(
            Rational::one(),
            Signature::with_exp(Monomial::one(), Some(arg.clone()), None),
        )
    }

    pub fn trig(kind: TrigKind, arg: &LinearForm) -> Self {
        match Trig::normalize(kind, arg.clone()) {
            None => Expression::zero(),
            Some((c, t)) => Expression::term(c, Signature::with_exp(Monomial::one(), None, t)),
        }
    }

    pub fn from_linear(l: &LinearForm) -> Self {
        let mut s = TermSum::default();
        for (i, c) in l.coeffs() {
            s.push(c.clone(), Signature::with_exp(Monomial::var(*i), None, None));
        }
        s.push(l.constant_part().clone(), Signature::one());
        s.finish()
    }

    /// Canonicalizes an arbitrary list of raw terms (merging like terms and
    /// dropping zeros).
    pub fn from_terms<I: IntoIterator<Item = Term>>(terms: I) -> Self {
        let mut s = TermSum::default();
        for t in terms {
            s.push(t.coeff, t.sig);
        }
        s.finish()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when the expression is a rational constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [t] if t.sig.is_one() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    /// Interprets the expression as an affine-linear form in the coordinates.
    pub fn as_linear(&self) -> Option<LinearForm> {
        let mut coeffs = Vec::new();
        let mut constant = Rational::zero();
        for t in &self.terms {
            if t.sig.exp.is_some() || t.sig.trig.is_some() {
                return None;
            }
            match t.sig.mono.pairs() {
                [] => constant = t.coeff.clone(),
                [(i, 1)] => coeffs.push((*i, t.coeff.clone())),
                _ => return None,
            }
        }
        Some(LinearForm::from_parts(coeffs, constant))
    }

    pub fn scale(&self, k: &Rational) -> Expression {
        if k.is_zero() {
            return Expression::zero();
        }
        Expression {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: &t.coeff * k,
                    sig: t.sig.clone(),
                })
                .collect(),
        }
    }

    /// Multiplies every term by a single signature factor.
    pub fn mul_sig(&self, coeff: &Rational, sig: &Signature) -> Expression {
        let mut s = TermSum::default();
        for t in &self.terms {
            for (c, sg) in t.sig.mul(sig) {
                s.push(&t.coeff * coeff * c, sg);
            }
        }
        s.finish()
    }

    pub fn pow(&self, k: u32) -> Expression {
        let mut acc = Expression::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact partial derivative with respect to coordinate `i`.
    pub fn differentiate(&self, i: usize) -> Expression {
        let mut s = TermSum::default();
        for t in &self.terms {
            let sig = &t.sig;
            if let Some((e, mono)) = sig.mono.derivative(i) {
                s.push(
                    &t.coeff * Rational::from_integer(e.into()),
                    Signature {
                        mono,
                        exp: sig.exp.clone(),
                        trig: sig.trig.clone(),
                    },
                );
            }
            if let Some(l) = &sig.exp {
                let c = l.coeff(i);
                if !c.is_zero() {
                    s.push(&t.coeff * c, sig.clone());
                }
            }
            if let Some(tr) = &sig.trig {
                let c = tr.arg.coeff(i);
                if !c.is_zero() {
                    let (kind, sign) = match tr.kind {
                        TrigKind::Sin => (TrigKind::Cos, Rational::one()),
                        TrigKind::Cos => (TrigKind::Sin, -Rational::one()),
                    };
                    s.push(
                        &t.coeff * c * sign,
                        Signature {
                            mono: sig.mono.clone(),
                            exp: sig.exp.clone(),
                            trig: Some(Trig {
                                kind,
                                arg: tr.arg.clone(),
                            }),
                        },
                    );
                }
            }
        }
        s.finish()
    }

    /// Greatest common monomial divisor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.sig.mono.clone();
        for t in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(&t.sig.mono);
        }
        g
    }

    /// Divides every term by `x_i^k`; the caller guarantees divisibility.
    pub fn div_var(&self, i: usize, k: u32) -> Expression {
        Expression {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.clone(),
                    sig: Signature {
                        mono: t.sig.mono.div_var(i, k),
                        exp: t.sig.exp.clone(),
                        trig: t.sig.trig.clone(),
                    },
                })
                .collect(),
        }
    }

    /// Returns `q` when `self = q · other` for a rational `q`.
    pub fn ratio_to(&self, other: &Expression) -> Option<Rational> {
        if self.terms.len() != other.terms.len() || other.is_zero() {
            return None;
        }
        let q = &self.terms[0].coeff / &other.terms[0].coeff;
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            if a.sig != b.sig || a.coeff != &b.coeff * &q {
                return None;
            }
        }
        Some(q)
    }

    /// Exact quotient `self / f` when `f` divides `self` in the algebra of
    /// exponential polynomials; `None` when it does not, when trigonometric
    /// factors are present, or when the step budget runs out.
    pub fn exact_div(&self, f: &Expression) -> Option<Expression> {
        if f.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Expression::zero());
        }
        if self.terms.iter().chain(f.terms.iter()).any(|t| t.sig.trig.is_some()) {
            return None;
        }
        let nvars = self.max_var().max(f.max_var()).map_or(0, |m| m + 1);
        let key = |sig: &Signature| DivKey::new(sig, nvars);
        let mut rem: BTreeMap<DivKey, Rational> = self
            .terms
            .iter()
            .map(|t| (key(&t.sig), t.coeff.clone()))
            .collect();
        let fk: Vec<(DivKey, Rational)> = f.terms.iter().map(|t| (key(&t.sig), t.coeff.clone())).collect();
        let (lead_f, lead_c) = fk.iter().max_by(|a, b| a.0.cmp(&b.0)).cloned()?;
        let low_f = fk.iter().map(|x| &x.0).min()?.clone();
        let low_num = rem.keys().next()?.clone();
        let floor = low_num.div(&low_f)?;
        let mut quotient = TermSum::default();
        let budget = 4 * self.terms.len() + 64;
        for _ in 0..budget {
            let (top, c) = match rem.iter().next_back() {
                None => return Some(quotient.finish()),
                Some((k, c)) => (k.clone(), c.clone()),
            };
            let qk = top.div(&lead_f)?;
            if qk < floor {
                return None;
            }
            let qc = c / &lead_c;
            for (k, fc) in &fk {
                let prod = qk.mul(k);
                let v = rem.entry(prod.clone()).or_insert_with(Rational::zero);
                *v -= &qc * fc;
                if v.is_zero() {
                    rem.remove(&prod);
                }
            }
            quotient.push(qc, qk.to_signature());
        }
        None
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|t| {
                [
                    t.sig.mono.max_var(),
                    t.sig.exp.as_ref().and_then(|l| l.max_var()),
                    t.sig.trig.as_ref().and_then(|tr| tr.arg.max_var()),
                ]
            })
            .flatten()
            .max()
    }

    /// Substitutes rational values for all coordinates when no transcendental
    /// factor survives; `None` otherwise.
    pub fn eval_rational(&self, point: &[Rational]) -> Option<Rational> {
        let mut acc = Rational::zero();
        for t in &self.terms {
            let mut v = &t.coeff * t.sig.mono.eval(point);
            if let Some(l) = &t.sig.exp {
                if !l.eval(point).is_zero() {
                    return None;
                }
            }
            if let Some(tr) = &t.sig.trig {
                let a = tr.arg.eval(point);
                if !a.is_zero() {
                    return None;
                }
                if tr.kind == TrigKind::Sin {
                    v = Rational::zero();
                }
            }
            acc += v;
        }
        Some(acc)
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, t) in self.terms.iter().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for &(i, e) in t.sig.mono.pairs() {
                if e == 1 {
                    factors.push(names(i));
                } else {
                    factors.push(format!("{}^{}", names(i), e));
                }
            }
            if let Some(l) = &t.sig.exp {
                factors.push(format!("exp({})", l.fmt_with(names)));
            }
            if let Some(tr) = &t.sig.trig {
                let f = match tr.kind {
                    TrigKind::Sin => "sin",
                    TrigKind::Cos => "cos",
                };
                factors.push(format!("{f}({})", tr.arg.fmt_with(names)));
            }
            let abs = t.coeff.abs();
            let neg = t.coeff.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if factors.is_empty() {
                out.push_str(&fmt_rational(&abs));
            } else {
                if !abs.is_one() {
                    out.push_str(&fmt_rational(&abs));
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&|i| format!("x{}", i + 1)))
    }
}

impl Add for &Expression {
    type Output = Expression;
    fn add(self, rhs: &Expression) -> Expression {
        let mut s = TermSum::default();
        for t in self.terms.iter().chain(rhs.terms.iter()) {
            s.push(t.coeff.clone(), t.sig.clone());
        }
        s.finish()
    }
}

impl Sub for &Expression {
    type Output = Expression;
    fn sub(self, rhs: &Expression) -> Expression {
        let mut s = TermSum::default();
        for t in &self.terms {
            s.push(t.coeff.clone(), t.sig.clone());
        }
        for t in &rhs.terms {
            s.push(-&t.coeff, t.sig.clone());
        }
        s.finish()
    }
}

impl Neg for &Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Expression {
    type Output = Expression;
    fn mul(self, rhs: &Expression) -> Expression {
        let mut s = TermSum::default();
        for a in &self.terms {
            for b in &rhs.terms {
                let c = &a.coeff * &b.coeff;
                for (k, sig) in a.sig.mul(&b.sig) {
                    s.push(&c * k, sig);
                }
            }
        }
        s.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    fn x() -> Expression {
        Expression::var(0)
    }

    #[test]
    fn like_terms_cancel_to_empty_sum() {
        let e = &(&x() + &x()) - &x().scale(&rat(2, 1));
        assert!(e.is_zero());
        assert!(e.terms().is_empty());
    }

    #[test]
    fn exp_times_exp_of_negative_is_one() {
        let l = LinearForm::var(0);
        let e = &Expression::exp(&l) * &Expression::exp(&l.neg());
        assert_eq!(e, Expression::one());
    }

    #[test]
    fn derivative_of_x_exp_2x() {
        let l = LinearForm::var(0).scale(&rat(2, 1));
        let e = &Expression::exp(&l) * &x();
        let d = e.differentiate(0);
        let expected = &Expression::exp(&l) * &(&x().scale(&rat(2, 1)) + &Expression::one());
        assert_eq!(d, expected);
    }

    #[test]
    fn pythagorean_identity() {
        let s = Expression::trig(TrigKind::Sin, &LinearForm::var(0));
        let c = Expression::trig(TrigKind::Cos, &LinearForm::var(0));
        assert_eq!(&s.pow(2) + &c.pow(2), Expression::one());
    }
}

/// Term key ordered compatibly with multiplication: graded lex on the
/// monomial, then lex on the exponent's coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct DivKey {
    deg: u32,
    exps: Vec<u32>,
    lin: Vec<Rational>,
}

impl DivKey {
    fn new(sig: &Signature, nvars: usize) -> Self {
        let mut exps = vec![0u32; nvars];
        for &(i, e) in sig.mono.pairs() {
            exps[i] = e;
        }
        let mut lin = vec![Rational::zero(); nvars + 1];
        if let Some(l) = &sig.exp {
            for (i, c) in l.coeffs() {
                lin[*i] = c.clone();
            }
            lin[nvars] = l.constant_part().clone();
        }
        DivKey {
            deg: sig.mono.degree(),
            exps,
            lin,
        }
    }

    fn mul(&self, o: &DivKey) -> DivKey {
        DivKey {
            deg: self.deg + o.deg,
            exps: self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect(),
            lin: self.lin.iter().zip(&o.lin).map(|(a, b)| a + b).collect(),
        }
    }

    fn div(&self, o: &DivKey) -> Option<DivKey> {
        if self.exps.iter().zip(&o.exps).any(|(a, b)| a < b) {
            return None;
        }
        Some(DivKey {
            deg: self.deg - o.deg,
            exps: self.exps.iter().zip(&o.exps).map(|(a, b)| a - b).collect(),
            lin: self.lin.iter().zip(&o.lin).map(|(a, b)| a - b).collect(),
        })
    }

    fn to_signature(&self) -> Signature {
        let n = self.exps.len();
        let mono = Monomial::from_pairs(self.exps.iter().enumerate().map(|(i, e)| (i, *e)));
        let exp = LinearForm::from_parts(
            self.lin[..n].iter().enumerate().map(|(i, c)| (i, c.clone())),
            self.lin[n].clone(),
        );
        Signature::with_exp(mono, Some(exp), None)
    }
}
