use num_traits::{One, Zero};

use super::{rat, LinearForm, Rational};

/// Product of coordinate powers, sorted by coordinate index, no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![(i, 1)])
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Self {
        let mut v: Vec<(usize, u32)> = pairs.into_iter().filter(|(_, e)| *e > 0).collect();
        v.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, u32)> = Vec::with_capacity(v.len());
        for (i, e) in v {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += e,
                _ => out.push((i, e)),
            }
        }
        Monomial(out)
    }

    pub fn pairs(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0
            .iter()
            .find(|(j, _)| *j == i)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_pairs(self.0.iter().chain(other.0.iter()).cloned())
    }

    /// Divides out `x_i^k`; caller guarantees the exponent is at least `k`.
    pub fn div_var(&self, i: usize, k: u32) -> Monomial {
        Monomial::from_pairs(
            self.0
                .iter()
                .map(|&(j, e)| if j == i { (j, e - k) } else { (j, e) }),
        )
    }

    /// Derivative coefficient and reduced monomial for `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Option<(u32, Monomial)> {
        let e = self.exponent(i);
        if e == 0 {
            None
        } else {
            Some((e, self.div_var(i, 1)))
        }
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial::from_pairs(
            self.0
                .iter()
                .map(|&(i, e)| (i, e.min(other.exponent(i)))),
        )
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::one();
        for &(i, e) in &self.0 {
            acc *= num_traits::pow(point[i].clone(), e as usize);
        }
        acc
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|(i, _)| *i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrigKind {
    Cos,
    Sin,
}

/// `sin(arg)` or `cos(arg)` with `arg` sign-normalized and not identically zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trig {
    pub kind: TrigKind,
    pub arg: LinearForm,
}

impl Trig {
    /// Builds `kind(arg)` in normal form. Returns the scalar sign and the
    /// remaining trig factor (`None` when it reduces to a constant), or
    /// `None` overall when the value is identically zero.
    pub fn normalize(kind: TrigKind, arg: LinearForm) -> Option<(Rational, Option<Trig>)> {
        if arg.is_zero() {
            return match kind {
                TrigKind::Sin => None,
                TrigKind::Cos => Some((Rational::one(), None)),
            };
        }
        let (negated, arg) = arg.sign_normalized();
        let sign = if negated && kind == TrigKind::Sin {
            -Rational::one()
        } else {
            Rational::one()
        };
        Some((sign, Some(Trig { kind, arg })))
    }
}

/// The non-coefficient part of a term: `monomial · exp(L₁) · trig(L₂)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub mono: Monomial,
    pub exp: Option<LinearForm>,
    pub trig: Option<Trig>,
}

impl Signature {
    pub fn one() -> Self {
        Signature::default()
    }

    pub fn is_one(&self) -> bool {
        self.mono.is_one() && self.exp.is_none() && self.trig.is_none()
    }

    pub fn with_exp(mono: Monomial, exp: Option<LinearForm>, trig: Option<Trig>) -> Self {
        let exp = exp.filter(|l| !l.is_zero());
        Signature { mono, exp, trig }
    }

    /// Product of two signatures, reducing trig products to sums. Each
    /// element of the result is `(scalar, signature)`.
    pub fn mul(&self, other: &Signature) -> Vec<(Rational, Signature)> {
        let mono = self.mono.mul(&other.mono);
        let exp = match (&self.exp, &other.exp) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => Some(a.add(b)),
        };
        let trig_parts: Vec<(Rational, Option<Trig>)> = match (&self.trig, &other.trig) {
            (None, None) => vec![(Rational::one(), None)],
            (Some(t), None) | (None, Some(t)) => vec![(Rational::one(), Some(t.clone()))],
            (Some(a), Some(b)) => trig_product(a, b),
        };
        trig_parts
            .into_iter()
            .map(|(c, t)| (c, Signature::with_exp(mono.clone(), exp.clone(), t)))
            .collect()
    }
}

/// Product-to-sum reduction of `a·b`.
pub fn trig_product(a: &Trig, b: &Trig) -> Vec<(Rational, Option<Trig>)> {
    use TrigKind::*;
    let diff = a.arg.sub(&b.arg);
    let sum = a.arg.add(&b.arg);
    let half = rat(1, 2);
    // (kind, arg, scalar) pieces before normalization
    let pieces: [(TrigKind, LinearForm, Rational); 2] = match (a.kind, b.kind) {
        (Sin, Sin) => [(Cos, diff, half.clone()), (Cos, sum, -half.clone())],
        (Cos, Cos) => [(Cos, diff, half.clone()), (Cos, sum, half.clone())],
        (Sin, Cos) => [(Sin, sum, half.clone()), (Sin, diff, half.clone())],
        (Cos, Sin) => [(Sin, sum, half.clone()), (Sin, diff, -half.clone())],
    };
    let mut out: Vec<(Rational, Option<Trig>)> = Vec::new();
    for (kind, arg, scalar) in pieces {
        if let Some((sign, t)) = Trig::normalize(kind, arg) {
            let c = scalar * sign;
            match out.iter_mut().find(|(_, u)| *u == t) {
                Some((acc, _)) => *acc += c,
                None => out.push((c, t)),
            }
        }
    }
    out.retain(|(c, _)| !c.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_times_cos_is_half_sin_double() {
        let s = Trig {
            kind: TrigKind::Sin,
            arg: LinearForm::var(0),
        };
        let c = Trig {
            kind: TrigKind::Cos,
            arg: LinearForm::var(0),
        };
        let p = trig_product(&s, &c);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].0, rat(1, 2));
        let t = p[0].1.as_ref().unwrap();
        assert_eq!(t.kind, TrigKind::Sin);
        assert_eq!(t.arg.coeff(0), rat(2, 1));
    }

    #[test]
    fn sin_of_negative_argument_flips_sign() {
        let (sign, t) = Trig::normalize(TrigKind::Sin, LinearForm::var(0).neg()).unwrap();
        assert_eq!(sign, rat(-1, 1));
        assert_eq!(t.unwrap().arg, LinearForm::var(0));
        assert!(Trig::normalize(TrigKind::Sin, LinearForm::zero()).is_none());
    }
}
