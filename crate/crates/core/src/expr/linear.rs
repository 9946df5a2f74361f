use std::fmt;

use num_traits::{One, Signed, Zero};

use super::Rational;

/// Affine-linear combination `Σ cᵢ·xᵢ + c₀` of chart coordinates.
///
/// Coefficients are kept sorted by coordinate index with zero entries dropped,
/// so structural equality is equality of functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    coeffs: Vec<(usize, Rational)>,
    constant: Rational,
}

impl LinearForm {
    pub fn zero() -> Self {
        LinearForm {
            coeffs: Vec::new(),
            constant: Rational::zero(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        LinearForm {
            coeffs: Vec::new(),
            constant: c,
        }
    }

    pub fn var(i: usize) -> Self {
        LinearForm {
            coeffs: vec![(i, Rational::one())],
            constant: Rational::zero(),
        }
    }

    pub fn from_parts<I>(coeffs: I, constant: Rational) -> Self
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut v: Vec<(usize, Rational)> = Vec::new();
        let mut sorted: Vec<(usize, Rational)> = coeffs.into_iter().collect();
        sorted.sort_by_key(|(i, _)| *i);
        for (i, c) in sorted {
            match v.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => v.push((i, c)),
            }
        }
        v.retain(|(_, c)| !c.is_zero());
        LinearForm {
            coeffs: v,
            constant,
        }
    }

    pub fn coeffs(&self) -> &[(usize, Rational)] {
        &self.coeffs
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs
            .iter()
            .find(|(j, _)| *j == i)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        LinearForm::from_parts(
            self.coeffs.iter().chain(other.coeffs.iter()).cloned(),
            &self.constant + &other.constant,
        )
    }

    pub fn neg(&self) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, -c)).collect(),
            constant: -&self.constant,
        }
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> LinearForm {
        if k.is_zero() {
            return LinearForm::zero();
        }
        LinearForm {
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = self.constant.clone();
        for (i, c) in &self.coeffs {
            acc += c * &point[*i];
        }
        acc
    }

    /// Leading coefficient: the first coordinate coefficient, or the constant
    /// when no coordinate occurs.
    fn leading(&self) -> &Rational {
        self.coeffs
            .first()
            .map(|(_, c)| c)
            .unwrap_or(&self.constant)
    }

    /// Returns `(negated, form)` with `form` having a positive leading coefficient.
    pub fn sign_normalized(&self) -> (bool, LinearForm) {
        if self.leading().is_negative() {
            (true, self.neg())
        } else {
            (false, self.clone())
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        self.coeffs.last().map(|(i, _)| *i)
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        let mut out = String::new();
        for (i, c) in &self.coeffs {
            let name = names(*i);
            let abs = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if abs.is_one() {
                out.push_str(&name);
            } else {
                out.push_str(&format!("{}*{}", super::fmt_rational(&abs), name));
            }
        }
        if !self.constant.is_zero() || out.is_empty() {
            let abs = self.constant.abs();
            if out.is_empty() {
                out.push_str(&super::fmt_rational(&self.constant));
            } else {
                let sign = if self.constant.is_negative() { "-" } else { "+" };
                out.push_str(&format!(" {sign} {}", super::fmt_rational(&abs)));
            }
        }
        out
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&|i| format!("x{}", i + 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    #[test]
    fn merges_and_drops_zero_coefficients() {
        let l = LinearForm::from_parts(vec![(1, rat(2, 1)), (0, rat(1, 1)), (1, rat(-2, 1))], rat(0, 1));
        assert_eq!(l.coeffs(), &[(0, rat(1, 1))]);
    }

    #[test]
    fn sign_normalization_makes_leading_positive() {
        let l = LinearForm::from_parts(vec![(0, rat(-3, 5))], rat(1, 1));
        let (neg, n) = l.sign_normalized();
        assert!(neg);
        assert_eq!(n.coeff(0), rat(3, 5));
        assert_eq!(n.constant_part(), &rat(-1, 1));
    }
}
