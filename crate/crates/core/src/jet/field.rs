//! Scalar fields the rank computations run over.
//!
//! Coefficients evaluated at a rational point contain values `e^a`, `cos b`
//! and `sin b` for rational `a`, `b`. The prime-field backend maps
//! `a ↦ e^a` and `b ↦ e^{ib}` to random group homomorphisms
//! `(Q, +) → F_p^*` (into the subgroup of prime order `q = (p−1)/4`) so every
//! multiplicative relation among these values is preserved while the
//! transcendental values themselves are specialized generically.

use std::fmt::Debug;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::expr::{FloatCtx, Rational, TrigKind};

pub trait Field: Send + Sync {
    type E: Clone + Debug + Send + Sync;

    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    /// `None` when the rational has no image (denominator divisible by p).
    fn from_rational(&self, q: &Rational) -> Option<Self::E>;
    fn from_i64(&self, k: i64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Option<Self::E>;
    /// Exact zero test (floats: bitwise zero only).
    fn is_zero(&self, a: &Self::E) -> bool;
    /// Binary magnitude used for pivot choice; `None` for zero.
    fn magnitude(&self, a: &Self::E) -> Option<i64>;
    fn exp_const(&self, a: &Rational) -> Option<Self::E>;
    fn trig_const(&self, kind: TrigKind, b: &Rational) -> Option<Self::E>;
    /// Whether arithmetic is exact (no pivot threshold needed).
    fn exact(&self) -> bool;
    /// Relative threshold in bits below which a pivot counts as zero.
    fn threshold_bits(&self) -> i64 {
        0
    }
    fn describe(&self) -> String;
}

/// `F_p` with `p = 4q + 1`, `q` prime, plus the homomorphism data.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u64,
    q: u64,
    i: u64,
    exp_base: u64,
    trig_base: u64,
}

/// Primes `p < 2^31` with `p ≡ 1 (mod 4)` and `(p−1)/4` prime, with a
/// square root of −1 in each.
pub const PRIMES: [(u64, u64); 4] = [
    (2147483477, 833330490),
    (2147483069, 465200137),
    (2147481893, 160068539),
    (2147481269, 378122216),
];

impl PrimeField {
    pub fn new(which: usize, rng: &mut ChaCha8Rng) -> Self {
        let (p, i) = PRIMES[which % PRIMES.len()];
        let q = (p - 1) / 4;
        let pick = |rng: &mut ChaCha8Rng| loop {
            let r = rng.gen_range(2..p - 1);
            let h = pow_mod(r, 4, p);
            if h != 1 {
                return h;
            }
        };
        let exp_base = pick(rng);
        let trig_base = pick(rng);
        PrimeField {
            p,
            q,
            i,
            exp_base,
            trig_base,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_big(&self, n: &BigInt, m: u64) -> u64 {
        let r = n.mod_floor(&BigInt::from(m));
        r.to_u64().expect("reduced residue")
    }

    /// Image of a rational in `Z/m` (`None` if the denominator is not invertible).
    fn rational_mod(&self, a: &Rational, m: u64) -> Option<u64> {
        let num = self.reduce_big(a.numer(), m);
        let den = self.reduce_big(a.denom(), m);
        let di = inv_mod(den, m)?;
        Some(mul_mod(num, di, m))
    }

    fn character(&self, base: u64, a: &Rational) -> Option<u64> {
        let e = self.rational_mod(a, self.q)?;
        Some(pow_mod(base, e, self.p))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse modulo a prime.
fn inv_mod(a: u64, m: u64) -> Option<u64> {
    (a % m != 0).then(|| pow_mod(a, m - 2, m))
}

impl Field for PrimeField {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_rational(&self, q: &Rational) -> Option<u64> {
        self.rational_mod(q, self.p)
    }

    fn from_i64(&self, k: i64) -> u64 {
        k.rem_euclid(self.p as i64) as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(pow_mod(*a, self.p - 2, self.p))
        }
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn magnitude(&self, a: &u64) -> Option<i64> {
        (*a != 0).then_some(0)
    }

    fn exp_const(&self, a: &Rational) -> Option<u64> {
        self.character(self.exp_base, a)
    }

    fn trig_const(&self, kind: TrigKind, b: &Rational) -> Option<u64> {
        let z = self.character(self.trig_base, b)?;
        let zi = self.inv(&z)?;
        let two_inv = self.inv(&2)?;
        match kind {
            TrigKind::Cos => Some(self.mul(&self.add(&z, &zi), &two_inv)),
            TrigKind::Sin => {
                let den = self.inv(&self.mul(&2, &self.i))?;
                Some(self.mul(&self.sub(&z, &zi), &den))
            }
        }
    }

    fn exact(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!("F_{}", self.p)
    }
}

/// Binary floating point at a fixed precision.
#[derive(Clone, Debug)]
pub struct FloatField {
    bits: usize,
}

impl FloatField {
    pub fn new(bits: usize) -> Self {
        FloatField { bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    fn ctx(&self) -> FloatCtx {
        FloatCtx::new(self.bits)
    }
}

const RM: astro_float::RoundingMode = astro_float::RoundingMode::ToEven;

impl Field for FloatField {
    type E = BigFloat;

    fn zero(&self) -> BigFloat {
        BigFloat::from_i64(0, self.bits)
    }

    fn one(&self) -> BigFloat {
        BigFloat::from_i64(1, self.bits)
    }

    fn from_rational(&self, q: &Rational) -> Option<BigFloat> {
        Some(self.ctx().rational(q))
    }

    fn from_i64(&self, k: i64) -> BigFloat {
        BigFloat::from_i64(k, self.bits)
    }

    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    fn neg(&self, a: &BigFloat) -> BigFloat {
        a.neg()
    }

    fn inv(&self, a: &BigFloat) -> Option<BigFloat> {
        if a.is_zero() {
            None
        } else {
            Some(self.one().div(a, self.bits, RM))
        }
    }

    fn is_zero(&self, a: &BigFloat) -> bool {
        a.is_zero()
    }

    fn magnitude(&self, a: &BigFloat) -> Option<i64> {
        FloatCtx::exponent(a)
    }

    fn exp_const(&self, a: &Rational) -> Option<BigFloat> {
        let mut ctx = self.ctx();
        let x = ctx.rational(a);
        Some(ctx.exp(&x))
    }

    fn trig_const(&self, kind: TrigKind, b: &Rational) -> Option<BigFloat> {
        let mut ctx = self.ctx();
        let x = ctx.rational(b);
        Some(match kind {
            TrigKind::Cos => ctx.cos(&x),
            TrigKind::Sin => ctx.sin(&x),
        })
    }

    fn exact(&self) -> bool {
        false
    }

    fn threshold_bits(&self) -> i64 {
        // relative pivot threshold 1e-30
        100
    }

    fn describe(&self) -> String {
        format!("float{}", self.bits)
    }
}

/// Rank and nullspace by Gaussian elimination with partial pivoting.
///
/// Returns a basis of `{x : M x = 0}` for the `rows × cols` matrix `m`.
pub fn nullspace<F: Field>(f: &F, mut m: Vec<Vec<F::E>>, cols: usize) -> Vec<Vec<F::E>> {
    let rows = m.len();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .filter_map(|x| f.magnitude(x))
        .max()
        .unwrap_or(0);
    let cutoff = scale - f.threshold_bits();
    let negligible = |x: &F::E| match f.magnitude(x) {
        None => true,
        Some(e) => !f.exact() && e < cutoff,
    };
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !negligible(&m[i][c]))
            .max_by_key(|&i| f.magnitude(&m[i][c]).unwrap_or(i64::MIN));
        let Some(best) = best else { continue };
        m.swap(r, best);
        let inv = f.inv(&m[r][c]).expect("nonzero pivot");
        let pivot_row: Vec<F::E> = m[r].iter().map(|x| f.mul(x, &inv)).collect();
        m[r] = pivot_row;
        for i in 0..rows {
            if i != r && !f.is_zero(&m[i][c]) {
                let factor = m[i][c].clone();
                for j in c..cols {
                    if !f.is_zero(&m[r][j]) {
                        let t = f.mul(&factor, &m[r][j]);
                        m[i][j] = f.sub(&m[i][j], &t);
                    }
                }
                m[i][c] = f.zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (k, &pc) in pivots.iter().enumerate() {
            if !negligible(&m[k][free]) {
                v[pc] = f.neg(&m[k][free]);
            }
        }
        basis.push(v);
    }
    basis
}

/// Rank of a matrix.
pub fn rank<F: Field>(f: &F, m: Vec<Vec<F::E>>, cols: usize) -> usize {
    cols - nullspace(f, m, cols).len()
}

pub fn random_seeded(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    #[test]
    fn prime_field_characters_are_homomorphisms() {
        let mut rng = random_seeded(7);
        let f = PrimeField::new(0, &mut rng);
        let a = f.exp_const(&rat(1, 3)).unwrap();
        let b = f.exp_const(&rat(2, 3)).unwrap();
        assert_eq!(f.mul(&a, &b), f.exp_const(&rat(1, 1)).unwrap());
        let c = f.trig_const(TrigKind::Cos, &rat(2, 5)).unwrap();
        let s = f.trig_const(TrigKind::Sin, &rat(2, 5)).unwrap();
        assert_eq!(f.add(&f.mul(&c, &c), &f.mul(&s, &s)), 1);
        let s2 = f.trig_const(TrigKind::Sin, &rat(4, 5)).unwrap();
        assert_eq!(s2, f.mul(&2, &f.mul(&s, &c)));
        assert_eq!(f.mul(&f.i, &f.i), f.p - 1);
    }

    #[test]
    fn nullspace_of_rank_one_matrix() {
        let mut rng = random_seeded(1);
        let f = PrimeField::new(1, &mut rng);
        let m = vec![vec![1, 2, 3], vec![2, 4, 6]];
        assert_eq!(nullspace(&f, m, 3).len(), 2);
        let g = FloatField::new(128);
        let m = vec![
            vec![g.from_i64(1), g.from_i64(2)],
            vec![g.from_rational(&rat(1, 3)).unwrap(), g.from_rational(&rat(2, 3)).unwrap()],
        ];
        assert_eq!(rank(&g, m, 2), 1);
    }
}
