//! Truncated multivariate Taylor series of expressions at a point.

use std::collections::HashMap;

use crate::expr::{Expression, LinearForm, Monomial, RatExpr, Rational, Signature, TrigKind};

use super::field::Field;

pub type MultiIndex = Vec<u8>;

/// All multi-indices of total degree `≤ dmax` in graded order, with the
/// addition table needed for series products.
#[derive(Debug)]
pub struct MultiIndexSet {
    n: usize,
    dmax: usize,
    list: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    degree_start: Vec<usize>,
    /// For each index `γ`, all `(a, b)` with `a + b = γ`.
    splits: Vec<Vec<(u32, u32)>>,
}

impl MultiIndexSet {
    pub fn new(n: usize, dmax: usize) -> Self {
        let mut list: Vec<MultiIndex> = Vec::new();
        let mut degree_start = Vec::with_capacity(dmax + 2);
        for d in 0..=dmax {
            degree_start.push(list.len());
            let mut cur = vec![0u8; n];
            compositions(n, d, 0, &mut cur, &mut list);
        }
        degree_start.push(list.len());
        let lookup: HashMap<MultiIndex, usize> = list.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let mut splits = vec![Vec::new(); list.len()];
        for (ia, a) in list.iter().enumerate() {
            let da: usize = a.iter().map(|&x| x as usize).sum();
            for ib in 0..degree_start[dmax - da + 1] {
                let b = &list[ib];
                let s: MultiIndex = a.iter().zip(b).map(|(x, y)| x + y).collect();
                splits[lookup[&s]].push((ia as u32, ib as u32));
            }
        }
        MultiIndexSet {
            n,
            dmax,
            list,
            lookup,
            degree_start,
            splits,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dmax(&self) -> usize {
        self.dmax
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.list[i]
    }

    pub fn index(&self, a: &[u8]) -> Option<usize> {
        self.lookup.get(a).copied()
    }

    /// Index range of the multi-indices of degree exactly `d`.
    pub fn of_degree(&self, d: usize) -> std::ops::Range<usize> {
        if d > self.dmax {
            return 0..0;
        }
        self.degree_start[d]..self.degree_start[d + 1]
    }

    /// Number of indices of degree `≤ d`.
    pub fn count_upto(&self, d: usize) -> usize {
        self.degree_start[d.min(self.dmax) + 1]
    }

    pub fn splits(&self, i: usize) -> &[(u32, u32)] {
        &self.splits[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.list[i].iter().map(|&x| x as usize).sum()
    }
}

fn compositions(n: usize, d: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
    if pos == n - 1 {
        cur[pos] = d as u8;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for k in (0..=d).rev() {
        cur[pos] = k as u8;
        compositions(n, d - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

pub fn multi_factorial(a: &[u8]) -> u64 {
    a.iter().map(|&k| (1..=k as u64).product::<u64>()).product()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("a denominator vanishes at the expansion point")]
    PoleAtPoint,
    #[error("a constant has no image in the working field")]
    Unrepresentable,
}

/// Taylor expansions at a fixed point, truncated at total degree `dmax`.
pub struct SeriesCtx<'a, F: Field> {
    field: &'a F,
    set: &'a MultiIndexSet,
    point: Vec<Rational>,
    point_f: Vec<F::E>,
    inv_fact: Vec<F::E>,
    expr_cache: HashMap<Expression, Vec<F::E>>,
    inv_cache: HashMap<Expression, Vec<F::E>>,
    rat_cache: HashMap<RatExpr, Vec<F::E>>,
}

impl<'a, F: Field> SeriesCtx<'a, F> {
    pub fn new(field: &'a F, set: &'a MultiIndexSet, point: &[Rational]) -> Result<Self, SeriesError> {
        let point_f = point
            .iter()
            .map(|q| field.from_rational(q).ok_or(SeriesError::Unrepresentable))
            .collect::<Result<Vec<_>, _>>()?;
        let mut inv_fact = vec![field.one()];
        for k in 1..=set.dmax() {
            let prev = inv_fact[k - 1].clone();
            let inv_k = field.inv(&field.from_i64(k as i64)).ok_or(SeriesError::Unrepresentable)?;
            inv_fact.push(field.mul(&prev, &inv_k));
        }
        Ok(SeriesCtx {
            field,
            set,
            point: point.to_vec(),
            point_f,
            inv_fact,
            expr_cache: HashMap::new(),
            inv_cache: HashMap::new(),
            rat_cache: HashMap::new(),
        })
    }

    pub fn field(&self) -> &F {
        self.field
    }

    pub fn set(&self) -> &MultiIndexSet {
        self.set
    }

    fn zeros(&self) -> Vec<F::E> {
        vec![self.field.zero(); self.set.len()]
    }

    pub fn mul(&self, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
        let f = self.field;
        let mut out = self.zeros();
        let a_nz: Vec<bool> = a.iter().map(|x| !f.is_zero(x)).collect();
        for (g, slot) in out.iter_mut().enumerate() {
            let mut acc = f.zero();
            for &(i, j) in self.set.splits(g) {
                if a_nz[i as usize] && !f.is_zero(&b[j as usize]) {
                    acc = f.add(&acc, &f.mul(&a[i as usize], &b[j as usize]));
                }
            }
            *slot = acc;
        }
        out
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse(&self, a: &[F::E]) -> Result<Vec<F::E>, SeriesError> {
        let f = self.field;
        let a0inv = f.inv(&a[0]).ok_or(SeriesError::PoleAtPoint)?;
        let mut b = self.zeros();
        b[0] = a0inv.clone();
        for g in 1..self.set.len() {
            let mut acc = f.zero();
            for &(i, j) in self.set.splits(g) {
                // a_i · b_j with j ≠ g
                if i != 0 && !f.is_zero(&a[i as usize]) && !f.is_zero(&b[j as usize]) {
                    acc = f.add(&acc, &f.mul(&a[i as usize], &b[j as usize]));
                }
            }
            b[g] = f.neg(&f.mul(&acc, &a0inv));
        }
        Ok(b)
    }

    /// `Π (p_i + t_i)^{e_i}` expanded directly.
    fn monomial(&self, m: &Monomial) -> Vec<F::E> {
        let f = self.field;
        let mut out = self.zeros();
        'outer: for (g, slot) in out.iter_mut().enumerate() {
            let a = self.set.get(g);
            let mut v = f.one();
            for (i, &ai) in a.iter().enumerate() {
                let e = m.exponent(i);
                if ai as u32 > e {
                    continue 'outer;
                }
                if ai == 0 && e == 0 {
                    continue;
                }
                let binom = binomial(e as u64, ai as u64);
                let pw = pow(f, &self.point_f[i], (e - ai as u32) as u64);
                v = f.mul(&v, &f.mul(&f.from_i64(binom as i64), &pw));
            }
            *slot = v;
        }
        out
    }

    /// Coefficients `Π a_i^{α_i}/α_i!` of `exp(Σ a_i t_i)`.
    fn exp_shape(&self, l: &LinearForm) -> Result<Vec<F::E>, SeriesError> {
        let f = self.field;
        let a: Vec<F::E> = (0..self.set.n())
            .map(|i| f.from_rational(&l.coeff(i)).ok_or(SeriesError::Unrepresentable))
            .collect::<Result<_, _>>()?;
        Ok((0..self.set.len())
            .map(|g| {
                let idx = self.set.get(g);
                let mut v = f.one();
                for (i, &k) in idx.iter().enumerate() {
                    if k > 0 {
                        v = f.mul(&v, &f.mul(&pow(f, &a[i], k as u64), &self.inv_fact[k as usize]));
                    }
                }
                v
            })
            .collect())
    }

    fn signature(&self, sig: &Signature) -> Result<Vec<F::E>, SeriesError> {
        let f = self.field;
        let mut s = self.monomial(&sig.mono);
        if let Some(l) = &sig.exp {
            let c = f.exp_const(&l.eval(&self.point)).ok_or(SeriesError::Unrepresentable)?;
            let shape: Vec<F::E> = self.exp_shape(l)?.iter().map(|x| f.mul(x, &c)).collect();
            s = if sig.mono.is_one() { shape } else { self.mul(&s, &shape) };
        }
        if let Some(tr) = &sig.trig {
            let c = tr.arg.eval(&self.point);
            let sin = f.trig_const(TrigKind::Sin, &c).ok_or(SeriesError::Unrepresentable)?;
            let cos = f.trig_const(TrigKind::Cos, &c).ok_or(SeriesError::Unrepresentable)?;
            // k-th derivative of sin / cos at c cycles through ±sin, ±cos
            let cycle = match tr.kind {
                TrigKind::Sin => [sin.clone(), cos.clone(), f.neg(&sin), f.neg(&cos)],
                TrigKind::Cos => [cos.clone(), f.neg(&sin), f.neg(&cos), sin.clone()],
            };
            let shape: Vec<F::E> = self
                .exp_shape(&tr.arg)?
                .iter()
                .enumerate()
                .map(|(g, x)| f.mul(x, &cycle[self.set.degree(g) % 4]))
                .collect();
            s = self.mul(&s, &shape);
        }
        Ok(s)
    }

    pub fn expression(&mut self, e: &Expression) -> Result<Vec<F::E>, SeriesError> {
        if let Some(s) = self.expr_cache.get(e) {
            return Ok(s.clone());
        }
        let f = self.field;
        let mut acc = self.zeros();
        for t in e.terms() {
            let c = f.from_rational(&t.coeff).ok_or(SeriesError::Unrepresentable)?;
            let s = self.signature(&t.sig)?;
            for (a, x) in acc.iter_mut().zip(s.iter()) {
                if !f.is_zero(x) {
                    *a = f.add(a, &f.mul(&c, x));
                }
            }
        }
        self.expr_cache.insert(e.clone(), acc.clone());
        Ok(acc)
    }

    fn inverse_of(&mut self, e: &Expression) -> Result<Vec<F::E>, SeriesError> {
        if let Some(s) = self.inv_cache.get(e) {
            return Ok(s.clone());
        }
        let s = self.expression(e)?;
        let inv = self.inverse(&s)?;
        self.inv_cache.insert(e.clone(), inv.clone());
        Ok(inv)
    }

    pub fn rat(&mut self, e: &RatExpr) -> Result<Vec<F::E>, SeriesError> {
        if let Some(s) = self.rat_cache.get(e) {
            return Ok(s.clone());
        }
        let mut s = self.expression(e.num())?;
        let factors: Vec<(Expression, u32)> = e.den_factors().map(|(f, k)| (f.clone(), k)).collect();
        for (fac, k) in factors {
            let inv = self.inverse_of(&fac)?;
            for _ in 0..k {
                s = self.mul(&s, &inv);
            }
        }
        self.rat_cache.insert(e.clone(), s.clone());
        Ok(s)
    }

    /// Value at the point.
    pub fn value(&mut self, e: &RatExpr) -> Result<F::E, SeriesError> {
        let f = self.field;
        let mut v = self.constant_of(e.num())?;
        for (fac, k) in e.den_factors() {
            let d = self.constant_of(fac)?;
            let di = f.inv(&d).ok_or(SeriesError::PoleAtPoint)?;
            for _ in 0..k {
                v = f.mul(&v, &di);
            }
        }
        Ok(v)
    }

    fn constant_of(&self, e: &Expression) -> Result<F::E, SeriesError> {
        let f = self.field;
        let mut acc = f.zero();
        for t in e.terms() {
            let mut v = f.from_rational(&t.coeff).ok_or(SeriesError::Unrepresentable)?;
            for &(i, k) in t.sig.mono.pairs() {
                v = f.mul(&v, &pow(f, &self.point_f[i], k as u64));
            }
            if let Some(l) = &t.sig.exp {
                v = f.mul(&v, &f.exp_const(&l.eval(&self.point)).ok_or(SeriesError::Unrepresentable)?);
            }
            if let Some(tr) = &t.sig.trig {
                let c = tr.arg.eval(&self.point);
                v = f.mul(&v, &f.trig_const(tr.kind, &c).ok_or(SeriesError::Unrepresentable)?);
            }
            acc = f.add(&acc, &v);
        }
        Ok(acc)
    }
}

pub fn pow<F: Field>(f: &F, b: &F::E, mut e: u64) -> F::E {
    let mut acc = f.one();
    let mut base = b.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = f.mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = f.mul(&base, &base);
        }
    }
    acc
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::{parse_expr, rat};
    use crate::jet::field::{random_seeded, PrimeField};

    #[test]
    fn index_set_sizes() {
        let s = MultiIndexSet::new(3, 4);
        assert_eq!(s.len(), 35);
        assert_eq!(s.of_degree(2).len(), 6);
        let total_pairs: usize = (0..s.len()).map(|g| s.splits(g).len()).sum();
        assert_eq!(total_pairs, 210);
    }

    #[test]
    fn product_and_quotient_expansions_agree() {
        let ch = Chart::new(&["x", "y"]).unwrap();
        let mut rng = random_seeded(3);
        let f = PrimeField::new(0, &mut rng);
        let set = MultiIndexSet::new(2, 5);
        let p = [rat(1, 3), rat(-2, 7)];
        let mut ctx = SeriesCtx::new(&f, &set, &p).unwrap();
        let a = parse_expr("x*exp(2*y) + sin(x - y)", &ch).unwrap();
        let b = parse_expr("1/(1 + x^2*y)", &ch).unwrap();
        let ab = &a * &b;
        let sa = ctx.rat(&a).unwrap();
        let sb = ctx.rat(&b).unwrap();
        assert_eq!(ctx.mul(&sa, &sb), ctx.rat(&ab).unwrap());
        // derivative shifts coefficients: [t^(1,0)] of a equals ∂_x a at p
        let da = a.differentiate(0);
        assert_eq!(sa[set.index(&[1, 0]).unwrap()], ctx.value(&da).unwrap());
        let dyy = a.differentiate(1).differentiate(1);
        let half = f.inv(&2).unwrap();
        assert_eq!(sa[set.index(&[0, 2]).unwrap()], f.mul(&half, &ctx.value(&dyy).unwrap()));
    }
}
