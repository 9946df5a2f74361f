use std::collections::HashMap;

use astro_float::BigFloat;

use crate::chart::Chart;
use crate::error::GeometryError;
use crate::expr::{evaluate_at, rat, FloatCtx, RatExpr, Rational};

use super::tensor::{TensorField, Variance};

const SIGNATURE_BITS: usize = 256;

/// A pseudo-Riemannian metric `g_ij dx^i dx^j` with exact inverse and
/// determinant.
#[derive(Clone, Debug)]
pub struct MetricField {
    chart: Chart,
    g: Vec<RatExpr>,
    inv: Vec<RatExpr>,
    det: RatExpr,
    signature: (usize, usize),
    base_point: Vec<Rational>,
}

impl MetricField {
    /// Builds the metric from its full component matrix.
    pub fn new(chart: Chart, g: Vec<Vec<RatExpr>>) -> Result<Self, GeometryError> {
        let n = chart.dim();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape(format!("metric must be {n}×{n}")));
        }
        for i in 0..n {
            for j in 0..i {
                if !g[i][j].equals(&g[j][i]) {
                    return Err(GeometryError::NotSymmetric(i, j));
                }
            }
        }
        let flat: Vec<RatExpr> = g.into_iter().flatten().collect();
        let det = determinant(&flat, n);
        if det.is_zero() {
            return Err(GeometryError::Degenerate);
        }
        let inv = inverse_with_det(&flat, n, &det);
        let mut chart = chart;
        for e in flat.iter() {
            for (f, _) in e.den_factors() {
                chart = chart.with_excluded(RatExpr::from_expr(f.clone()));
            }
        }
        chart = chart.with_excluded(det.clone());
        let base_point = find_base_point(&chart, &[])
            .ok_or_else(|| GeometryError::BasePoint("no admissible rational point found".into()))?;
        let mut m = MetricField {
            chart,
            g: flat,
            inv,
            det,
            signature: (0, 0),
            base_point,
        };
        m.signature = m.signature_at(&m.base_point.clone())?;
        let perturbed = m.perturbed_point();
        if m.signature_at(&perturbed)? != m.signature {
            return Err(GeometryError::UnstableSignature);
        }
        Ok(m)
    }

    /// Diagonal metric.
    pub fn diagonal(chart: Chart, diag: Vec<RatExpr>) -> Result<Self, GeometryError> {
        let n = diag.len();
        let mut g = vec![vec![RatExpr::zero(); n]; n];
        for (i, d) in diag.into_iter().enumerate() {
            g[i][i] = d;
        }
        MetricField::new(chart, g)
    }

    /// Same metric with a different base point.
    pub fn with_base_point(mut self, p: Vec<Rational>) -> Result<Self, GeometryError> {
        if p.len() != self.dim() || !admissible(&self.chart, &p) {
            return Err(GeometryError::BasePoint("point lies on the excluded locus".into()));
        }
        self.signature = self.signature_at(&p)?;
        self.base_point = p;
        Ok(self)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn g(&self, i: usize, j: usize) -> &RatExpr {
        &self.g[i * self.dim() + j]
    }

    pub fn inv(&self, i: usize, j: usize) -> &RatExpr {
        &self.inv[i * self.dim() + j]
    }

    pub fn det(&self) -> &RatExpr {
        &self.det
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn base_point(&self) -> &[Rational] {
        &self.base_point
    }

    pub fn as_tensor(&self) -> TensorField {
        TensorField::from_fn(&self.chart, vec![Variance::Down, Variance::Down], |i| {
            self.g(i[0], i[1]).clone()
        })
    }

    pub fn inverse_tensor(&self) -> TensorField {
        TensorField::from_fn(&self.chart, vec![Variance::Up, Variance::Up], |i| {
            self.inv(i[0], i[1]).clone()
        })
    }

    fn perturbed_point(&self) -> Vec<Rational> {
        for k in 1..50i64 {
            let p: Vec<Rational> = self
                .base_point
                .iter()
                .enumerate()
                .map(|(i, x)| x + rat(k, 97 + 2 * i as i64))
                .collect();
            if admissible(&self.chart, &p) {
                return p;
            }
        }
        self.base_point.clone()
    }

    /// Inertia of `g` at `p` by symmetric elimination with 2×2 pivots.
    pub fn signature_at(&self, p: &[Rational]) -> Result<(usize, usize), GeometryError> {
        let n = self.dim();
        let mut a: Vec<BigFloat> = Vec::with_capacity(n * n);
        for e in &self.g {
            a.push(
                evaluate_at(e, p, SIGNATURE_BITS)
                    .map_err(|e| GeometryError::BasePoint(e.to_string()))?,
            );
        }
        inertia(a, n).ok_or_else(|| GeometryError::BasePoint("metric singular at the point".into()))
    }
}

/// Laplace expansion along rows with memoization over column subsets.
fn det_rows(m: &[RatExpr], n: usize, rows: &[usize], cols: u32, memo: &mut HashMap<u32, RatExpr>) -> RatExpr {
    let depth = cols.count_ones() as usize - (n - rows.len());
    if depth == rows.len() {
        return RatExpr::one();
    }
    if let Some(v) = memo.get(&cols) {
        return v.clone();
    }
    let r = rows[depth];
    let mut acc = RatExpr::zero();
    let mut sign_pos = true;
    for c in 0..n {
        if cols & (1 << c) != 0 {
            continue;
        }
        let entry = &m[r * n + c];
        if !entry.is_zero() {
            let minor = det_rows(m, n, rows, cols | (1 << c), memo);
            if !minor.is_zero() {
                let t = entry * &minor;
                acc = if sign_pos { &acc + &t } else { &acc - &t };
            }
        }
        sign_pos = !sign_pos;
    }
    memo.insert(cols, acc.clone());
    acc
}

pub fn determinant(m: &[RatExpr], n: usize) -> RatExpr {
    let rows: Vec<usize> = (0..n).collect();
    det_rows(m, n, &rows, 0, &mut HashMap::new())
}

fn inverse_with_det(m: &[RatExpr], n: usize, det: &RatExpr) -> Vec<RatExpr> {
    let mut inv = vec![RatExpr::zero(); n * n];
    for i in 0..n {
        let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
        let mut memo = HashMap::new();
        for j in 0..n {
            // cofactor C_ij: delete row i and column j
            let minor = det_rows(m, n, &rows, 1 << j, &mut memo);
            if minor.is_zero() {
                continue;
            }
            let c = if (i + j) % 2 == 0 { minor } else { -&minor };
            inv[j * n + i] = c.checked_div(det).expect("nonzero determinant");
        }
    }
    inv
}

/// Exact inverse of a square matrix of expressions.
pub fn inverse(m: &[RatExpr], n: usize) -> Option<Vec<RatExpr>> {
    let det = determinant(m, n);
    if det.is_zero() {
        return None;
    }
    Some(inverse_with_det(m, n, &det))
}

/// True when no excluded expression vanishes at `p`.
pub fn admissible(chart: &Chart, p: &[Rational]) -> bool {
    chart
        .excluded_locus()
        .iter()
        .all(|e| evaluate_at(e, p, 128).is_ok_and(|v| !v.is_zero()))
}

/// Deterministic search for a small rational point off the excluded locus
/// and off the vanishing sets of `extra`.
pub fn find_base_point(chart: &Chart, extra: &[RatExpr]) -> Option<Vec<Rational>> {
    let n = chart.dim();
    for t in 0..200i64 {
        let p: Vec<Rational> = (0..n as i64)
            .map(|i| rat(2 + ((t + 3 * i) % 7), 3 + i) + rat(t / 7, 5))
            .collect();
        if admissible(chart, &p)
            && extra
                .iter()
                .all(|e| evaluate_at(e, &p, 128).is_ok_and(|v| !v.is_zero()))
        {
            return Some(p);
        }
    }
    None
}

fn inertia(mut a: Vec<BigFloat>, n: usize) -> Option<(usize, usize)> {
    let ctx = FloatCtx::new(SIGNATURE_BITS);
    let mut alive: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg) = (0usize, 0usize);
    let tiny = |x: &BigFloat| FloatCtx::exponent(x).is_none_or(|e| e < -(SIGNATURE_BITS as i64) / 2);
    let mag = |x: &BigFloat| FloatCtx::exponent(x).unwrap_or(i64::MIN);
    while !alive.is_empty() {
        let best_diag = alive.iter().copied().max_by_key(|&i| mag(&a[i * n + i]))?;
        let mut best_off: Option<(usize, usize)> = None;
        for (x, &i) in alive.iter().enumerate() {
            for &j in &alive[x + 1..] {
                if best_off.is_none_or(|(p, q)| mag(&a[i * n + j]) > mag(&a[p * n + q])) {
                    best_off = Some((i, j));
                }
            }
        }
        let diag_ok = !tiny(&a[best_diag * n + best_diag])
            && best_off.is_none_or(|(p, q)| mag(&a[best_diag * n + best_diag]) + 2 >= mag(&a[p * n + q]));
        if diag_ok {
            let k = best_diag;
            let piv = a[k * n + k].clone();
            if piv.is_negative() {
                neg += 1;
            } else {
                pos += 1;
            }
            alive.retain(|&i| i != k);
            for &i in &alive {
                let f = ctx.div(&a[i * n + k], &piv);
                for &j in &alive {
                    let upd = ctx.mul(&f, &a[k * n + j]);
                    a[i * n + j] = ctx.sub(&a[i * n + j], &upd);
                }
            }
        } else {
            let (p, q) = best_off?;
            if tiny(&a[p * n + q]) {
                return None;
            }
            let (app, aqq, apq) = (a[p * n + p].clone(), a[q * n + q].clone(), a[p * n + q].clone());
            let det = ctx.sub(&ctx.mul(&app, &aqq), &ctx.mul(&apq, &apq));
            if det.is_negative() {
                pos += 1;
                neg += 1;
            } else if app.is_negative() {
                neg += 2;
            } else {
                pos += 2;
            }
            alive.retain(|&i| i != p && i != q);
            for &i in &alive {
                // [x y] = [a_ip a_iq] · B⁻¹
                let x = ctx.div(&ctx.sub(&ctx.mul(&a[i * n + p], &aqq), &ctx.mul(&a[i * n + q], &apq)), &det);
                let y = ctx.div(&ctx.sub(&ctx.mul(&a[i * n + q], &app), &ctx.mul(&a[i * n + p], &apq)), &det);
                for &j in &alive {
                    let upd = ctx.add(&ctx.mul(&x, &a[p * n + j]), &ctx.mul(&y, &a[q * n + j]));
                    a[i * n + j] = ctx.sub(&a[i * n + j], &upd);
                }
            }
        }
    }
    Some((pos, neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn metric(coords: &[&str], rows: &[&[&str]]) -> MetricField {
        let ch = Chart::new(coords).unwrap();
        let g = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_expr(s, &ch).unwrap()).collect())
            .collect();
        MetricField::new(ch, g).unwrap()
    }

    #[test]
    fn pp_wave_core_is_lorentzian() {
        let m = metric(&["x", "y", "z"], &[&["0", "1", "0"], &["1", "z^2", "0"], &["0", "0", "1"]]);
        assert_eq!(m.signature(), (2, 1));
        assert!(m.det().equals(&RatExpr::int(-1)));
        assert!(m.inv(0, 0).equals(&-&parse_expr("z^2", m.chart()).unwrap()));
    }

    #[test]
    fn split_signature() {
        let m = metric(
            &["x", "y", "z", "w"],
            &[
                &["0", "0", "0", "1/2"],
                &["0", "0", "1/2", "0"],
                &["0", "1/2", "0", "0"],
                &["1/2", "0", "0", "y^2"],
            ],
        );
        assert_eq!(m.signature(), (2, 2));
    }

    #[test]
    fn inverse_times_metric_is_identity() {
        let m = metric(&["x", "y"], &[&["1 + x^2", "x*y"], &["x*y", "exp(y)"]]);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = RatExpr::zero();
                for k in 0..2 {
                    acc = &acc + &(m.g(i, k) * m.inv(k, j));
                }
                let expected = if i == j { RatExpr::one() } else { RatExpr::zero() };
                assert!(acc.equals(&expected), "({i},{j}) = {acc}");
            }
        }
    }

    #[test]
    fn degenerate_metric_rejected() {
        let ch = Chart::new(&["x", "y"]).unwrap();
        let g = vec![vec![RatExpr::var(0), RatExpr::var(0)], vec![RatExpr::var(0), RatExpr::var(0)]];
        assert!(matches!(MetricField::new(ch, g), Err(GeometryError::Degenerate)));
    }
}
