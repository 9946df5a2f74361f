//! Prolongation and pointwise rank counting.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::expr::{rat, Rational};
use crate::geometry::admissible;

use super::field::{nullspace, random_seeded, Field, FloatField, PrimeField};
use super::series::{MultiIndexSet, SeriesCtx, SeriesError};
use super::system::LinearPdeSystem;
use super::JetError;

/// Arithmetic used for rank decisions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Backend {
    /// Exact arithmetic modulo word-sized primes, one run per prime.
    Modular { primes: usize },
    /// Binary floating point, one run per precision.
    Float { bits: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct JetOptions {
    /// Number of random evaluation points.
    pub points: usize,
    /// Prolongation orders allowed beyond the system order.
    pub max_order: usize,
    pub backend: Backend,
    pub seed: u64,
    /// Used before any random point.
    pub fixed_points: Vec<Vec<Rational>>,
}

impl Default for JetOptions {
    fn default() -> Self {
        JetOptions {
            points: 2,
            max_order: 6,
            backend: Backend::Modular { primes: 2 },
            seed: 0,
            fixed_points: Vec::new(),
        }
    }
}

/// Outcome at one point with one arithmetic.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    #[serde(serialize_with = "ser_point")]
    pub point: Vec<Rational>,
    pub arithmetic: String,
    /// `d_k` for `k = 0, 1, ...` (jets up to weight `order + k`).
    pub d_sequence: Vec<usize>,
    /// Free jets introduced at each weight `0, 1, ...`.
    pub symbol_dims: Vec<usize>,
    pub stabilized: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct JetRankReport {
    pub d_sequence: Vec<usize>,
    pub stabilized_dim: usize,
    pub orders_used: usize,
    #[serde(serialize_with = "ser_points")]
    pub points: Vec<Vec<Rational>>,
    pub precision_bits: usize,
    pub backend: Backend,
    pub confident: bool,
    pub runs: Vec<RunRecord>,
}

fn ser_point<S: serde::Serializer>(p: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(crate::expr::fmt_rational))
}

fn ser_points<S: serde::Serializer>(p: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(|q| q.iter().map(crate::expr::fmt_rational).collect::<Vec<_>>()))
}

type SparseRow<E> = (Vec<(u32, E)>, Vec<E>);

struct Engine<'a, F: Field> {
    sys: &'a LinearPdeSystem,
    field: &'a F,
    set: &'a MultiIndexSet,
    coeffs: Vec<Vec<Vec<F::E>>>,
    deriv_idx: Vec<Vec<usize>>,
}

impl<'a, F: Field> Engine<'a, F> {
    fn new(
        sys: &'a LinearPdeSystem,
        field: &'a F,
        set: &'a MultiIndexSet,
        point: &[Rational],
    ) -> Result<Self, SeriesError> {
        let mut ctx = SeriesCtx::new(field, set, point)?;
        let mut coeffs = Vec::with_capacity(sys.equations.len());
        let mut deriv_idx = Vec::with_capacity(sys.equations.len());
        for e in &sys.equations {
            let mut cs = Vec::with_capacity(e.terms.len());
            let mut ds = Vec::with_capacity(e.terms.len());
            for t in &e.terms {
                cs.push(ctx.rat(&t.coeff)?);
                ds.push(set.index(&t.deriv).expect("derivative within truncation"));
            }
            coeffs.push(cs);
            deriv_idx.push(ds);
        }
        Ok(Engine {
            sys,
            field,
            set,
            coeffs,
            deriv_idx,
        })
    }

    /// Visits the entries of `[t^γ]` of equation `e` as `(unknown, jet index, weight, value)`.
    fn row_entries(&self, e: usize, gamma: usize, mut sink: impl FnMut(usize, usize, usize, F::E)) {
        let f = self.field;
        let eq = &self.sys.equations[e];
        for (t, term) in eq.terms.iter().enumerate() {
            let s = &self.coeffs[e][t];
            let beta = self.set.get(self.deriv_idx[e][t]);
            let shift = self.sys.unknowns[term.unknown].shift;
            for &(a, b) in self.set.splits(gamma) {
                let c = &s[a as usize];
                if f.is_zero(c) {
                    continue;
                }
                let delta = self.set.get(b as usize);
                let jet: Vec<u8> = beta.iter().zip(delta).map(|(x, y)| x + y).collect();
                let mut factor: u64 = 1;
                for (&bi, &di) in beta.iter().zip(delta) {
                    for r in (di as u64 + 1)..=(bi as u64 + di as u64) {
                        factor *= r;
                    }
                }
                let level = jet.iter().map(|&k| k as usize).sum::<usize>() + shift;
                let idx = self.set.index(&jet).expect("jet within truncation");
                let v = if factor == 1 { c.clone() } else { f.mul(c, &f.from_i64(factor as i64)) };
                sink(term.unknown, idx, level, v);
            }
        }
    }

    fn row_specs(&self, level: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (e, eq) in self.sys.equations.iter().enumerate() {
            if eq.weight <= level {
                for g in self.set.of_degree(level - eq.weight) {
                    out.push((e, g));
                }
            }
        }
        out
    }

    fn new_jets(&self, level: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, unk) in self.sys.unknowns.iter().enumerate() {
            if unk.shift <= level {
                for idx in self.set.of_degree(level - unk.shift) {
                    out.push((u, idx));
                }
            }
        }
        out
    }

    fn run(&self, max_level: usize) -> (Vec<usize>, Vec<usize>, Option<usize>) {
        let f = self.field;
        let order = self.sys.order;
        let mut reps: HashMap<(usize, usize), Vec<F::E>> = HashMap::new();
        let mut d = 0usize;
        let mut dims = Vec::new();
        let mut free_dims = Vec::new();
        let mut stabilized = None;
        for m in 0..=max_level {
            let cols = self.new_jets(m);
            let col_of: HashMap<(usize, usize), u32> =
                cols.iter().enumerate().map(|(c, &j)| (j, c as u32)).collect();
            let specs = self.row_specs(m);
            let rows: Vec<SparseRow<F::E>> = specs
                .par_iter()
                .filter_map(|&(e, g)| {
                    let mut sparse: HashMap<u32, F::E> = HashMap::new();
                    let mut tail = vec![f.zero(); d];
                    self.row_entries(e, g, |u, idx, level, v| {
                        if level == m {
                            let slot = sparse.entry(col_of[&(u, idx)]).or_insert_with(|| f.zero());
                            *slot = f.add(slot, &v);
                        } else {
                            let rep = &reps[&(u, idx)];
                            for (t, r) in tail.iter_mut().zip(rep) {
                                if !f.is_zero(r) {
                                    *t = f.add(t, &f.mul(&v, r));
                                }
                            }
                        }
                    });
                    let mut sparse: Vec<(u32, F::E)> = sparse.into_iter().filter(|(_, v)| !f.is_zero(v)).collect();
                    sparse.sort_by_key(|(c, _)| *c);
                    (!sparse.is_empty() || tail.iter().any(|x| !f.is_zero(x))).then_some((sparse, tail))
                })
                .collect();
            let sol = if f.exact() {
                sparse_solve(f, rows, cols.len(), d)
            } else {
                dense_solve(f, rows, cols.len(), d)
            };
            for rep in reps.values_mut() {
                *rep = sol.rebase(f, rep);
            }
            for (c, jet) in cols.into_iter().enumerate() {
                reps.insert(jet, sol.new_reps[c].clone());
            }
            d = sol.dim;
            free_dims.push(sol.free);
            dims.push(d);
            if m >= order + 2 {
                let k = dims.len();
                if free_dims[k - 1] == 0
                    && free_dims[k - 2] == 0
                    && dims[k - 1] == dims[k - 2]
                    && dims[k - 2] == dims[k - 3]
                {
                    stabilized = Some(d);
                    break;
                }
            }
        }
        let d_sequence = dims.get(order..).map(|s| s.to_vec()).unwrap_or_default();
        (d_sequence, free_dims, stabilized)
    }
}

/// Result of one elimination step: new parameters are the free new jets
/// followed by a basis of the surviving old parameters.
struct StepSolution<E> {
    dim: usize,
    free: usize,
    /// Surviving old-parameter directions, each of length `d_old`.
    kernel: Option<Vec<Vec<E>>>,
    new_reps: Vec<Vec<E>>,
}

impl<E: Clone> StepSolution<E> {
    fn rebase<F: Field<E = E>>(&self, f: &F, rep: &[E]) -> Vec<E> {
        let mut out = vec![f.zero(); self.free];
        match &self.kernel {
            None => out.extend(rep.iter().cloned()),
            Some(k) => out.extend(k.iter().map(|col| {
                let mut acc = f.zero();
                for (a, b) in rep.iter().zip(col) {
                    if !f.is_zero(a) && !f.is_zero(b) {
                        acc = f.add(&acc, &f.mul(a, b));
                    }
                }
                acc
            })),
        }
        out
    }
}

fn sub_scaled<F: Field>(f: &F, row: &SparseRow<F::E>, k: &F::E, pivot: &SparseRow<F::E>) -> SparseRow<F::E> {
    let (a, b) = (&row.0, &pivot.0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, f.neg(&f.mul(k, &b[j].1))));
            j += 1;
        } else {
            let v = f.sub(&a[i].1, &f.mul(k, &b[j].1));
            if !f.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    let tail = row
        .1
        .iter()
        .zip(&pivot.1)
        .map(|(x, y)| if f.is_zero(y) { x.clone() } else { f.sub(x, &f.mul(k, y)) })
        .collect();
    (out, tail)
}

fn sparse_solve<F: Field>(f: &F, rows: Vec<SparseRow<F::E>>, ncols: usize, d: usize) -> StepSolution<F::E> {
    let mut pivots: Vec<Option<SparseRow<F::E>>> = vec![None; ncols];
    let mut tails: Vec<Vec<F::E>> = Vec::new();
    for mut row in rows {
        loop {
            let Some((c, v)) = row.0.first().cloned() else {
                if row.1.iter().any(|x| !f.is_zero(x)) {
                    tails.push(row.1);
                }
                break;
            };
            match &pivots[c as usize] {
                Some(p) => row = sub_scaled(f, &row, &v, p),
                None => {
                    let inv = f.inv(&v).expect("nonzero pivot");
                    let scale = |x: &F::E| f.mul(x, &inv);
                    let sparse = row.0.iter().map(|(c, x)| (*c, scale(x))).collect();
                    let tail = row.1.iter().map(scale).collect();
                    pivots[c as usize] = Some((sparse, tail));
                    break;
                }
            }
        }
    }
    let free_cols: Vec<usize> = (0..ncols).filter(|&c| pivots[c].is_none()).collect();
    let nfree = free_cols.len();
    let mut free_pos = vec![usize::MAX; ncols];
    for (k, &c) in free_cols.iter().enumerate() {
        free_pos[c] = k;
    }
    // each x_c over (free jets, old params)
    let width = nfree + d;
    let mut x: Vec<Vec<F::E>> = vec![Vec::new(); ncols];
    for c in (0..ncols).rev() {
        let mut v = vec![f.zero(); width];
        match &pivots[c] {
            None => v[free_pos[c]] = f.one(),
            Some((sparse, tail)) => {
                for (c2, r) in &sparse[1..] {
                    for (acc, xv) in v.iter_mut().zip(&x[*c2 as usize]) {
                        if !f.is_zero(xv) {
                            *acc = f.sub(acc, &f.mul(r, xv));
                        }
                    }
                }
                for (acc, t) in v[nfree..].iter_mut().zip(tail) {
                    if !f.is_zero(t) {
                        *acc = f.sub(acc, t);
                    }
                }
            }
        }
        x[c] = v;
    }
    finish(f, x, tails, nfree, d)
}

fn finish<F: Field>(
    f: &F,
    x: Vec<Vec<F::E>>,
    tails: Vec<Vec<F::E>>,
    nfree: usize,
    d: usize,
) -> StepSolution<F::E> {
    if tails.is_empty() {
        return StepSolution {
            dim: nfree + d,
            free: nfree,
            kernel: None,
            new_reps: x,
        };
    }
    let kernel = nullspace(f, tails, d);
    let dummy = StepSolution {
        dim: nfree + kernel.len(),
        free: nfree,
        kernel: Some(kernel),
        new_reps: Vec::new(),
    };
    let new_reps = x
        .iter()
        .map(|v| {
            let mut out = v[..nfree].to_vec();
            out.extend(dummy.rebase(f, &v[nfree..]).into_iter().skip(nfree));
            out
        })
        .collect();
    StepSolution { new_reps, ..dummy }
}

fn dense_solve<F: Field>(f: &F, rows: Vec<SparseRow<F::E>>, ncols: usize, d: usize) -> StepSolution<F::E> {
    let width = ncols + d;
    let m: Vec<Vec<F::E>> = rows
        .into_iter()
        .map(|(sparse, tail)| {
            let mut r = vec![f.zero(); ncols];
            for (c, v) in sparse {
                r[c as usize] = v;
            }
            r.extend(tail);
            r
        })
        .collect();
    let symbol: Vec<Vec<F::E>> = m.iter().map(|r| r[..ncols].to_vec()).collect();
    let free = nullspace(f, symbol, ncols).len();
    let basis = nullspace(f, m, width);
    let new_reps = (0..ncols).map(|c| basis.iter().map(|b| b[c].clone()).collect()).collect();
    let kernel: Vec<Vec<F::E>> = basis.iter().map(|b| b[ncols..].to_vec()).collect();
    StepSolution {
        dim: basis.len(),
        free: 0,
        kernel: Some(kernel),
        new_reps,
    }
    .with_symbol_dim(free)
}

impl<E> StepSolution<E> {
    fn with_symbol_dim(mut self, free: usize) -> Self {
        self.free = free;
        self
    }
}

/// Explicit constraint matrix of the system prolonged `k` times at one point.
#[derive(Clone, Debug)]
pub struct ConstraintMatrix<E> {
    /// Column labels `(unknown, multi-index)`.
    pub columns: Vec<(usize, Vec<u8>)>,
    pub rows: Vec<Vec<E>>,
}

pub fn prolong_to_order<F: Field>(
    sys: &LinearPdeSystem,
    k: usize,
    point: &[Rational],
    field: &F,
) -> Result<ConstraintMatrix<F::E>, JetError> {
    let top = sys.order + k;
    let set = MultiIndexSet::new(sys.dim(), top);
    let engine = Engine::new(sys, field, &set, point).map_err(|_| JetError::ExcludedPoint)?;
    let mut columns = Vec::new();
    let mut col_of = HashMap::new();
    for level in 0..=top {
        for jet in engine.new_jets(level) {
            col_of.insert(jet, columns.len());
            columns.push((jet.0, set.get(jet.1).clone()));
        }
    }
    let mut rows = Vec::new();
    for level in 0..=top {
        for (e, g) in engine.row_specs(level) {
            let mut r = vec![field.zero(); columns.len()];
            engine.row_entries(e, g, |u, idx, _, v| {
                let c = col_of[&(u, idx)];
                r[c] = field.add(&r[c], &v);
            });
            rows.push(r);
        }
    }
    Ok(ConstraintMatrix { columns, rows })
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| {
            let num: i64 = rng.gen_range(-40..=40);
            let den: i64 = rng.gen_range(1..=40);
            rat(num, den)
        })
        .collect()
}

enum Arith {
    Prime(usize),
    Float(usize),
}

fn run_once(
    sys: &LinearPdeSystem,
    arith: &Arith,
    candidates: &[Vec<Rational>],
    seed: u64,
    max_level: usize,
) -> Option<RunRecord> {
    let set = MultiIndexSet::new(sys.dim(), max_level);
    let mut rng = random_seeded(seed);
    match arith {
        Arith::Prime(which) => {
            let field = PrimeField::new(*which, &mut rng);
            run_with(sys, &field, &set, candidates, max_level)
        }
        Arith::Float(bits) => {
            let field = FloatField::new(*bits);
            run_with(sys, &field, &set, candidates, max_level)
        }
    }
}

fn run_with<F: Field>(
    sys: &LinearPdeSystem,
    field: &F,
    set: &MultiIndexSet,
    candidates: &[Vec<Rational>],
    max_level: usize,
) -> Option<RunRecord> {
    for p in candidates {
        let Ok(engine) = Engine::new(sys, field, set, p) else { continue };
        let (d_sequence, symbol_dims, stabilized) = engine.run(max_level);
        return Some(RunRecord {
            point: p.clone(),
            arithmetic: field.describe(),
            d_sequence,
            symbol_dims,
            stabilized,
        });
    }
    None
}

/// Dimension of the solution space at generic points.
pub fn solution_dimension(sys: &LinearPdeSystem, opts: &JetOptions) -> Result<JetRankReport, JetError> {
    let n = sys.dim();
    let chart = &sys.chart;
    let mut rng = random_seeded(opts.seed);
    let wanted = opts.points.max(1);
    // candidate lists per point: the chosen point first, then spares
    let mut admissible_pts: Vec<Vec<Rational>> = opts
        .fixed_points
        .iter()
        .filter(|p| p.len() == n && admissible(chart, p))
        .cloned()
        .collect();
    let mut tries = 0;
    while admissible_pts.len() < wanted + 8 && tries < 2000 {
        tries += 1;
        let p = random_point(&mut rng, n);
        if admissible(chart, &p) {
            admissible_pts.push(p);
        }
    }
    if admissible_pts.is_empty() {
        return Err(JetError::NoAdmissiblePoint);
    }
    let ariths: Vec<Arith> = match &opts.backend {
        Backend::Modular { primes } => (0..(*primes).max(1)).map(Arith::Prime).collect(),
        Backend::Float { bits } => bits.iter().map(|&b| Arith::Float(b)).collect(),
    };
    let mut configs = Vec::new();
    for p in 0..wanted.min(admissible_pts.len()) {
        for (a, arith) in ariths.iter().enumerate() {
            let mut cands = vec![admissible_pts[p].clone()];
            cands.extend(admissible_pts.iter().skip(wanted).cloned());
            configs.push((arith, cands, opts.seed.wrapping_mul(1_000_003).wrapping_add((p * 16 + a) as u64)));
        }
    }
    let max_level = sys.order + opts.max_order;
    let runs: Vec<RunRecord> = configs
        .par_iter()
        .filter_map(|(arith, cands, seed)| run_once(sys, arith, cands, *seed, max_level))
        .collect();
    if runs.is_empty() {
        return Err(JetError::NoAdmissiblePoint);
    }
    let best = runs.iter().filter(|r| r.stabilized.is_some()).min_by_key(|r| r.stabilized);
    let Some(best) = best else {
        return Err(JetError::NoStabilization {
            kind: sys.kind,
            d_sequence: runs[0].d_sequence.clone(),
        });
    };
    let stabilized_dim = best.stabilized.expect("stabilized");
    let distinct_points = {
        let mut ps: Vec<&Vec<Rational>> = runs.iter().map(|r| &r.point).collect();
        ps.dedup();
        ps.len()
    };
    let confident = distinct_points >= 2 && runs.iter().all(|r| r.stabilized == Some(stabilized_dim));
    let mut points: Vec<Vec<Rational>> = Vec::new();
    for r in &runs {
        if !points.contains(&r.point) {
            points.push(r.point.clone());
        }
    }
    let precision_bits = match &opts.backend {
        Backend::Modular { .. } => 31,
        Backend::Float { bits } => bits.iter().copied().min().unwrap_or(0),
    };
    Ok(JetRankReport {
        d_sequence: best.d_sequence.clone(),
        stabilized_dim,
        orders_used: runs.iter().map(|r| r.d_sequence.len()).max().unwrap_or(0).saturating_sub(1),
        points,
        precision_bits,
        backend: opts.backend.clone(),
        confident,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::RatExpr;
    use crate::geometry::MetricField;
    use crate::jet::field::rank;
    use crate::jet::system::{build_system, Geometry, SystemKind};

    fn flat(n: usize) -> MetricField {
        let names: Vec<String> = (0..n).map(|i| format!("x{}", i + 1)).collect();
        MetricField::diagonal(Chart::new(&names).unwrap(), vec![RatExpr::one(); n]).unwrap()
    }

    #[test]
    fn explicit_prolongation_of_flat_killing() {
        let g = flat(2);
        let sys = build_system(SystemKind::Killing, Geometry::Metric(&g)).unwrap();
        let f = PrimeField::new(0, &mut random_seeded(0));
        let m = prolong_to_order(&sys, 0, &[rat(1, 2), rat(1, 3)], &f).unwrap();
        assert_eq!(m.columns.len(), 6);
        assert_eq!(m.rows.len(), 3);
        let m = prolong_to_order(&sys, 1, &[rat(1, 2), rat(1, 3)], &f).unwrap();
        assert_eq!(m.columns.len(), 12);
        assert_eq!(12 - rank(&f, m.rows, 12), 3);
        let sys = build_system(SystemKind::Mobility, Geometry::Metric(&g)).unwrap();
        let m = prolong_to_order(&sys, 1, &[rat(1, 2), rat(1, 3)], &f).unwrap();
        let cols = m.columns.len();
        assert_eq!(cols - rank(&f, m.rows, cols), 6);
    }

    #[test]
    fn flat_counts() {
        let g = flat(3);
        let opts = JetOptions::default();
        let dim = |k| {
            let sys = build_system(k, Geometry::Metric(&g)).unwrap();
            solution_dimension(&sys, &opts).unwrap()
        };
        let r = dim(SystemKind::Killing);
        assert_eq!(r.stabilized_dim, 6);
        assert!(r.confident);
        assert_eq!(dim(SystemKind::Homothety).stabilized_dim, 7);
        assert_eq!(dim(SystemKind::Conformal).stabilized_dim, 10);
        assert_eq!(dim(SystemKind::Affine).stabilized_dim, 12);
        assert_eq!(dim(SystemKind::Projective).stabilized_dim, 15);
        assert_eq!(dim(SystemKind::Mobility).stabilized_dim, 10);
    }

    #[test]
    fn float_backend_agrees_on_small_system() {
        let g = flat(2);
        let sys = build_system(SystemKind::Projective, Geometry::Metric(&g)).unwrap();
        let opts = JetOptions {
            backend: Backend::Float { bits: vec![256, 512] },
            max_order: 4,
            ..JetOptions::default()
        };
        let r = solution_dimension(&sys, &opts).unwrap();
        assert_eq!(r.stabilized_dim, 8);
        assert!(r.confident);
    }
}
