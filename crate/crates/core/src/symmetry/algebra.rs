//! Independence, closure and structure constants of a set of vector fields.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::GeometryError;
use crate::expr::{rat, Expression, RatExpr, Rational, Signature};
use crate::geometry::admissible;
use crate::jet::field::{rank, random_seeded, Field, PrimeField};
use crate::jet::series::{MultiIndexSet, SeriesCtx};
use crate::jet::Geometry;

use super::{bracket, classify_connection_field, classify_field, FieldKind, VectorFieldExpr};

/// Which classification every input field must pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AlgebraMode {
    Projective,
    Affine,
    Unchecked,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureConstantsTable {
    /// Size of the basis the constants refer to.
    pub m: usize,
    /// Positions (in the input list) of the basis fields.
    pub basis: Vec<usize>,
    /// `constants[i][j][k] = c^k_ij` with `[e_i, e_j] = c^k_ij e_k`.
    #[serde(serialize_with = "ser_constants")]
    pub constants: Vec<Vec<Vec<Rational>>>,
    pub closure_ok: bool,
    pub jacobi_ok: bool,
    pub independent_dim: usize,
    /// Rank of pointwise evaluations.
    pub numeric_rank: usize,
    pub symbolic_confirmed: bool,
    /// Three-dimensional with nondegenerate indefinite Killing form.
    pub is_sl2: bool,
    /// Pairs whose bracket left the span.
    pub failures: Vec<(usize, usize)>,
}

fn ser_constants<S: serde::Serializer>(c: &[Vec<Vec<Rational>>], s: S) -> Result<S::Ok, S::Error> {
    let strs: Vec<Vec<Vec<String>>> = c
        .iter()
        .map(|a| a.iter().map(|b| b.iter().map(crate::expr::fmt_rational).collect()).collect())
        .collect();
    strs.serialize(s)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("no fields supplied")]
    Empty,
    #[error("field {index} classifies as {kind}, not as required")]
    Classification { index: usize, kind: FieldKind },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub fn algebra_check(
    fields: &[VectorFieldExpr],
    geom: Geometry<'_>,
    mode: AlgebraMode,
) -> Result<StructureConstantsTable, AlgebraError> {
    if fields.is_empty() {
        return Err(AlgebraError::Empty);
    }
    if mode != AlgebraMode::Unchecked {
        for (index, v) in fields.iter().enumerate() {
            let kind = match geom {
                Geometry::Metric(g) => classify_field(v, g)?.kind,
                Geometry::Connection(c) => classify_connection_field(v, c)?.kind,
            };
            let ok = match mode {
                AlgebraMode::Projective => kind.is_projective(),
                AlgebraMode::Affine => kind.is_affine(),
                AlgebraMode::Unchecked => true,
            };
            if !ok {
                return Err(AlgebraError::Classification { index, kind });
            }
        }
    }
    let m = fields.len();
    let numeric_rank = numeric_rank(fields);
    // exact coefficient vectors over a common denominator
    let symbolic = numeric_rank < m || m <= 6;
    let vectors_of = |vs: &[&VectorFieldExpr]| -> Vec<BTreeMap<(usize, Signature), Rational>> {
        let mut common = BTreeMap::new();
        for v in vs {
            for c in v.components() {
                c.lcm_den_into(&mut common);
            }
        }
        vs.iter().map(|v| coefficient_vector(v.components(), &common)).collect()
    };
    let basis: Vec<usize> = if numeric_rank == m {
        (0..m).collect()
    } else {
        let all: Vec<&VectorFieldExpr> = fields.iter().collect();
        independent_subset(&vectors_of(&all))
    };
    let r = basis.len();
    let mut brackets = Vec::new();
    for a in 0..r {
        for b in a + 1..r {
            brackets.push(((a, b), bracket(&fields[basis[a]], &fields[basis[b]])?));
        }
    }
    let mut all: Vec<&VectorFieldExpr> = basis.iter().map(|&i| &fields[i]).collect();
    all.extend(brackets.iter().map(|(_, w)| w));
    let vecs = vectors_of(&all);
    let (solutions, consistent) = solve_in_span(&vecs[..r], &vecs[r..]);
    let mut constants = vec![vec![vec![Rational::zero(); r]; r]; r];
    let mut failures = Vec::new();
    for (((a, b), _), (sol, ok)) in brackets.iter().zip(solutions.iter().zip(&consistent)) {
        if !ok {
            failures.push((basis[*a], basis[*b]));
            continue;
        }
        for k in 0..r {
            constants[*a][*b][k] = sol[k].clone();
            constants[*b][*a][k] = -sol[k].clone();
        }
    }
    let closure_ok = failures.is_empty();
    let jacobi_ok = closure_ok && jacobi_holds(&constants);
    let is_sl2 = closure_ok && r == 3 && killing_form_indefinite_nondegenerate(&constants);
    Ok(StructureConstantsTable {
        m: r,
        basis,
        constants,
        closure_ok,
        jacobi_ok,
        independent_dim: r,
        numeric_rank,
        symbolic_confirmed: symbolic,
        is_sl2,
        failures,
    })
}

/// Rank of the component values at several random points over two primes.
/// Each value map is a ring homomorphism, so this never exceeds the true rank.
fn numeric_rank(fields: &[VectorFieldExpr]) -> usize {
    let chart = fields[0].chart();
    let n = chart.dim();
    let m = fields.len();
    let want = 3.max((m + 2).div_ceil(n));
    let mut rng = random_seeded(0x5eed);
    let set = MultiIndexSet::new(n, 0);
    let mut best = 0;
    for which in 0..2 {
        let field = PrimeField::new(which, &mut rng);
        let mut cols: Vec<Vec<u64>> = vec![Vec::new(); m];
        let mut used = 0;
        let mut tries = 0;
        while used < want && tries < 200 {
            tries += 1;
            let p: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-40..=40), rng.gen_range(1..=40))).collect();
            if !admissible(chart, &p) {
                continue;
            }
            let Ok(mut ctx) = SeriesCtx::new(&field, &set, &p) else { continue };
            let vals: Option<Vec<Vec<u64>>> = fields
                .iter()
                .map(|v| v.components().iter().map(|c| ctx.value(c).ok()).collect())
                .collect();
            let Some(vals) = vals else { continue };
            for (col, v) in cols.iter_mut().zip(vals) {
                col.extend(v);
            }
            used += 1;
        }
        let width = cols[0].len();
        best = best.max(rank(&field, cols, width));
        let _ = field.zero();
    }
    best
}

fn coefficient_vector(
    components: &[RatExpr],
    common: &BTreeMap<Expression, u32>,
) -> BTreeMap<(usize, Signature), Rational> {
    let mut out = BTreeMap::new();
    for (i, c) in components.iter().enumerate() {
        let num = c.numerator_over(common).expect("common denominator");
        for t in num.terms() {
            out.insert((i, t.sig.clone()), t.coeff.clone());
        }
    }
    out
}

type SparseVec = BTreeMap<(usize, Signature), Rational>;

fn key_index(vecs: &[SparseVec]) -> HashMap<(usize, Signature), usize> {
    let mut idx = HashMap::new();
    for v in vecs {
        for k in v.keys() {
            let next = idx.len();
            idx.entry(k.clone()).or_insert(next);
        }
    }
    idx
}

fn dense(v: &SparseVec, idx: &HashMap<(usize, Signature), usize>) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); idx.len()];
    for (k, c) in v {
        out[idx[k]] = c.clone();
    }
    out
}

/// Greedy maximal independent subset, in input order.
fn independent_subset(vecs: &[SparseVec]) -> Vec<usize> {
    let idx = key_index(vecs);
    let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, v) in vecs.iter().enumerate() {
        let mut d = dense(v, &idx);
        for (p, row) in &echelon {
            if !d[*p].is_zero() {
                let f = d[*p].clone();
                for (x, y) in d.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        if let Some(p) = d.iter().position(|x| !x.is_zero()) {
            let inv = d[p].recip();
            for x in d.iter_mut() {
                *x *= &inv;
            }
            echelon.push((p, d));
            chosen.push(i);
        }
    }
    chosen
}

/// Solves `Σ c_k basis_k = target` for each target; basis vectors must be independent.
fn solve_in_span(basis: &[SparseVec], targets: &[SparseVec]) -> (Vec<Vec<Rational>>, Vec<bool>) {
    let mut all = basis.to_vec();
    all.extend(targets.iter().cloned());
    let idx = key_index(&all);
    let rows = idx.len();
    let r = basis.len();
    let t = targets.len();
    // augmented matrix: rows = keys, columns = basis then targets
    let mut mat = vec![vec![Rational::zero(); r + t]; rows];
    for (c, v) in all.iter().enumerate() {
        for (k, x) in v {
            mat[idx[k]][c] = x.clone();
        }
    }
    let mut prow = 0;
    for c in 0..r {
        let Some(p) = (prow..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(prow, p);
        let inv = mat[prow][c].recip();
        for x in mat[prow].iter_mut() {
            *x *= &inv;
        }
        let pivot = mat[prow].clone();
        for (i, row) in mat.iter_mut().enumerate() {
            if i != prow && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        prow += 1;
    }
    let mut sols = Vec::with_capacity(t);
    let mut ok = Vec::with_capacity(t);
    for j in 0..t {
        let col = r + j;
        sols.push((0..r).map(|k| mat.get(k).map(|row| row[col].clone()).unwrap_or_default()).collect());
        ok.push(prow == r && (r..rows).all(|i| mat[i][col].is_zero()));
    }
    (sols, ok)
}

fn jacobi_holds(c: &[Vec<Vec<Rational>>]) -> bool {
    let r = c.len();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for mm in 0..r {
                    let mut acc = Rational::zero();
                    for l in 0..r {
                        acc += &c[i][j][l] * &c[l][k][mm];
                        acc += &c[j][k][l] * &c[l][i][mm];
                        acc += &c[k][i][l] * &c[l][j][mm];
                    }
                    if !acc.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Killing form `B_ab = c^d_ac c^c_bd` of a 3-dimensional algebra.
fn killing_form_indefinite_nondegenerate(c: &[Vec<Vec<Rational>>]) -> bool {
    let r = c.len();
    let b = |a: usize, bb: usize| {
        let mut acc = Rational::zero();
        for cc in 0..r {
            for d in 0..r {
                acc += &c[a][cc][d] * &c[bb][d][cc];
            }
        }
        acc
    };
    let m: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| b(i, j)).collect()).collect();
    let det = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
    if det.is_zero() {
        return false;
    }
    // definite iff all leading minors share the sign pattern of ±identity
    let m1 = m[0][0].clone();
    let m2 = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    let pos_def = m1.is_positive() && m2.is_positive() && det.is_positive();
    let neg_def = m1.is_negative() && m2.is_positive() && det.is_negative();
    !(pos_def || neg_def)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::parse_expr;
    use crate::geometry::MetricField;

    #[test]
    fn sl2_algebra() {
        let ch = Chart::new(&["x", "y"]).unwrap();
        let g = MetricField::new(
            ch.clone(),
            vec![
                vec![parse_expr("x", &ch).unwrap(), RatExpr::zero()],
                vec![RatExpr::zero(), parse_expr("-2*x", &ch).unwrap()],
            ],
        )
        .unwrap();
        let f = |a: &str, b: &str| VectorFieldExpr::parse(&ch, &[a, b]).unwrap();
        let fields = vec![f("0", "1"), f("x", "y"), f("2*x*y", "y^2")];
        let t = algebra_check(&fields, Geometry::Metric(&g), AlgebraMode::Projective).unwrap();
        assert_eq!(t.independent_dim, 3);
        assert!(t.closure_ok && t.jacobi_ok && t.is_sl2);
        // [∂y, x∂x + y∂y] = ∂y
        assert_eq!(t.constants[0][1], vec![rat(1, 1), rat(0, 1), rat(0, 1)]);
        let dup = vec![f("0", "1"), f("0", "1")];
        let t = algebra_check(&dup, Geometry::Metric(&g), AlgebraMode::Projective).unwrap();
        assert_eq!(t.independent_dim, 1);
        let bad = vec![f("x^2", "0")];
        assert!(matches!(
            algebra_check(&bad, Geometry::Metric(&g), AlgebraMode::Projective),
            Err(AlgebraError::Classification { index: 0, .. })
        ));
    }

    #[test]
    fn non_closing_set() {
        let ch = Chart::new(&["x", "y"]).unwrap();
        let flat = MetricField::diagonal(ch.clone(), vec![RatExpr::one(), RatExpr::one()]).unwrap();
        let f = |a: &str, b: &str| VectorFieldExpr::parse(&ch, &[a, b]).unwrap();
        let t = algebra_check(&[f("1", "0"), f("x", "0")], Geometry::Metric(&flat), AlgebraMode::Projective).unwrap();
        assert!(t.closure_ok);
        let t = algebra_check(&[f("y", "0"), f("0", "x")], Geometry::Metric(&flat), AlgebraMode::Affine).unwrap();
        assert!(!t.closure_ok);
    }
}
