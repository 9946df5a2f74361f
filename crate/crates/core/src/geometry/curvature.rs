use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::expr::{rat, RatExpr, Rational};

use super::connection::{covariant_derivative, levi_civita, ConnectionField};
use super::metric::MetricField;
use super::tensor::{TensorField, Variance};

use Variance::{Down, Up};

/// `R^i_jkl = ∂_kΓ^i_lj − ∂_lΓ^i_kj + Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj`.
pub fn riemann(conn: &ConnectionField) -> TensorField {
    let n = conn.dim();
    let mut r = TensorField::zeros(conn.chart(), vec![Up, Down, Down, Down]);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in (k + 1)..n {
                    let mut acc = &conn.get(i, l, j).differentiate(k) - &conn.get(i, k, j).differentiate(l);
                    for m in 0..n {
                        let a = conn.get(i, k, m);
                        let b = conn.get(m, l, j);
                        if !a.is_zero() && !b.is_zero() {
                            acc = &acc + &(a * b);
                        }
                        let a = conn.get(i, l, m);
                        let b = conn.get(m, k, j);
                        if !a.is_zero() && !b.is_zero() {
                            acc = &acc - &(a * b);
                        }
                    }
                    r.set(&[i, j, l, k], -&acc);
                    r.set(&[i, j, k, l], acc);
                }
            }
        }
    }
    r
}

/// `Ric_jl = R^k_jkl`.
pub fn ricci(riem: &TensorField) -> TensorField {
    let n = riem.dim();
    TensorField::from_fn(riem.chart(), vec![Down, Down], |idx| {
        let mut acc = RatExpr::zero();
        for k in 0..n {
            let c = riem.get(&[k, idx[0], k, idx[1]]);
            if !c.is_zero() {
                acc = &acc + c;
            }
        }
        acc
    })
}

pub fn scalar_curvature(ric: &TensorField, g: &MetricField) -> RatExpr {
    let n = g.dim();
    let mut acc = RatExpr::zero();
    for j in 0..n {
        for l in 0..n {
            let a = g.inv(j, l);
            let b = ric.get(&[j, l]);
            if !a.is_zero() && !b.is_zero() {
                acc = &acc + &(a * b);
            }
        }
    }
    acc
}

/// Contracts slot `slot` with the metric (lowering) or its inverse (raising).
pub fn move_index(t: &TensorField, slot: usize, g: &MetricField) -> TensorField {
    let n = t.dim();
    let mut variance = t.variance().to_vec();
    let lower = variance[slot] == Up;
    variance[slot] = if lower { Down } else { Up };
    TensorField::from_fn(t.chart(), variance, |idx| {
        let mut acc = RatExpr::zero();
        let mut src = idx.to_vec();
        for m in 0..n {
            src[slot] = m;
            let c = t.get(&src);
            if c.is_zero() {
                continue;
            }
            let h = if lower { g.g(idx[slot], m) } else { g.inv(idx[slot], m) };
            if !h.is_zero() {
                acc = &acc + &(h * c);
            }
        }
        acc
    })
}

/// `R_ijkl = g_im R^m_jkl`.
pub fn riemann_lowered(riem: &TensorField, g: &MetricField) -> TensorField {
    move_index(riem, 0, g)
}

/// `‖R‖² = R_ijkl R^{ijkl}`.
pub fn riemann_norm_sq(riem: &TensorField, g: &MetricField) -> RatExpr {
    let low = riemann_lowered(riem, g);
    let mut up = riem.clone();
    for s in 1..4 {
        up = move_index(&up, s, g);
    }
    let mut acc = RatExpr::zero();
    for (a, b) in low.components().iter().zip(up.components()) {
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + &(a * b);
        }
    }
    acc
}

/// Riemann, Ricci, scalar curvature and (on request) `‖R‖²`.
#[derive(Clone, Debug)]
pub struct CurvatureSuite {
    pub riemann: TensorField,
    pub ricci: TensorField,
    pub scalar: Option<RatExpr>,
    pub riem_norm_sq: Option<RatExpr>,
}

pub fn curvature_suite(
    conn: &ConnectionField,
    g: Option<&MetricField>,
    with_norm: bool,
) -> Result<CurvatureSuite, GeometryError> {
    if let Some(g) = g {
        if !g.chart().same_coords(conn.chart()) {
            return Err(GeometryError::ChartMismatch);
        }
    }
    let riem = riemann(conn);
    let ric = ricci(&riem);
    let scalar = g.map(|g| scalar_curvature(&ric, g));
    let riem_norm_sq = match (g, with_norm) {
        (Some(g), true) => Some(riemann_norm_sq(&riem, g)),
        (None, true) => return Err(GeometryError::Shape("the norm of R needs a metric".into())),
        _ => None,
    };
    Ok(CurvatureSuite {
        riemann: riem,
        ricci: ric,
        scalar,
        riem_norm_sq,
    })
}

/// Weyl-type tensor together with a note when it is zero by dimension.
#[derive(Clone, Debug)]
pub struct WeylResult {
    pub tensor: TensorField,
    pub warning: Option<String>,
}

fn delta(a: usize, b: usize) -> bool {
    a == b
}

/// Projective Weyl tensor, the part of `R^i_jkl` trace-free in both `(i,k)`
/// and `(i,j)`:
/// `W^i_jkl = R^i_jkl − δ^i_k P_jl + δ^i_l P_jk − δ^i_j B_kl`, with
/// `P_(jl) = Ric_(jl)/(n−1)`, `P_[jl] = (n·Ric_[jl] − R^m_mjl)/((n−2)(n+1))`
/// and `B = Ric_[ ] − (n−1)·P_[ ]`.
pub fn projective_weyl(conn: &ConnectionField) -> WeylResult {
    let n = conn.dim();
    let riem = riemann(conn);
    if n == 2 {
        return WeylResult {
            tensor: TensorField::zeros(conn.chart(), vec![Up, Down, Down, Down]),
            warning: Some("projective Weyl tensor vanishes identically for n = 2".into()),
        };
    }
    let ric = ricci(&riem);
    let nn = n as i64;
    let mut p = vec![RatExpr::zero(); n * n];
    let mut b = vec![RatExpr::zero(); n * n];
    for j in 0..n {
        for l in 0..n {
            let sym = (ric.get(&[j, l]) + ric.get(&[l, j])).scale(&rat(1, 2 * (nn - 1)));
            let anti = (ric.get(&[j, l]) - ric.get(&[l, j])).scale(&rat(1, 2));
            let mut tr2 = RatExpr::zero();
            for m in 0..n {
                tr2 = &tr2 + riem.get(&[m, m, j, l]);
            }
            let a = (&anti.scale(&rat(nn, 1)) - &tr2).scale(&rat(1, (nn - 2) * (nn + 1)));
            b[j * n + l] = &anti - &a.scale(&rat(nn - 1, 1));
            p[j * n + l] = &sym + &a;
        }
    }
    let tensor = TensorField::from_fn(conn.chart(), vec![Up, Down, Down, Down], |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        let mut acc = riem.get(x).clone();
        if delta(i, k) {
            acc = &acc - &p[j * n + l];
        }
        if delta(i, l) {
            acc = &acc + &p[j * n + k];
        }
        if delta(i, j) {
            acc = &acc - &b[k * n + l];
        }
        acc
    });
    WeylResult { tensor, warning: None }
}

/// Fully lowered conformal Weyl tensor
/// `C = R − (g ⊙ Ric)/(n−2) + R·(g ⊙ g)/((n−1)(n−2))`.
pub fn conformal_weyl(g: &MetricField) -> Result<TensorField, GeometryError> {
    let n = g.dim();
    if n < 3 {
        return Err(GeometryError::Dimension {
            expected: "n ≥ 3".into(),
            got: n,
        });
    }
    let conn = levi_civita(g);
    let riem = riemann(&conn);
    let ric = ricci(&riem);
    let s = scalar_curvature(&ric, g);
    let low = riemann_lowered(&riem, g);
    let nn = n as i64;
    let c1 = rat(1, nn - 2);
    let c2 = rat(1, (nn - 1) * (nn - 2));
    let gr = |a: usize, b: usize| g.g(a, b);
    let rc = |a: usize, b: usize| ric.get(&[a, b]);
    Ok(TensorField::from_fn(g.chart(), vec![Down, Down, Down, Down], |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        let kn = &(&(&(gr(i, k) * rc(j, l)) - &(gr(i, l) * rc(j, k))) - &(gr(j, k) * rc(i, l))) + &(gr(j, l) * rc(i, k));
        let gg = &(gr(i, k) * gr(j, l)) - &(gr(i, l) * gr(j, k));
        let mut acc = low.get(x).clone();
        if !kn.is_zero() {
            acc = &acc - &kn.scale(&c1);
        }
        if !gg.is_zero() && !s.is_zero() {
            acc = &acc + &(&gg * &s).scale(&c2);
        }
        acc
    }))
}

/// Cotton tensor `C_ijk = ∇_k P_ij − ∇_j P_ik` with `P = Ric − (R/4)g`, n = 3.
pub fn cotton_tensor(g: &MetricField) -> Result<TensorField, GeometryError> {
    let n = g.dim();
    if n != 3 {
        return Err(GeometryError::Dimension {
            expected: "n = 3".into(),
            got: n,
        });
    }
    let conn = levi_civita(g);
    let riem = riemann(&conn);
    let ric = ricci(&riem);
    let s = scalar_curvature(&ric, g).scale(&rat(1, 4));
    let p = TensorField::from_fn(g.chart(), vec![Down, Down], |x| ric.get(x) - &(g.g(x[0], x[1]) * &s));
    let dp = covariant_derivative(&p, &conn);
    Ok(TensorField::from_fn(g.chart(), vec![Down, Down, Down], |x| {
        let (i, j, k) = (x[0], x[1], x[2]);
        dp.get(&[i, j, k]) - dp.get(&[i, k, j])
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvatureFlags {
    pub flat: bool,
    #[serde(with = "crate::serde_rational::option")]
    pub constant_curvature: Option<Rational>,
    pub conformally_flat: bool,
    pub projectively_flat: bool,
}

/// Constant `c` with `R_ijkl = c(g_ik g_jl − g_il g_jk)`, if any.
pub fn constant_curvature(riem: &TensorField, g: &MetricField) -> Option<Rational> {
    let n = g.dim();
    let ric = ricci(riem);
    let s = scalar_curvature(&ric, g);
    let c = s.as_constant()?.clone() / Rational::from_integer(((n * (n - 1)) as i64).into());
    let low = riemann_lowered(riem, g);
    let ok = low.indices().into_iter().all(|x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        let model = (&(g.g(i, k) * g.g(j, l)) - &(g.g(i, l) * g.g(j, k))).scale(&c);
        low.get(&x).equals(&model)
    });
    ok.then_some(c)
}

pub fn curvature_flags(g: &MetricField) -> CurvatureFlags {
    let n = g.dim();
    let conn = levi_civita(g);
    let riem = riemann(&conn);
    let flat = riem.is_zero();
    let cc = if flat {
        Some(Rational::from_integer(0.into()))
    } else {
        constant_curvature(&riem, g)
    };
    let conformally_flat = match n {
        2 => true,
        3 => cotton_tensor(g).map(|c| c.is_zero()).unwrap_or(false),
        _ => conformal_weyl(g).map(|c| c.is_zero()).unwrap_or(false),
    };
    CurvatureFlags {
        flat,
        projectively_flat: cc.is_some(),
        constant_curvature: cc,
        conformally_flat,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::parse_expr;

    fn stereo3() -> MetricField {
        let ch = Chart::new(&["x", "y", "z"]).unwrap();
        let e = parse_expr("4/(1 + x^2 + y^2 + z^2)^2", &ch).unwrap();
        MetricField::diagonal(ch, vec![e.clone(), e.clone(), e]).unwrap()
    }

    #[test]
    fn stereographic_sphere_has_curvature_one() {
        let g = stereo3();
        let conn = levi_civita(&g);
        let suite = curvature_suite(&conn, Some(&g), false).unwrap();
        assert!(suite.scalar.unwrap().equals(&RatExpr::int(6)));
        let flags = curvature_flags(&g);
        assert_eq!(flags.constant_curvature, Some(rat(1, 1)));
        assert!(flags.projectively_flat && flags.conformally_flat && !flags.flat);
        assert!(projective_weyl(&conn).tensor.is_zero());
        assert!(cotton_tensor(&g).unwrap().is_zero());
    }

    #[test]
    fn riemann_symmetries() {
        let ch = Chart::new(&["x", "y", "z"]).unwrap();
        let p = |s: &str| parse_expr(s, &ch).unwrap();
        let g = MetricField::new(
            ch.clone(),
            vec![
                vec![p("1"), p("2*exp(x)"), p("0")],
                vec![p("2*exp(x)"), p("0"), p("0")],
                vec![p("0"), p("0"), p("exp(2*x)")],
            ],
        )
        .unwrap();
        let r = riemann(&levi_civita(&g));
        for x in r.indices() {
            let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
            let cyc = &(r.get(&[i, j, k, l]) + r.get(&[i, k, l, j])) + r.get(&[i, l, j, k]);
            assert!(cyc.is_zero());
        }
        let low = riemann_lowered(&r, &g);
        for x in low.indices() {
            let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
            assert!((low.get(&[i, j, k, l]) + low.get(&[j, i, k, l])).is_zero());
            assert!(low.get(&[i, j, k, l]).equals(low.get(&[k, l, i, j])));
        }
    }

    #[test]
    fn weyl_vanishes_in_three_dimensions() {
        let ch = Chart::new(&["x", "y", "z"]).unwrap();
        let p = |s: &str| parse_expr(s, &ch).unwrap();
        let g = MetricField::new(
            ch.clone(),
            vec![
                vec![p("x"), p("y"), p("0")],
                vec![p("y"), p("1"), p("0")],
                vec![p("0"), p("0"), p("1 + z^2")],
            ],
        )
        .unwrap();
        assert!(conformal_weyl(&g).unwrap().is_zero());
    }
}
