//! Lie derivatives, classification of vector fields, the φ-map, the
//! metrizability residual, brackets and the geodesic ODE of a 2D metric.

mod algebra;

pub use algebra::{algebra_check, AlgebraError, AlgebraMode, StructureConstantsTable};

use std::fmt;

use serde::Serialize;

use crate::chart::Chart;
use crate::error::{GeometryError, ParseError};
use crate::expr::{parse_expr, rat, RatExpr, Rational};
use crate::geometry::{covariant_derivative, levi_civita, ConnectionField, MetricField, TensorField, Variance};

/// A vector field `v = v^i ∂_i` on a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldExpr {
    chart: Chart,
    components: Vec<RatExpr>,
}

impl VectorFieldExpr {
    pub fn new(chart: &Chart, components: Vec<RatExpr>) -> Result<Self, GeometryError> {
        if components.len() != chart.dim() {
            return Err(GeometryError::Dimension {
                expected: chart.dim().to_string(),
                got: components.len(),
            });
        }
        Ok(VectorFieldExpr {
            chart: chart.clone(),
            components,
        })
    }

    /// Components given as expression strings.
    pub fn parse<S: AsRef<str>>(chart: &Chart, components: &[S]) -> Result<Self, FieldParseError> {
        let comps = components
            .iter()
            .map(|s| parse_expr(s.as_ref(), chart))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorFieldExpr::new(chart, comps)?)
    }

    /// `Σ c_i ∂_{x_i}` from `(coordinate, coefficient)` pairs.
    pub fn from_terms<S: AsRef<str>>(chart: &Chart, terms: &[(&str, S)]) -> Result<Self, FieldParseError> {
        let mut comps = vec![RatExpr::zero(); chart.dim()];
        for (name, expr) in terms {
            let i = chart
                .index_of(name)
                .ok_or_else(|| GeometryError::InvalidChart(format!("unknown coordinate {name}")))?;
            comps[i] = &comps[i] + &parse_expr(expr.as_ref(), chart)?;
        }
        Ok(VectorFieldExpr::new(chart, comps)?)
    }

    pub fn zero(chart: &Chart) -> Self {
        VectorFieldExpr {
            chart: chart.clone(),
            components: vec![RatExpr::zero(); chart.dim()],
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &RatExpr {
        &self.components[i]
    }

    pub fn components(&self) -> &[RatExpr] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(RatExpr::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> VectorFieldExpr {
        VectorFieldExpr {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| c.scale(k)).collect(),
        }
    }

    pub fn add(&self, other: &VectorFieldExpr) -> Result<VectorFieldExpr, GeometryError> {
        same_chart(&self.chart, &other.chart)?;
        Ok(VectorFieldExpr {
            chart: self.chart.clone(),
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        })
    }

    /// Action on a function: `v(f) = v^k ∂_k f`.
    pub fn apply(&self, f: &RatExpr) -> RatExpr {
        let mut acc = RatExpr::zero();
        for (k, vk) in self.components.iter().enumerate() {
            if !vk.is_zero() {
                let d = f.differentiate(k);
                if !d.is_zero() {
                    acc = &acc + &(vk * &d);
                }
            }
        }
        acc
    }
}

impl fmt::Display for VectorFieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({}) d_{}", self.chart.show(c), self.chart.name(i)))
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldParseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn same_chart(a: &Chart, b: &Chart) -> Result<(), GeometryError> {
    if a.same_coords(b) {
        Ok(())
    } else {
        Err(GeometryError::ChartMismatch)
    }
}

/// `(L_v g)_ij = v^k ∂_k g_ij + g_kj ∂_i v^k + g_ik ∂_j v^k`.
pub fn lie_metric(v: &VectorFieldExpr, g: &MetricField) -> Result<TensorField, GeometryError> {
    same_chart(v.chart(), g.chart())?;
    let n = g.dim();
    let dv: Vec<Vec<RatExpr>> = (0..n).map(|k| (0..n).map(|i| v.component(k).differentiate(i)).collect()).collect();
    let mut out = TensorField::zeros(g.chart(), vec![Variance::Down, Variance::Down]);
    for i in 0..n {
        for j in i..n {
            let mut acc = v.apply(g.g(i, j));
            for k in 0..n {
                if !dv[k][i].is_zero() {
                    acc = &acc + &(g.g(k, j) * &dv[k][i]);
                }
                if !dv[k][j].is_zero() {
                    acc = &acc + &(g.g(i, k) * &dv[k][j]);
                }
            }
            out.set(&[j, i], acc.clone());
            out.set(&[i, j], acc);
        }
    }
    Ok(out)
}

/// `(L_vΓ)^i_jk = v^m ∂_m Γ^i_jk − Γ^m_jk ∂_m v^i + Γ^i_mk ∂_j v^m + Γ^i_jm ∂_k v^m + ∂_j ∂_k v^i`.
pub fn lie_connection(v: &VectorFieldExpr, conn: &ConnectionField) -> Result<TensorField, GeometryError> {
    same_chart(v.chart(), conn.chart())?;
    let n = conn.dim();
    let dv: Vec<Vec<RatExpr>> = (0..n).map(|m| (0..n).map(|j| v.component(m).differentiate(j)).collect()).collect();
    let mut out = TensorField::zeros(conn.chart(), vec![Variance::Up, Variance::Down, Variance::Down]);
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let mut acc = v.apply(conn.get(i, j, k));
                for m in 0..n {
                    let terms = [
                        (conn.get(m, j, k), &dv[i][m], true),
                        (conn.get(i, m, k), &dv[m][j], false),
                        (conn.get(i, j, m), &dv[m][k], false),
                    ];
                    for (c, d, negate) in terms {
                        if c.is_zero() || d.is_zero() {
                            continue;
                        }
                        let t = c * d;
                        acc = if negate { &acc - &t } else { &acc + &t };
                    }
                }
                acc = &acc + &dv[i][j].differentiate(k);
                out.set(&[i, k, j], acc.clone());
                out.set(&[i, j, k], acc);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FieldKind {
    Killing,
    Homothety,
    Conformal,
    AffineOnly,
    ProjectiveOnly,
    NotProjective,
}

impl FieldKind {
    pub fn is_projective(self) -> bool {
        !matches!(self, FieldKind::NotProjective | FieldKind::Conformal)
    }

    pub fn is_affine(self) -> bool {
        matches!(self, FieldKind::Killing | FieldKind::Homothety | FieldKind::AffineOnly)
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Killing => "Killing",
            FieldKind::Homothety => "Homothety",
            FieldKind::Conformal => "Conformal",
            FieldKind::AffineOnly => "AffineOnly",
            FieldKind::ProjectiveOnly => "ProjectiveOnly",
            FieldKind::NotProjective => "NotProjective",
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub kind: FieldKind,
    /// Homothety constant of `L_v g = λ g`.
    pub lambda: Option<Rational>,
    /// Conformal factor of `L_v g = σ g`.
    pub sigma: Option<RatExpr>,
    /// Co-factor of `L_vΓ^i_jk = ψ_j δ^i_k + ψ_k δ^i_j`.
    pub psi: Option<Vec<RatExpr>>,
}

impl Classification {
    fn plain(kind: FieldKind) -> Self {
        Classification {
            kind,
            lambda: None,
            sigma: None,
            psi: None,
        }
    }
}

/// `σ` with `L = σ g`, if such a function exists.
fn proportionality(l: &TensorField, g: &MetricField) -> Option<RatExpr> {
    let n = g.dim();
    let (a, b) = (0..n)
        .map(|i| (i, i))
        .chain((0..n).flat_map(|i| (0..n).map(move |j| (i, j))))
        .find(|&(i, j)| !g.g(i, j).is_zero())?;
    let sigma = l.get(&[a, b]).checked_div(g.g(a, b))?;
    for i in 0..n {
        for j in i..n {
            if !(l.get(&[i, j]) - &(&sigma * g.g(i, j))).is_zero() {
                return None;
            }
        }
    }
    Some(sigma)
}

/// Trace co-factor `ψ_j = (L_vΓ)^k_jk / (n+1)`, if the projective equation holds.
fn projective_cofactor(lg: &TensorField) -> Option<Vec<RatExpr>> {
    let n = lg.dim();
    let psi: Vec<RatExpr> = (0..n)
        .map(|j| {
            let mut acc = RatExpr::zero();
            for k in 0..n {
                acc = &acc + lg.get(&[k, j, k]);
            }
            acc.scale(&rat(1, n as i64 + 1))
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let mut r = lg.get(&[i, j, k]).clone();
                if i == k {
                    r = &r - &psi[j];
                }
                if i == j {
                    r = &r - &psi[k];
                }
                if !r.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(psi)
}

/// Most restrictive class of `v` for a metric.
pub fn classify_field(v: &VectorFieldExpr, g: &MetricField) -> Result<Classification, GeometryError> {
    let lg = lie_metric(v, g)?;
    if lg.is_zero() {
        return Ok(Classification::plain(FieldKind::Killing));
    }
    if let Some(sigma) = proportionality(&lg, g) {
        if let Some(lambda) = sigma.as_constant() {
            return Ok(Classification {
                lambda: Some(lambda),
                ..Classification::plain(FieldKind::Homothety)
            });
        }
        return Ok(Classification {
            sigma: Some(sigma),
            ..Classification::plain(FieldKind::Conformal)
        });
    }
    Ok(classify_affine_projective(v, &levi_civita(g))?)
}

/// Classification for a bare connection: affine, projective or neither.
pub fn classify_connection_field(v: &VectorFieldExpr, conn: &ConnectionField) -> Result<Classification, GeometryError> {
    classify_affine_projective(v, conn)
}

fn classify_affine_projective(v: &VectorFieldExpr, conn: &ConnectionField) -> Result<Classification, GeometryError> {
    let lg = lie_connection(v, conn)?;
    if lg.is_zero() {
        return Ok(Classification::plain(FieldKind::AffineOnly));
    }
    Ok(match projective_cofactor(&lg) {
        Some(psi) => Classification {
            psi: Some(psi),
            ..Classification::plain(FieldKind::ProjectiveOnly)
        },
        None => Classification::plain(FieldKind::NotProjective),
    })
}

/// Residual `L_vΓ − ψ⊗δ − δ⊗ψ` with the trace co-factor; zero for projective fields.
pub fn projective_residual(v: &VectorFieldExpr, conn: &ConnectionField) -> Result<TensorField, GeometryError> {
    let lg = lie_connection(v, conn)?;
    let n = conn.dim();
    let psi: Vec<RatExpr> = (0..n)
        .map(|j| {
            let mut acc = RatExpr::zero();
            for k in 0..n {
                acc = &acc + lg.get(&[k, j, k]);
            }
            acc.scale(&rat(1, n as i64 + 1))
        })
        .collect();
    Ok(TensorField::from_fn(conn.chart(), lg.variance().to_vec(), |x| {
        let (i, j, k) = (x[0], x[1], x[2]);
        let mut r = lg.get(x).clone();
        if i == k {
            r = &r - &psi[j];
        }
        if i == j {
            r = &r - &psi[k];
        }
        r
    }))
}

/// A g-self-adjoint (1,1)-tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct MobilityTensor {
    a: TensorField,
}

impl MobilityTensor {
    pub fn new(a: TensorField, g: &MetricField) -> Result<Self, GeometryError> {
        if a.variance() != [Variance::Up, Variance::Down] {
            return Err(GeometryError::Shape("mobility tensor must be of type (1,1)".into()));
        }
        same_chart(a.chart(), g.chart())?;
        let n = g.dim();
        let low = |i: usize, j: usize| {
            let mut acc = RatExpr::zero();
            for k in 0..n {
                acc = &acc + &(g.g(i, k) * a.get(&[k, j]));
            }
            acc
        };
        for i in 0..n {
            for j in 0..i {
                if !(low(i, j) - low(j, i)).is_zero() {
                    return Err(GeometryError::NotSymmetric(i, j));
                }
            }
        }
        Ok(MobilityTensor { a })
    }

    pub fn identity(g: &MetricField) -> Self {
        MobilityTensor {
            a: TensorField::from_fn(g.chart(), vec![Variance::Up, Variance::Down], |x| {
                if x[0] == x[1] {
                    RatExpr::one()
                } else {
                    RatExpr::zero()
                }
            }),
        }
    }

    pub fn tensor(&self) -> &TensorField {
        &self.a
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero()
    }

    /// The constant `c` with `a = c·Id`, if any.
    pub fn identity_multiple(&self) -> Option<Rational> {
        let n = self.a.dim();
        let c = self.a.get(&[0, 0]).as_constant()?;
        for i in 0..n {
            for j in 0..n {
                let e = self.a.get(&[i, j]);
                let ok = if i == j { e.as_constant().as_ref() == Some(&c) } else { e.is_zero() };
                if !ok {
                    return None;
                }
            }
        }
        Some(c)
    }
}

/// `a = g⁻¹ L_v g − (1/(n+1)) tr(g⁻¹ L_v g) Id`.
pub fn phi_map(v: &VectorFieldExpr, g: &MetricField) -> Result<MobilityTensor, GeometryError> {
    let lg = lie_metric(v, g)?;
    let n = g.dim();
    let mut raised = vec![RatExpr::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = RatExpr::zero();
            for k in 0..n {
                let (gi, l) = (g.inv(i, k), lg.get(&[k, j]));
                if !gi.is_zero() && !l.is_zero() {
                    acc = &acc + &(gi * l);
                }
            }
            raised[i * n + j] = acc;
        }
    }
    let mut trace = RatExpr::zero();
    for i in 0..n {
        trace = &trace + &raised[i * n + i];
    }
    let shift = trace.scale(&rat(1, n as i64 + 1));
    let a = TensorField::from_fn(g.chart(), vec![Variance::Up, Variance::Down], |x| {
        let e = raised[x[0] * n + x[1]].clone();
        if x[0] == x[1] {
            &e - &shift
        } else {
            e
        }
    });
    MobilityTensor::new(a, g)
}

/// `(n+1) a^i_{j,k} − a^{is}_{,s} g_jk − a^s_{j,s} δ^i_k`, indexed `[i, j, k]`.
pub fn mobility_residual(a: &MobilityTensor, g: &MetricField) -> Result<TensorField, GeometryError> {
    same_chart(a.tensor().chart(), g.chart())?;
    let n = g.dim();
    let conn = levi_civita(g);
    let na = covariant_derivative(a.tensor(), &conn);
    let div_up: Vec<RatExpr> = (0..n)
        .map(|i| {
            let mut acc = RatExpr::zero();
            for s in 0..n {
                for m in 0..n {
                    let gi = g.inv(m, s);
                    if !gi.is_zero() {
                        acc = &acc + &(gi * na.get(&[i, m, s]));
                    }
                }
            }
            acc
        })
        .collect();
    let div_low: Vec<RatExpr> = (0..n)
        .map(|j| {
            let mut acc = RatExpr::zero();
            for s in 0..n {
                acc = &acc + na.get(&[s, j, s]);
            }
            acc
        })
        .collect();
    let np1 = rat(n as i64 + 1, 1);
    Ok(TensorField::from_fn(g.chart(), vec![Variance::Up, Variance::Down, Variance::Down], |x| {
        let (i, j, k) = (x[0], x[1], x[2]);
        let mut r = na.get(&[i, j, k]).scale(&np1);
        r = &r - &(&div_up[i] * g.g(j, k));
        if i == k {
            r = &r - &div_low[j];
        }
        r
    }))
}

/// `[u, w]^i = u^k ∂_k w^i − w^k ∂_k u^i`.
pub fn bracket(u: &VectorFieldExpr, w: &VectorFieldExpr) -> Result<VectorFieldExpr, GeometryError> {
    same_chart(u.chart(), w.chart())?;
    let components = (0..u.dim())
        .map(|i| &u.apply(w.component(i)) - &w.apply(u.component(i)))
        .collect();
    Ok(VectorFieldExpr {
        chart: u.chart().clone(),
        components,
    })
}

/// Coefficients of `y'' = A0 + A1 y' + A2 y'² + A3 y'³` for the unparameterized
/// geodesics of a connection on a surface with coordinates `(x, y)`.
pub fn geodesic_ode_connection(conn: &ConnectionField) -> Result<[RatExpr; 4], GeometryError> {
    if conn.dim() != 2 {
        return Err(GeometryError::Dimension {
            expected: "2".into(),
            got: conn.dim(),
        });
    }
    let c = |i, j, k| conn.get(i, j, k);
    Ok([
        -c(1, 0, 0),
        c(0, 0, 0) - &c(1, 0, 1).scale(&rat(2, 1)),
        &c(0, 0, 1).scale(&rat(2, 1)) - c(1, 1, 1),
        c(0, 1, 1).clone(),
    ])
}

pub fn geodesic_ode_2d(g: &MetricField) -> Result<[RatExpr; 4], GeometryError> {
    geodesic_ode_connection(&levi_civita(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metric_2d(eps: i64) -> MetricField {
        let ch = Chart::new(&["x", "y"]).unwrap();
        let g = vec![
            vec![parse_expr("x", &ch).unwrap(), RatExpr::zero()],
            vec![RatExpr::zero(), parse_expr(&format!("-2*{eps}*x"), &ch).unwrap()],
        ];
        MetricField::new(ch, g).unwrap()
    }

    #[test]
    fn lie_derivative_of_2d_metric() {
        let g = metric_2d(1);
        let v = VectorFieldExpr::parse(g.chart(), &["x", "y"]).unwrap();
        let l = lie_metric(&v, &g).unwrap();
        let three_g = g.as_tensor().map(|e| e.scale(&rat(3, 1)));
        assert!(l.sub(&three_g).unwrap().is_zero());
        assert!(lie_metric(&VectorFieldExpr::zero(g.chart()), &g).unwrap().is_zero());
    }

    #[test]
    fn sl2_fields_classify() {
        let g = metric_2d(1);
        let ch = g.chart().clone();
        let c = |a: &str, b: &str| classify_field(&VectorFieldExpr::parse(&ch, &[a, b]).unwrap(), &g).unwrap();
        assert_eq!(c("0", "1").kind, FieldKind::Killing);
        let h = c("x", "y");
        assert_eq!(h.kind, FieldKind::Homothety);
        assert_eq!(h.lambda, Some(rat(3, 1)));
        let p = c("2*x*y", "y^2");
        assert_eq!(p.kind, FieldKind::ProjectiveOnly);
        assert!(p.psi.is_some());
        assert_eq!(c("x^2", "0").kind, FieldKind::NotProjective);
    }

    #[test]
    fn phi_map_and_residual() {
        let g = metric_2d(1);
        let ch = g.chart().clone();
        let v = VectorFieldExpr::parse(&ch, &["2*x*y", "y^2"]).unwrap();
        let a = phi_map(&v, &g).unwrap();
        assert!(!a.is_zero());
        assert!(mobility_residual(&a, &g).unwrap().is_zero());
        let h = phi_map(&VectorFieldExpr::parse(&ch, &["x", "y"]).unwrap(), &g).unwrap();
        assert_eq!(h.identity_multiple(), Some(rat(1, 1)));
        assert!(phi_map(&VectorFieldExpr::parse(&ch, &["0", "1"]).unwrap(), &g).unwrap().is_zero());
        assert!(mobility_residual(&MobilityTensor::identity(&g), &g).unwrap().is_zero());
        let flat = MetricField::diagonal(ch.clone(), vec![RatExpr::one(), RatExpr::one()]).unwrap();
        let xa = TensorField::from_fn(&ch, vec![Variance::Up, Variance::Down], |i| {
            if i[0] == i[1] {
                RatExpr::var(0)
            } else {
                RatExpr::zero()
            }
        });
        let xa = MobilityTensor::new(xa, &flat).unwrap();
        assert!(!mobility_residual(&xa, &flat).unwrap().is_zero());
    }

    #[test]
    fn brackets() {
        let ch = Chart::new(&["x", "y"]).unwrap();
        let v = |a: &str, b: &str| VectorFieldExpr::parse(&ch, &[a, b]).unwrap();
        assert_eq!(bracket(&v("1", "0"), &v("x", "0")).unwrap(), v("1", "0"));
        assert_eq!(bracket(&v("0", "1"), &v("2*x*y", "y^2")).unwrap(), v("2*x", "2*y"));
        let u = v("x*y", "exp(x)");
        assert!(bracket(&u, &u).unwrap().is_zero());
    }

    #[test]
    fn geodesic_equations() {
        let g = metric_2d(1);
        let [a0, a1, a2, a3] = geodesic_ode_2d(&g).unwrap();
        let ch = g.chart();
        assert!(a0.is_zero() && a2.is_zero());
        assert!(a1.equals(&parse_expr("-1/(2*x)", ch).unwrap()));
        assert!(a3.equals(&parse_expr("1/x", ch).unwrap()));
        let ch2 = Chart::new(&["x", "y"]).unwrap();
        let alt = MetricField::new(
            ch2.clone(),
            vec![
                vec![parse_expr("1/y^4", &ch2).unwrap(), parse_expr("-x/y^5", &ch2).unwrap()],
                vec![parse_expr("-x/y^5", &ch2).unwrap(), parse_expr("x^2/y^6 - 1/y^8", &ch2).unwrap()],
            ],
        )
        .unwrap();
        let coeffs = geodesic_ode_2d(&alt).unwrap();
        // −(x y' − y)³ expanded in powers of y'
        let expected = ["y^3", "-3*x*y^2", "3*x^2*y", "-x^3"];
        for (c, e) in coeffs.iter().zip(expected) {
            assert!(c.equals(&parse_expr(e, &ch2).unwrap()), "{}", ch2.show(c));
        }
    }
}
