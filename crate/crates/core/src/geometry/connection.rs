use crate::chart::Chart;
use crate::error::GeometryError;
use crate::expr::{rat, RatExpr};

use super::metric::MetricField;
use super::tensor::{TensorField, Variance};

/// Torsion-free linear connection, components `Γ^i_jk`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionField {
    chart: Chart,
    gamma: Vec<RatExpr>,
}

impl ConnectionField {
    /// `gamma[i][j][k] = Γ^i_jk`.
    pub fn new(chart: Chart, gamma: Vec<RatExpr>) -> Result<Self, GeometryError> {
        let n = chart.dim();
        if gamma.len() != n * n * n {
            return Err(GeometryError::Shape(format!(
                "{} Christoffel components, expected {}",
                gamma.len(),
                n * n * n
            )));
        }
        let c = ConnectionField { chart, gamma };
        for i in 0..n {
            for j in 0..n {
                for k in 0..j {
                    if !c.get(i, j, k).equals(c.get(i, k, j)) {
                        return Err(GeometryError::Torsion(i, j, k));
                    }
                }
            }
        }
        Ok(c)
    }

    /// Builds a connection from its listed nonzero components; each entry
    /// `(i, j, k, value)` also sets the symmetric `Γ^i_kj`.
    pub fn from_nonzero(chart: Chart, entries: &[(usize, usize, usize, RatExpr)]) -> Result<Self, GeometryError> {
        let n = chart.dim();
        let mut gamma = vec![RatExpr::zero(); n * n * n];
        for (i, j, k, v) in entries {
            if *i >= n || *j >= n || *k >= n {
                return Err(GeometryError::Shape(format!("index out of range in Γ^{i}_{j}{k}")));
            }
            gamma[(i * n + j) * n + k] = v.clone();
            gamma[(i * n + k) * n + j] = v.clone();
        }
        ConnectionField::new(chart, gamma)
    }

    pub fn flat(chart: Chart) -> Self {
        let n = chart.dim();
        ConnectionField {
            chart,
            gamma: vec![RatExpr::zero(); n * n * n],
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &RatExpr {
        let n = self.dim();
        &self.gamma[(i * n + j) * n + k]
    }

    pub fn as_tensor(&self) -> TensorField {
        TensorField::from_fn(
            &self.chart,
            vec![Variance::Up, Variance::Down, Variance::Down],
            |i| self.get(i[0], i[1], i[2]).clone(),
        )
    }
}

/// Christoffel symbols `Γ^i_jk = ½ g^{il}(∂_j g_lk + ∂_k g_lj − ∂_l g_jk)`.
pub fn levi_civita(g: &MetricField) -> ConnectionField {
    let n = g.dim();
    let mut dg = vec![RatExpr::zero(); n * n * n];
    for a in 0..n {
        for b in a..n {
            for c in 0..n {
                let d = g.g(a, b).differentiate(c);
                dg[(a * n + b) * n + c] = d.clone();
                dg[(b * n + a) * n + c] = d;
            }
        }
    }
    let d = |a: usize, b: usize, c: usize| &dg[(a * n + b) * n + c];
    // lowered symbols Γ_ljk
    let mut low = vec![RatExpr::zero(); n * n * n];
    for l in 0..n {
        for j in 0..n {
            for k in j..n {
                let s = &(d(l, k, j) + d(l, j, k)) - d(j, k, l);
                let s = s.scale(&rat(1, 2));
                low[(l * n + j) * n + k] = s.clone();
                low[(l * n + k) * n + j] = s;
            }
        }
    }
    let mut gamma = vec![RatExpr::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let mut acc = RatExpr::zero();
                for l in 0..n {
                    let gi = g.inv(i, l);
                    let lo = &low[(l * n + j) * n + k];
                    if !gi.is_zero() && !lo.is_zero() {
                        acc = &acc + &(gi * lo);
                    }
                }
                gamma[(i * n + j) * n + k] = acc.clone();
                gamma[(i * n + k) * n + j] = acc;
            }
        }
    }
    ConnectionField {
        chart: g.chart().clone(),
        gamma,
    }
}

/// Covariant derivative; the new lower index is appended last.
pub fn covariant_derivative(t: &TensorField, conn: &ConnectionField) -> TensorField {
    let n = t.dim();
    let mut variance = t.variance().to_vec();
    variance.push(Variance::Down);
    let rank = t.rank();
    TensorField::from_fn(t.chart(), variance, |idx| {
        let (base, k) = (&idx[..rank], idx[rank]);
        let mut acc = t.get(base).differentiate(k);
        let mut moved = base.to_vec();
        for (s, v) in t.variance().iter().enumerate() {
            let orig = base[s];
            for m in 0..n {
                moved[s] = m;
                let tm = t.get(&moved);
                if tm.is_zero() {
                    continue;
                }
                match v {
                    Variance::Up => {
                        let c = conn.get(orig, k, m);
                        if !c.is_zero() {
                            acc = &acc + &(c * tm);
                        }
                    }
                    Variance::Down => {
                        let c = conn.get(m, k, orig);
                        if !c.is_zero() {
                            acc = &acc - &(c * tm);
                        }
                    }
                }
            }
            moved[s] = orig;
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn pp_core() -> MetricField {
        let ch = Chart::new(&["x", "y", "z"]).unwrap();
        let p = |s: &str| parse_expr(s, &ch).unwrap();
        let g = vec![
            vec![p("0"), p("1"), p("0")],
            vec![p("1"), p("z^2"), p("0")],
            vec![p("0"), p("0"), p("1")],
        ];
        MetricField::new(ch.clone(), g).unwrap()
    }

    #[test]
    fn pp_wave_christoffels() {
        let g = pp_core();
        let c = levi_civita(&g);
        let z = RatExpr::var(2);
        assert!(c.get(2, 1, 1).equals(&-&z));
        assert!(c.get(0, 1, 2).equals(&z));
        assert!(c.get(0, 2, 1).equals(&z));
        let nonzero = (0..27).filter(|o| !c.gamma[*o].is_zero()).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn metric_is_parallel() {
        let g = pp_core();
        let c = levi_civita(&g);
        assert!(covariant_derivative(&g.as_tensor(), &c).is_zero());
        assert!(covariant_derivative(&g.inverse_tensor(), &c).is_zero());
    }

    #[test]
    fn torsion_rejected() {
        let ch = Chart::new(&["x", "y"]).unwrap();
        let mut gamma = vec![RatExpr::zero(); 8];
        gamma[1] = RatExpr::one();
        assert!(matches!(ConnectionField::new(ch, gamma), Err(GeometryError::Torsion(0, 1, 0))));
    }
}
