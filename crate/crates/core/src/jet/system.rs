//! Linear PDE systems for symmetry algebras and the metrizability equation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::expr::{RatExpr, Rational};
use crate::geometry::{levi_civita, ConnectionField, MetricField};

use super::series::MultiIndex;
use super::JetError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Killing,
    Homothety,
    Conformal,
    Affine,
    Projective,
    /// Metrizability equation on g-self-adjoint `a`.
    Mobility,
    /// Metrizability equation on an arbitrary (1,1)-tensor `a`.
    MobilityGeneral,
}

impl SystemKind {
    pub const ALL: [SystemKind; 7] = [
        SystemKind::Killing,
        SystemKind::Homothety,
        SystemKind::Conformal,
        SystemKind::Affine,
        SystemKind::Projective,
        SystemKind::Mobility,
        SystemKind::MobilityGeneral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Killing => "killing",
            SystemKind::Homothety => "homothety",
            SystemKind::Conformal => "conformal",
            SystemKind::Affine => "affine",
            SystemKind::Projective => "projective",
            SystemKind::Mobility => "mobility",
            SystemKind::MobilityGeneral => "mobility_general",
        }
    }

    pub fn parse(s: &str) -> Option<SystemKind> {
        SystemKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn needs_metric(self) -> bool {
        !matches!(self, SystemKind::Affine | SystemKind::Projective)
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A metric or a bare connection.
#[derive(Clone, Copy, Debug)]
pub enum Geometry<'a> {
    Metric(&'a MetricField),
    Connection(&'a ConnectionField),
}

impl Geometry<'_> {
    pub fn chart(&self) -> &Chart {
        match self {
            Geometry::Metric(g) => g.chart(),
            Geometry::Connection(c) => c.chart(),
        }
    }

    pub fn connection(&self) -> ConnectionField {
        match self {
            Geometry::Metric(g) => levi_civita(g),
            Geometry::Connection(c) => (*c).clone(),
        }
    }
}

/// One scalar unknown function. Its jets of derivative order `r` sit at
/// weight `r + shift`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Unknown {
    pub name: String,
    pub shift: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JetTerm {
    pub unknown: usize,
    pub deriv: MultiIndex,
    pub coeff: RatExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub label: String,
    pub terms: Vec<JetTerm>,
    /// Highest `|deriv| + shift` among the terms.
    pub weight: usize,
}

/// Homogeneous linear system in the unknowns and their derivatives.
#[derive(Clone, Debug)]
pub struct LinearPdeSystem {
    pub chart: Chart,
    pub kind: SystemKind,
    pub unknowns: Vec<Unknown>,
    pub equations: Vec<Equation>,
    /// Largest equation weight.
    pub order: usize,
}

impl LinearPdeSystem {
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Largest number of derivatives applied to any unknown.
    pub fn differential_order(&self) -> usize {
        self.equations
            .iter()
            .flat_map(|e| e.terms.iter())
            .map(|t| t.deriv.iter().map(|&k| k as usize).sum::<usize>())
            .max()
            .unwrap_or(0)
    }
}

/// Accumulates a linear combination of jets.
#[derive(Default)]
struct Combo {
    terms: BTreeMap<(usize, MultiIndex), RatExpr>,
}

impl Combo {
    fn add(&mut self, unknown: usize, deriv: MultiIndex, coeff: &RatExpr) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry((unknown, deriv)).or_insert_with(RatExpr::zero);
        *slot = &*slot + coeff;
    }

    fn add_scaled(&mut self, other: &Combo, k: &RatExpr) {
        if k.is_zero() {
            return;
        }
        for ((u, d), c) in &other.terms {
            self.add(*u, d.clone(), &(c * k));
        }
    }

    fn into_equation(self, label: String, unknowns: &[Unknown]) -> Option<Equation> {
        let terms: Vec<JetTerm> = self
            .terms
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((unknown, deriv), coeff)| JetTerm { unknown, deriv, coeff })
            .collect();
        let weight = terms
            .iter()
            .map(|t| t.deriv.iter().map(|&k| k as usize).sum::<usize>() + unknowns[t.unknown].shift)
            .max()?;
        Some(Equation { label, terms, weight })
    }
}

fn unit(n: usize, i: usize) -> MultiIndex {
    let mut m = vec![0u8; n];
    m[i] += 1;
    m
}

fn pair(n: usize, i: usize, j: usize) -> MultiIndex {
    let mut m = vec![0u8; n];
    m[i] += 1;
    m[j] += 1;
    m
}

fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + b
}

pub fn build_system(kind: SystemKind, geom: Geometry<'_>) -> Result<LinearPdeSystem, JetError> {
    let chart = geom.chart().clone();
    let n = chart.dim();
    let metric = match geom {
        Geometry::Metric(g) => Some(g),
        Geometry::Connection(_) => None,
    };
    if kind.needs_metric() && metric.is_none() {
        return Err(JetError::NeedsMetric(kind));
    }
    if kind == SystemKind::Conformal && n < 3 {
        return Err(JetError::NotFiniteType(kind));
    }
    let coord = |i: usize| chart.name(i).to_string();
    let mut unknowns: Vec<Unknown> = Vec::new();
    let mut equations = Vec::new();
    let z = vec![0u8; n];
    match kind {
        SystemKind::Killing | SystemKind::Homothety | SystemKind::Conformal => {
            let g = metric.expect("metric");
            for i in 0..n {
                unknowns.push(Unknown { name: format!("v^{}", coord(i)), shift: 0 });
            }
            let aux = match kind {
                SystemKind::Homothety => Some(("lambda", Rational::from_integer(1.into()))),
                SystemKind::Conformal => Some(("sigma", Rational::from_integer(2.into()))),
                _ => None,
            };
            if let Some((name, _)) = aux {
                unknowns.push(Unknown { name: name.into(), shift: 1 });
            }
            for i in 0..n {
                for j in i..n {
                    let mut c = Combo::default();
                    for k in 0..n {
                        c.add(k, z.clone(), &g.g(i, j).differentiate(k));
                        c.add(k, unit(n, i), g.g(k, j));
                        c.add(k, unit(n, j), g.g(i, k));
                    }
                    if let Some((_, factor)) = &aux {
                        c.add(n, z.clone(), &g.g(i, j).scale(&-factor.clone()));
                    }
                    equations.extend(c.into_equation(format!("Lg_{}{}", coord(i), coord(j)), &unknowns));
                }
            }
            if kind == SystemKind::Homothety {
                for i in 0..n {
                    let mut c = Combo::default();
                    c.add(n, unit(n, i), &RatExpr::one());
                    equations.extend(c.into_equation(format!("dlambda_{}", coord(i)), &unknowns));
                }
            }
        }
        SystemKind::Affine | SystemKind::Projective => {
            let conn = geom.connection();
            for i in 0..n {
                unknowns.push(Unknown { name: format!("v^{}", coord(i)), shift: 0 });
            }
            if kind == SystemKind::Projective {
                for j in 0..n {
                    unknowns.push(Unknown { name: format!("psi_{}", coord(j)), shift: 2 });
                }
            }
            for i in 0..n {
                for j in 0..n {
                    for k in j..n {
                        let mut c = Combo::default();
                        for m in 0..n {
                            c.add(m, z.clone(), &conn.get(i, j, k).differentiate(m));
                            c.add(i, unit(n, m), &-conn.get(m, j, k));
                            c.add(m, unit(n, j), conn.get(i, m, k));
                            c.add(m, unit(n, k), conn.get(i, j, m));
                        }
                        c.add(i, pair(n, j, k), &RatExpr::one());
                        if kind == SystemKind::Projective {
                            if i == k {
                                c.add(n + j, z.clone(), &RatExpr::int(-1));
                            }
                            if i == j {
                                c.add(n + k, z.clone(), &RatExpr::int(-1));
                            }
                        }
                        let label = format!("LG^{}_{}{}", coord(i), coord(j), coord(k));
                        equations.extend(c.into_equation(label, &unknowns));
                    }
                }
            }
        }
        SystemKind::Mobility => {
            let g = metric.expect("metric");
            let conn = levi_civita(g);
            for i in 0..n {
                for j in i..n {
                    unknowns.push(Unknown { name: format!("a_{}{}", coord(i), coord(j)), shift: 0 });
                }
            }
            let u = |i: usize, j: usize| sym_index(n, i, j);
            // ∇_k a_ij
            let nabla = |k: usize, i: usize, j: usize| {
                let mut c = Combo::default();
                c.add(u(i, j), unit(n, k), &RatExpr::one());
                for r in 0..n {
                    c.add(u(r, j), z.clone(), &-conn.get(r, k, i));
                    c.add(u(i, r), z.clone(), &-conn.get(r, k, j));
                }
                c
            };
            // Λ_l = g^{sr} ∇_s a_lr
            let lambda: Vec<Combo> = (0..n)
                .map(|l| {
                    let mut c = Combo::default();
                    for s in 0..n {
                        for r in 0..n {
                            c.add_scaled(&nabla(s, l, r), g.inv(s, r));
                        }
                    }
                    c
                })
                .collect();
            let np1 = RatExpr::int(n as i64 + 1);
            for i in 0..n {
                for j in i..n {
                    for k in 0..n {
                        let mut c = Combo::default();
                        c.add_scaled(&nabla(k, i, j), &np1);
                        c.add_scaled(&lambda[i], &-g.g(j, k));
                        c.add_scaled(&lambda[j], &-g.g(i, k));
                        let label = format!("sin_{}{};{}", coord(i), coord(j), coord(k));
                        equations.extend(c.into_equation(label, &unknowns));
                    }
                }
            }
        }
        SystemKind::MobilityGeneral => {
            let g = metric.expect("metric");
            let conn = levi_civita(g);
            for i in 0..n {
                for j in 0..n {
                    unknowns.push(Unknown { name: format!("a^{}_{}", coord(i), coord(j)), shift: 0 });
                }
            }
            let u = |i: usize, j: usize| i * n + j;
            // ∇_k a^i_j
            let nabla = |k: usize, i: usize, j: usize| {
                let mut c = Combo::default();
                c.add(u(i, j), unit(n, k), &RatExpr::one());
                for r in 0..n {
                    c.add(u(r, j), z.clone(), conn.get(i, k, r));
                    c.add(u(i, r), z.clone(), &-conn.get(r, k, j));
                }
                c
            };
            // ∇_s a^{is} = g^{ms} ∇_s a^i_m and ∇_s a^s_j
            let div_up: Vec<Combo> = (0..n)
                .map(|i| {
                    let mut c = Combo::default();
                    for s in 0..n {
                        for m in 0..n {
                            c.add_scaled(&nabla(s, i, m), g.inv(m, s));
                        }
                    }
                    c
                })
                .collect();
            let div_low: Vec<Combo> = (0..n)
                .map(|j| {
                    let mut c = Combo::default();
                    for s in 0..n {
                        c.add_scaled(&nabla(s, s, j), &RatExpr::one());
                    }
                    c
                })
                .collect();
            let np1 = RatExpr::int(n as i64 + 1);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut c = Combo::default();
                        c.add_scaled(&nabla(k, i, j), &np1);
                        c.add_scaled(&div_up[i], &-g.g(j, k));
                        if i == k {
                            c.add_scaled(&div_low[j], &RatExpr::int(-1));
                        }
                        let label = format!("sin^{}_{};{}", coord(i), coord(j), coord(k));
                        equations.extend(c.into_equation(label, &unknowns));
                    }
                }
            }
        }
    }
    let order = equations.iter().map(|e| e.weight).max().unwrap_or(0);
    Ok(LinearPdeSystem {
        chart,
        kind,
        unknowns,
        equations,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn equation_counts() {
        let ch = Chart::new(&["x", "y", "z"]).unwrap();
        let p = |s: &str| parse_expr(s, &ch).unwrap();
        let egorov = ConnectionField::from_nonzero(ch.clone(), &[(0, 1, 2, p("y"))]).unwrap();
        let sys = build_system(SystemKind::Projective, Geometry::Connection(&egorov)).unwrap();
        assert_eq!(sys.equations.len(), 18);
        assert_eq!(sys.unknowns.len(), 6);
        assert_eq!(sys.order, 2);
        let flat2 = MetricField::diagonal(Chart::new(&["x", "y"]).unwrap(), vec![RatExpr::one(), RatExpr::one()]).unwrap();
        let k = build_system(SystemKind::Killing, Geometry::Metric(&flat2)).unwrap();
        assert_eq!(k.equations.len(), 3);
        assert!(matches!(
            build_system(SystemKind::Conformal, Geometry::Metric(&flat2)),
            Err(JetError::NotFiniteType(_))
        ));
        assert!(matches!(
            build_system(SystemKind::Killing, Geometry::Connection(&egorov)),
            Err(JetError::NeedsMetric(_))
        ));
        let m = build_system(SystemKind::Mobility, Geometry::Metric(&flat2)).unwrap();
        assert_eq!(m.unknowns.len(), 3);
        assert_eq!(m.equations.len(), 6);
    }
}
