//! All symmetry dimensions of one geometry plus the inequalities relating them.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::geometry::{curvature_flags, CurvatureFlags};

use super::prolong::{solution_dimension, JetOptions, JetRankReport};
use super::system::{build_system, Geometry, SystemKind};
use super::JetError;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EstimateCheck {
    pub name: String,
    pub statement: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub dim_isometry: Option<usize>,
    pub dim_homothety: Option<usize>,
    pub dim_conformal: Option<usize>,
    pub dim_affine: Option<usize>,
    pub dim_projective: Option<usize>,
    pub degree_of_mobility: Option<usize>,
    /// Metrizability solutions without the self-adjointness constraint.
    pub degree_of_mobility_general: Option<usize>,
    pub flags: Option<CurvatureFlags>,
    pub checks: Vec<EstimateCheck>,
    pub reports: BTreeMap<SystemKind, JetRankReport>,
}

impl SymmetryReport {
    pub fn dim(&self, kind: SystemKind) -> Option<usize> {
        self.reports.get(&kind).map(|r| r.stabilized_dim)
    }

    pub fn violations(&self) -> Vec<&EstimateCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    pub fn confident(&self) -> bool {
        self.reports.values().all(|r| r.confident)
    }
}

/// Default kinds for a geometry: everything that applies.
pub fn default_kinds(geom: &Geometry<'_>) -> Vec<SystemKind> {
    match geom {
        Geometry::Connection(_) => vec![SystemKind::Affine, SystemKind::Projective],
        Geometry::Metric(g) => {
            let mut k = vec![SystemKind::Killing, SystemKind::Homothety];
            if g.dim() >= 3 {
                k.push(SystemKind::Conformal);
            }
            k.extend([SystemKind::Affine, SystemKind::Projective, SystemKind::Mobility]);
            k
        }
    }
}

pub fn symmetry_profile(
    geom: Geometry<'_>,
    kinds: &[SystemKind],
    opts: &JetOptions,
) -> Result<SymmetryReport, JetError> {
    let mut reports = BTreeMap::new();
    for &kind in kinds {
        let sys = build_system(kind, geom)?;
        reports.insert(kind, solution_dimension(&sys, opts)?);
    }
    let get = |k: SystemKind| reports.get(&k).map(|r: &JetRankReport| r.stabilized_dim);
    let flags = match geom {
        Geometry::Metric(g) => Some(curvature_flags(g)),
        Geometry::Connection(_) => None,
    };
    let mut report = SymmetryReport {
        dim_isometry: get(SystemKind::Killing),
        dim_homothety: get(SystemKind::Homothety),
        dim_conformal: get(SystemKind::Conformal),
        dim_affine: get(SystemKind::Affine),
        dim_projective: get(SystemKind::Projective),
        degree_of_mobility: get(SystemKind::Mobility),
        degree_of_mobility_general: get(SystemKind::MobilityGeneral),
        flags,
        checks: Vec::new(),
        reports,
    };
    report.checks = estimate_checks(&report);
    Ok(report)
}

/// Inequalities that every metric satisfies, for the dims that were computed.
pub fn estimate_checks(r: &SymmetryReport) -> Vec<EstimateCheck> {
    let mut out = Vec::new();
    let mut check = |name: &str, statement: String, holds: bool| {
        out.push(EstimateCheck {
            name: name.into(),
            statement,
            holds,
        })
    };
    let (i, h, c, a, p, d) = (
        r.dim_isometry,
        r.dim_homothety,
        r.dim_conformal,
        r.dim_affine,
        r.dim_projective,
        r.degree_of_mobility,
    );
    if let (Some(i), Some(h)) = (i, h) {
        check("isometry_in_homothety", format!("I={i} <= H={h} <= I+1"), i <= h && h <= i + 1);
    }
    if let (Some(h), Some(c)) = (h, c) {
        check("homothety_in_conformal", format!("H={h} <= C={c}"), h <= c);
    }
    if let (Some(h), Some(a)) = (h, a) {
        check("homothety_in_affine", format!("H={h} <= A={a}"), h <= a);
    }
    if let (Some(a), Some(p)) = (a, p) {
        check("affine_in_projective", format!("A={a} <= P={p}"), a <= p);
    }
    if let (Some(p), Some(i), Some(d)) = (p, i, d) {
        check("est1", format!("P={p} <= I+D={}", i + d), p <= i + d);
    }
    if let (Some(p), Some(h), Some(d)) = (p, h, d) {
        check("est2", format!("P={p} <= H+D-1={}", h + d - 1), p + 1 <= h + d);
    }
    if let (Some(p), Some(a), Some(i), Some(d)) = (p, a, i, d) {
        if p > a {
            check("essential", format!("P={p} > A={a} implies P <= I+D-1={}", i + d - 1), p + 1 <= i + d);
        }
    }
    out
}
