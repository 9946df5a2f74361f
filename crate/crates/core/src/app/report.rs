use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalogue::{get_model, BuiltGeometry, CatalogueError};
use crate::expr::{fmt_rational, Rational};
use crate::geometry::{projective_weyl, CurvatureFlags};
use crate::jet::profile::default_kinds;
use crate::jet::{symmetry_profile, EstimateCheck, JetError, JetOptions, JetRankReport, SystemKind};
use crate::symmetry::{classify_connection_field, classify_field, FieldKind, VectorFieldExpr};

use super::input::{GeometryFile, InputError};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug)]
pub enum Source {
    Model {
        name: String,
        n: Option<usize>,
        params: BTreeMap<String, Rational>,
    },
    File(GeometryFile),
}

#[derive(Clone, Debug)]
pub struct AnalysisRequest {
    pub source: Source,
    /// Empty means every applicable kind.
    pub kinds: Vec<SystemKind>,
    pub options: JetOptions,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldReport {
    pub name: String,
    pub field: String,
    pub kind: FieldKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub source: String,
    pub n: usize,
    pub metric: bool,
    pub coords: Vec<String>,
    #[serde(with = "crate::serde_rational::map")]
    pub params: BTreeMap<String, Rational>,
    pub signature: Option<(usize, usize)>,
    pub flags: Option<CurvatureFlags>,
    pub projectively_flat: bool,
    pub dim_isometry: Option<usize>,
    pub dim_homothety: Option<usize>,
    pub dim_conformal: Option<usize>,
    pub dim_affine: Option<usize>,
    pub dim_projective: Option<usize>,
    pub degree_of_mobility: Option<usize>,
    pub degree_of_mobility_general: Option<usize>,
    pub confident: bool,
    pub systems: BTreeMap<SystemKind, JetRankReport>,
    pub estimates: Vec<EstimateCheck>,
    pub fields: Vec<FieldReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn violations(&self) -> Vec<&EstimateCheck> {
        self.estimates.iter().filter(|c| !c.holds).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Catalogue(#[from] CatalogueError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Geometry(#[from] crate::error::GeometryError),
}

pub fn run_analysis(req: &AnalysisRequest) -> Result<AnalysisReport, AnalysisError> {
    let (label, built, named_fields, mut options, params) = match &req.source {
        Source::Model { name, n, params } => {
            let (built, desc) = get_model(name, params, *n)?;
            let fields = desc.generators.iter().map(|g| (g.label.clone(), g.field.clone())).collect();
            (format!("catalogue:{name}"), built, fields, req.options.clone(), desc.params)
        }
        Source::File(file) => {
            let loaded = file.load()?;
            let mut opts = req.options.clone();
            if let Some(p) = loaded.point {
                opts.fixed_points.insert(0, p);
            }
            let params = loaded.geometry.connection().chart().params().clone();
            ("file".to_string(), loaded.geometry, loaded.fields, opts, params)
        }
    };
    options.fixed_points.retain(|p| p.len() == built.connection().dim());
    let geom = built.geometry();
    let kinds = if req.kinds.is_empty() {
        default_kinds(&geom)
    } else {
        req.kinds.clone()
    };
    let profile = symmetry_profile(geom, &kinds, &options)?;
    let chart = built.connection().chart().clone();
    let mut warnings = Vec::new();
    let projectively_flat = match &built {
        BuiltGeometry::Metric(_) => profile.flags.as_ref().is_some_and(|f| f.projectively_flat),
        BuiltGeometry::Connection(c) => {
            let w = projective_weyl(c);
            warnings.extend(w.warning);
            w.tensor.is_zero()
        }
    };
    let mut fields = Vec::new();
    for (name, v) in &named_fields {
        fields.push(classify_named(name, v, &built)?);
    }
    Ok(AnalysisReport {
        schema: SCHEMA,
        source: label,
        n: chart.dim(),
        metric: built.metric().is_some(),
        coords: chart.coords().to_vec(),
        params,
        signature: built.metric().map(|g| g.signature()),
        flags: profile.flags.clone(),
        projectively_flat,
        dim_isometry: profile.dim_isometry,
        dim_homothety: profile.dim_homothety,
        dim_conformal: profile.dim_conformal,
        dim_affine: profile.dim_affine,
        dim_projective: profile.dim_projective,
        degree_of_mobility: profile.degree_of_mobility,
        degree_of_mobility_general: profile.degree_of_mobility_general,
        confident: profile.confident(),
        estimates: profile.checks.clone(),
        systems: profile.reports,
        fields,
        warnings,
    })
}

fn classify_named(name: &str, v: &VectorFieldExpr, built: &BuiltGeometry) -> Result<FieldReport, AnalysisError> {
    let c = match built {
        BuiltGeometry::Metric(g) => classify_field(v, g)?,
        BuiltGeometry::Connection(conn) => classify_connection_field(v, conn)?,
    };
    Ok(FieldReport {
        name: name.into(),
        field: v.to_string(),
        kind: c.kind,
        lambda: c.lambda.as_ref().map(fmt_rational),
    })
}
