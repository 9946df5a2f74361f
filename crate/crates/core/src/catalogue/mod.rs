//! Explicit models: metrics, a connection, expected symmetry dimensions and
//! generator lists.

mod models;
mod verify;

pub use verify::{verify_model, DimensionCheck, FlagCheck, GeneratorCheck, VerificationReport};

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{GeometryError, ParseError};
use crate::expr::Rational;
use crate::geometry::{ConnectionField, MetricField};
use crate::jet::{Geometry, SystemKind};
use crate::symmetry::{FieldKind, FieldParseError, VectorFieldExpr};

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Stated in the source literature.
    Literature,
    /// Obtained by an independent computation.
    Derived,
    /// Immediate from definitions.
    Trivial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Metric,
    Connection,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectedDim {
    pub kind: SystemKind,
    pub value: usize,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectedFlag {
    pub flag: String,
    pub value: bool,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub label: String,
    pub field: VectorFieldExpr,
    pub expected: FieldKind,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    #[serde(serialize_with = "crate::serde_rational::serialize")]
    pub default: Rational,
    pub constraint: &'static str,
}

/// Registry entry.
#[derive(Clone, Debug, Serialize)]
pub struct ModelInfo {
    pub name: &'static str,
    pub kind: ModelKind,
    pub min_dim: usize,
    pub default_dim: usize,
    /// Whether the dimension can vary.
    pub any_dim: bool,
    pub params: Vec<ParamSpec>,
    pub description: &'static str,
}

#[derive(Clone, Debug)]
pub struct ModelDescriptor {
    pub name: String,
    pub params: BTreeMap<String, Rational>,
    pub n: usize,
    pub kind: ModelKind,
    pub expected: Vec<ExpectedDim>,
    pub flags: Vec<ExpectedFlag>,
    pub signature: Option<(usize, usize)>,
    pub generators: Vec<Generator>,
}

impl ModelDescriptor {
    pub fn expected(&self, kind: SystemKind) -> Option<&ExpectedDim> {
        self.expected.iter().find(|e| e.kind == kind)
    }
}

#[derive(Clone, Debug)]
pub enum BuiltGeometry {
    Metric(MetricField),
    Connection(ConnectionField),
}

impl BuiltGeometry {
    pub fn geometry(&self) -> Geometry<'_> {
        match self {
            BuiltGeometry::Metric(g) => Geometry::Metric(g),
            BuiltGeometry::Connection(c) => Geometry::Connection(c),
        }
    }

    pub fn metric(&self) -> Option<&MetricField> {
        match self {
            BuiltGeometry::Metric(g) => Some(g),
            BuiltGeometry::Connection(_) => None,
        }
    }

    pub fn connection(&self) -> ConnectionField {
        self.geometry().connection()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CatalogueError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{model}` has no parameter `{param}`")]
    UnknownParam { model: String, param: String },
    #[error("model `{model}`: {msg}")]
    Constraint { model: String, msg: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Jet(#[from] crate::jet::JetError),
    #[error(transparent)]
    Algebra(#[from] crate::symmetry::AlgebraError),
}

impl From<FieldParseError> for CatalogueError {
    fn from(e: FieldParseError) -> Self {
        match e {
            FieldParseError::Parse(p) => CatalogueError::Parse(p),
            FieldParseError::Geometry(g) => CatalogueError::Geometry(g),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Metric => "metric",
            ModelKind::Connection => "connection",
        })
    }
}

pub fn list_models() -> Vec<ModelInfo> {
    models::registry()
}

/// Builds a model. Missing parameters take their defaults; `n = None`
/// means the default dimension.
pub fn get_model(
    name: &str,
    params: &BTreeMap<String, Rational>,
    n: Option<usize>,
) -> Result<(BuiltGeometry, ModelDescriptor), CatalogueError> {
    let info = list_models()
        .into_iter()
        .find(|m| m.name == name)
        .ok_or_else(|| CatalogueError::UnknownModel(name.to_string()))?;
    let n = n.unwrap_or(info.default_dim);
    if n < info.min_dim || (!info.any_dim && n != info.default_dim) {
        return Err(CatalogueError::Constraint {
            model: name.into(),
            msg: if info.any_dim {
                format!("dimension must be at least {}, got {n}", info.min_dim)
            } else {
                format!("dimension is fixed to {}, got {n}", info.default_dim)
            },
        });
    }
    let mut bound: BTreeMap<String, Rational> = info.params.iter().map(|p| (p.name.to_string(), p.default.clone())).collect();
    for (k, v) in params {
        let accepted = bound.contains_key(k) || (name == "pp_wave_split" && models::is_eps_param(k, n));
        if !accepted {
            return Err(CatalogueError::UnknownParam {
                model: name.into(),
                param: k.clone(),
            });
        }
        bound.insert(k.clone(), v.clone());
    }
    models::build(name, &bound, n)
}
