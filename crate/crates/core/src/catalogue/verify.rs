use std::collections::BTreeMap;

use serde::Serialize;

use crate::expr::Rational;
use crate::geometry::{curvature_flags, levi_civita, projective_weyl, ricci, riemann};
use crate::jet::{symmetry_profile, Geometry, JetOptions, SymmetryReport, SystemKind};
use crate::symmetry::{algebra_check, classify_connection_field, classify_field, AlgebraMode, FieldKind, StructureConstantsTable};

use super::{get_model, BuiltGeometry, CatalogueError, ModelDescriptor, Provenance};

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorCheck {
    pub label: String,
    pub field: String,
    pub expected: FieldKind,
    pub actual: FieldKind,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionCheck {
    pub kind: SystemKind,
    pub expected: usize,
    pub provenance: Provenance,
    pub computed: usize,
    pub confident: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlagCheck {
    pub flag: String,
    pub expected: bool,
    pub computed: bool,
    pub provenance: Provenance,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub model: String,
    pub n: usize,
    #[serde(with = "crate::serde_rational::map")]
    pub params: BTreeMap<String, Rational>,
    pub generators: Vec<GeneratorCheck>,
    /// Structure constants of the generators, when all of them are projective.
    pub algebra: Option<StructureConstantsTable>,
    pub dimensions: Vec<DimensionCheck>,
    pub flags: Vec<FlagCheck>,
    pub signature: Option<((usize, usize), (usize, usize))>,
    pub profile: SymmetryReport,
    pub ok: bool,
}

fn computed_flag(built: &BuiltGeometry, flag: &str) -> Option<bool> {
    match built {
        BuiltGeometry::Metric(g) => {
            let f = curvature_flags(g);
            match flag {
                "flat" => Some(f.flat),
                "projectively_flat" => Some(f.projectively_flat),
                "conformally_flat" => Some(f.conformally_flat),
                "ricci_flat" => Some(ricci(&riemann(&levi_civita(g))).is_zero()),
                _ => None,
            }
        }
        BuiltGeometry::Connection(c) => match flag {
            "projectively_flat" => Some(projective_weyl(c).tensor.is_zero()),
            "flat" => Some(riemann(c).is_zero()),
            _ => None,
        },
    }
}

/// Checks every stated fact about a model: generator kinds, closure of the
/// generator algebra, symmetry dimensions and curvature flags.
pub fn verify_model(
    name: &str,
    params: &BTreeMap<String, Rational>,
    n: Option<usize>,
    opts: &JetOptions,
) -> Result<VerificationReport, CatalogueError> {
    let (built, desc) = get_model(name, params, n)?;
    verify_built(&built, &desc, opts)
}

pub(crate) fn verify_built(
    built: &BuiltGeometry,
    desc: &ModelDescriptor,
    opts: &JetOptions,
) -> Result<VerificationReport, CatalogueError> {
    let geom = built.geometry();
    let mut generators = Vec::new();
    for gen in &desc.generators {
        let actual = match geom {
            Geometry::Metric(g) => classify_field(&gen.field, g)?.kind,
            Geometry::Connection(c) => classify_connection_field(&gen.field, c)?.kind,
        };
        generators.push(GeneratorCheck {
            label: gen.label.clone(),
            field: gen.field.to_string(),
            expected: gen.expected,
            actual,
            ok: actual == gen.expected,
        });
    }
    let algebra = if !desc.generators.is_empty() && generators.iter().all(|g| g.actual.is_projective()) {
        let fields: Vec<_> = desc.generators.iter().map(|g| g.field.clone()).collect();
        Some(algebra_check(&fields, geom, AlgebraMode::Unchecked)?)
    } else {
        None
    };

    let kinds: Vec<SystemKind> = {
        let mut k: Vec<SystemKind> = desc.expected.iter().map(|e| e.kind).collect();
        k.sort();
        k.dedup();
        k
    };
    let profile = symmetry_profile(geom, &kinds, opts)?;
    let dimensions: Vec<DimensionCheck> = desc
        .expected
        .iter()
        .map(|e| {
            let rep = &profile.reports[&e.kind];
            DimensionCheck {
                kind: e.kind,
                expected: e.value,
                provenance: e.provenance,
                computed: rep.stabilized_dim,
                confident: rep.confident,
                ok: rep.stabilized_dim == e.value,
            }
        })
        .collect();
    let flags: Vec<FlagCheck> = desc
        .flags
        .iter()
        .filter_map(|f| {
            computed_flag(built, &f.flag).map(|computed| FlagCheck {
                flag: f.flag.clone(),
                expected: f.value,
                computed,
                provenance: f.provenance,
                ok: computed == f.value,
            })
        })
        .collect();
    let signature = match (desc.signature, built.metric()) {
        (Some(s), Some(g)) => Some((s, g.signature())),
        _ => None,
    };
    let algebra_ok = algebra.as_ref().is_none_or(|a| a.closure_ok && a.jacobi_ok);
    let ok = generators.iter().all(|g| g.ok)
        && dimensions.iter().all(|d| d.ok)
        && flags.iter().all(|f| f.ok)
        && signature.is_none_or(|(a, b)| a == b)
        && algebra_ok
        && profile.violations().is_empty();
    Ok(VerificationReport {
        model: desc.name.clone(),
        n: desc.n,
        params: desc.params.clone(),
        generators,
        algebra,
        dimensions,
        flags,
        signature,
        profile,
        ok,
    })
}
