//! Dimension counts for finite-type linear PDE systems by jet prolongation.

pub mod field;
pub mod profile;
pub mod prolong;
pub mod series;
pub mod system;

pub use profile::{symmetry_profile, EstimateCheck, SymmetryReport};
pub use prolong::{prolong_to_order, solution_dimension, Backend, ConstraintMatrix, JetOptions, JetRankReport, RunRecord};
pub use system::{build_system, Equation, Geometry, JetTerm, LinearPdeSystem, SystemKind, Unknown};

use crate::error::GeometryError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("the {0} system needs a metric")]
    NeedsMetric(SystemKind),
    #[error("the {0} system is not of finite type in dimension 2")]
    NotFiniteType(SystemKind),
    #[error("no stabilization of the {kind} system within the order cap (d = {d_sequence:?})")]
    NoStabilization { kind: SystemKind, d_sequence: Vec<usize> },
    #[error("no admissible evaluation point found")]
    NoAdmissiblePoint,
    #[error("the evaluation point lies on the excluded locus")]
    ExcludedPoint,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
