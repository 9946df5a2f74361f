//! Metrics, connections and curvature tensors over a chart.

mod connection;
mod curvature;
mod metric;
mod tensor;

pub use connection::{covariant_derivative, levi_civita, ConnectionField};
pub use curvature::{
    constant_curvature, conformal_weyl, cotton_tensor, curvature_flags, curvature_suite, move_index,
    projective_weyl, ricci, riemann, riemann_lowered, riemann_norm_sq, scalar_curvature, CurvatureFlags,
    CurvatureSuite, WeylResult,
};
pub use metric::{admissible, determinant, find_base_point, inverse, MetricField};
pub use tensor::{SlotSymmetry, TensorField, Variance};
