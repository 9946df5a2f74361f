//! Symbolic differential geometry on coordinate charts: exact expressions,
//! curvature, Lie derivatives and symmetry-algebra dimension counts by jet
//! prolongation.

pub mod app;
pub mod catalogue;
pub mod chart;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod serde_rational;
pub mod symmetry;

pub use chart::Chart;
pub use expr::{parse_expr, Expression, RatExpr, Rational};
