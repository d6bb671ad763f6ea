pub mod assembly;
pub mod atlas;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::{Rational, Real};

/// Double-precision aliases for the common types.
pub type SpherePointF64 = geometry::SpherePoint<f64>;
pub type NodeSetF64 = geometry::NodeSet<f64>;
pub type RadialProfileF64 = kernels::RadialProfile<f64>;
pub type ZonalProfileF64 = kernels::ZonalProfile<f64>;
pub type EllipticOperatorF64 = kernels::EllipticOperator<f64>;
pub type AtlasF64 = atlas::Atlas<f64>;
pub type GlobalLeastSquaresF64 = assembly::GlobalLeastSquares<f64>;
pub type SolveReportF64 = solver::SolveReport<f64>;
