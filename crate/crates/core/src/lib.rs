pub mod cli;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod operator;
pub mod quadrature;
pub mod report;
pub mod representation;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::SpacePoint;
pub use quadrature::{Estimate, FieldSpec, QuadratureSpec};
pub use spectral::ProblemParams;
