//! Numerical laboratory for the scalar-flat Kähler metrics produced by the
//! momentum construction on `C^{n+1}` and on the line bundles `O(-k)`.
//!
//! The crate builds the profile function and its momentum table, evaluates
//! curvature invariants by multivariate jet differentiation, runs the Calabi
//! diastasis obstruction tests and evaluates the Bergman epsilon-function by
//! quadrature.

pub mod bergman;
pub mod calabi;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod jets;
pub mod momentum;
pub mod multijet;
pub mod profile;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use jets::{BiJet, Jet};
pub use profile::BaseData;
pub use scalar::{DoubleDouble, Scalar};
