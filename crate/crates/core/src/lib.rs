//! Casimir interaction between a dielectric sphere and a dielectric plate.
//!
//! * [`pfa`]: Lifshitz energy density and the proximity force approximation.
//! * [`ntlo`]: leading and next-to-leading order terms of the small-gap
//!   expansion for energy, force and force gradient.
//! * [`pc_series`]: the perfect-conductor anchored series in 1/ω_d.
//! * [`oracle`]: exact scattering-determinant energy for validation.

pub mod constants;
pub mod dielectric;
pub mod error;
pub mod geometry;
pub mod ntlo;
pub mod oracle;
pub mod pc_series;
pub mod pfa;
pub mod quadrature;
pub mod reflection;
pub mod special;

pub use constants::{CONSTANTS, HBAR_C};
pub use dielectric::{DielectricModel, Permittivity, PermittivityTable};
pub use error::{Error, Result};
pub use geometry::Geometry;
pub use ntlo::{ExpansionResult, Kind, QuadratureSettings};

pub use reflection::PolarizationPair;
