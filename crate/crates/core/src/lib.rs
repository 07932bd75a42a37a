//! Curvature of surfaces immersed in three-dimensional normed spaces.
//!
//! The normal map defined by Birkhoff orthogonality extends the classical
//! Gauss map to an ambient norm that need not come from an inner product.
//! This crate computes that map and its derived curvatures for parametrized
//! surfaces, integrates the induced area element, builds offset surfaces and
//! tube volumes, runs the two-dimensional circular-curvature analogues, and
//! verifies the quantitative identities relating all of these at desk scale.

pub mod birkhoff;
pub mod error;
pub mod expr;
pub mod geodesic;
pub mod measures;
pub mod norm;
pub mod offsets;
pub mod plane2d;
pub mod quad;
pub mod rng;
pub mod surface;
pub mod verify;

pub use error::{GeoError, Result};
pub use norm::{NormGauge, NormKind, SpherePoint};
pub use surface::{Surface, SurfaceChart};
