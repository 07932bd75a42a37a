//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("unit-sphere curvature is not positive ({value:e}); the norm violates the nonvanishing-curvature assumption at this point")]
    DegenerateCurvature { value: f64 },

    #[error("quadrature did not converge: successive refinements differ by {change:e} (tolerance {tol:e})")]
    QuadratureNotConverged { change: f64, tol: f64 },

    #[error("chart is degenerate at (u, v) = ({u}, {v}): |phi_u x phi_v| = {cross_norm:e}")]
    DegenerateChart { u: f64, v: f64, cross_norm: f64 },

    #[error("differential of the Birkhoff normal is not tangent: residual {residual:e} exceeds {limit:e}")]
    TangencyViolation { residual: f64, limit: f64 },

    #[error("offset {c} is a focal distance: denominator {denom:e} vanishes")]
    SingularOffset { c: f64, denom: f64 },

    #[error("offset {eps} exceeds the safe bound {max_safe}")]
    UnsafeOffset { eps: f64, max_safe: f64 },

    #[error("mean curvature is not positive everywhere (min H = {min_h:e})")]
    NonPositiveMeanCurvature { min_h: f64 },

    #[error("circular curvature is not positive everywhere (min k_c = {min_kc:e})")]
    NonPositiveCurvature { min_kc: f64 },

    #[error("enclosed-volume integral is negative ({value:e}); surface orientation is inward")]
    OrientationError { value: f64 },

    #[error("geodesic ray left the chart domain at s = {s}")]
    RayEscapedAtlas { s: f64 },

    #[error("geodesic integrator step size underflow at s = {s}")]
    StepSizeUnderflow { s: f64 },

    #[error("geodesic circle deficit is below the noise floor; the point is flat")]
    FlatPoint,

    #[error("config error: {0}")]
    ConfigError(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
