//! Streaming term `Ω·∇Ψ` of kinetic transport equations in the direction
//! coordinates `(μ, ω)` of an arbitrary orthonormal frame field.
//!
//! The coefficients of `∂Ψ/∂μ` and `∂Ψ/∂ω` are assembled from curvatures of
//! the frame: integral-curve curvatures `κᵘ = −∇ᵤu`, the shape operator of
//! the leaves orthogonal to `n`, and the winding `t·∇ₙb`. Every value can be
//! cross-checked against straight-ray differencing and closed forms in
//! [`verification`].

pub mod curvature;
pub mod differential;
pub mod error;
pub mod geometry;
pub mod streaming;
pub mod verification;

pub use differential::{DiffConfig, Dual, Engine, Scalar};
pub use error::{Error, Result};
pub use geometry::{FrameField, FramePoint, Vec3};
