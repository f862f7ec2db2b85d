use thiserror::Error;

use crate::geometry::Vec3;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("frame is undefined at {point}: {reason}")]
    DegeneratePoint { point: Vec3, reason: &'static str },

    #[error("vector to orthonormalize is parallel to the reference vector (residual {residual:e})")]
    ParallelInput { residual: f64 },

    #[error("direction is parallel to n (1 - mu^2 = {gap:e}); azimuth is undefined")]
    PolarDirection { gap: f64 },

    #[error("{name} = {value} is outside its admissible range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("non-finite input for {0}")]
    NonFinite(&'static str),

    #[error("field evaluation failed at probe point {point}: {reason}")]
    EvaluationFailure { point: Vec3, reason: String },

    #[error("field is not unit length at {point} (|u| = {norm})")]
    NotUnitField { point: Vec3, norm: f64 },

    #[error("tangent vector is degenerate (|gamma'| = {norm:e})")]
    DegenerateTangent { norm: f64 },

    #[error("integral curve left the field domain at step {step}: {reason}")]
    LeftDomain { step: usize, reason: String },

    #[error("loop sample {index} is not tangent to the leaf (|n . T| = {deviation:e})")]
    NotOnLeaf { index: usize, deviation: f64 },

    #[error("leaf orthogonal to {field} does not exist here (V . rot V = {defect:e})")]
    FoliationMissing { field: &'static str, defect: f64 },

    #[error("direction disagrees with the (mu, omega, frame) reconstruction by {deviation:e}")]
    InconsistentDirection { deviation: f64 },

    #[error("ray probe at s = {s} left the frame domain: {reason}")]
    DomainExit { s: f64, reason: String },

    #[error("azimuth jumped by {jump} rad between ray probes; reduce the step")]
    UnwrapFailure { jump: f64 },

    #[error("state is outside the closed-form entry's valid region: {0}")]
    OutsideValidRegion(String),

    #[error("metric tensor is degenerate (det g = {det:e})")]
    DegenerateMetric { det: f64 },

    #[error("frame point fails orthonormality: {0}")]
    InvalidFrame(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "the dual-number engine needs a field with a dual evaluation; use the finite-difference engine for black-box callables"
    )]
    DualUnsupported,
}

impl Error {
    pub(crate) fn eval_failure(point: Vec3, err: &Error) -> Error {
        match err {
            Error::EvaluationFailure { .. } | Error::DualUnsupported => err.clone(),
            other => Error::EvaluationFailure {
                point,
                reason: other.to_string(),
            },
        }
    }
}
