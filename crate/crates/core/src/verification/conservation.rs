//! Sampled feasibility test for a conservation form of the streaming term.
//!
//! A conservation form with factors `f(r)`, `g(r)` needs `κⁿ = 0` and a
//! leaf normal curvature `C(r, ω)` independent of `ω`. The known factor
//! pairs are `(1, 1)` for flat leaves and `(ρ, 1)` for spherical ones.

use serde::Serialize;

use crate::curvature::{frame_shape_operator, integral_curve_curvature, normal_curvature};
use crate::differential::DiffConfig;
use crate::error::{Error, Result};
use crate::geometry::{FrameAxis, FrameComponent, FrameField, Vec3};

pub const CONSERVATION_TOL: f64 = 1e-8;
pub const DEFAULT_SPATIAL_SAMPLES: usize = 64;
pub const DEFAULT_ANGULAR_SAMPLES: usize = 16;
pub const MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConservationReason {
    KappaNNonzero,
    CDependsOnOmega,
    Feasible,
}

/// A conservation-form factor as a function of position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConservationFactor {
    /// The constant 1.
    Unity,
    /// Radius of curvature `1/C(r)` of the leaf through `r`; equals `ρ`
    /// for spheres about the origin.
    LeafRadius,
}

impl ConservationFactor {
    pub fn label(self) -> &'static str {
        match self {
            ConservationFactor::Unity => "1",
            ConservationFactor::LeafRadius => "rho",
        }
    }

    pub fn evaluate(self, frame: &dyn FrameField, r: Vec3, cfg: &DiffConfig) -> Result<f64> {
        match self {
            ConservationFactor::Unity => Ok(1.0),
            ConservationFactor::LeafRadius => Ok(1.0 / normal_curvature(&frame_shape_operator(frame, r, cfg)?, 0.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport {
    pub feasible: bool,
    pub reason: ConservationReason,
    pub f_factor: Option<ConservationFactor>,
    pub g_factor: Option<ConservationFactor>,
    /// Number of `(r, ω)` evaluations of `C`.
    pub samples_checked: usize,
    pub max_kappa_n: f64,
    /// Largest `max_ω C − min_ω C` over the spatial samples.
    pub max_c_spread: f64,
}

impl Serialize for ConservationReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ConservationReport", 7)?;
        st.serialize_field("feasible", &self.feasible)?;
        st.serialize_field("reason", &self.reason)?;
        st.serialize_field("f", &self.f_factor.map(ConservationFactor::label))?;
        st.serialize_field("g", &self.g_factor.map(ConservationFactor::label))?;
        st.serialize_field("samples_checked", &self.samples_checked)?;
        st.serialize_field("max_kappa_n", &self.max_kappa_n)?;
        st.serialize_field("max_c_spread", &self.max_c_spread)?;
        st.end()
    }
}

pub fn conservation_check(
    frame: &dyn FrameField,
    sample_points: &[Vec3],
    sample_angles: &[(f64, f64)],
    cfg: &DiffConfig,
) -> Result<ConservationReport> {
    conservation_check_with_tolerance(frame, sample_points, sample_angles, CONSERVATION_TOL, cfg)
}

pub fn conservation_check_with_tolerance(
    frame: &dyn FrameField,
    sample_points: &[Vec3],
    sample_angles: &[(f64, f64)],
    tol: f64,
    cfg: &DiffConfig,
) -> Result<ConservationReport> {
    if sample_points.len() < MIN_SAMPLES || sample_angles.len() < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "conservation check needs at least {MIN_SAMPLES} spatial and {MIN_SAMPLES} angular samples, got {} and {}",
            sample_points.len(),
            sample_angles.len()
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::OutOfRange {
            name: "tolerance",
            value: tol,
        });
    }
    let n = FrameComponent::new(frame, FrameAxis::N);
    let mut max_kappa_n = 0.0f64;
    let mut max_spread = 0.0f64;
    let mut max_c = 0.0f64;
    let mut samples = 0;
    for &r in sample_points {
        max_kappa_n = max_kappa_n.max(integral_curve_curvature(&n, r, cfg)?.max_abs());
        let shape = frame_shape_operator(frame, r, cfg)?;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(_, omega) in sample_angles {
            let c = normal_curvature(&shape, omega);
            lo = lo.min(c);
            hi = hi.max(c);
            max_c = max_c.max(c.abs());
            samples += 1;
        }
        max_spread = max_spread.max(hi - lo);
    }
    let reason = if max_kappa_n >= tol {
        ConservationReason::KappaNNonzero
    } else if max_spread >= tol {
        ConservationReason::CDependsOnOmega
    } else {
        ConservationReason::Feasible
    };
    let feasible = reason == ConservationReason::Feasible;
    let (f_factor, g_factor) = match (feasible, max_c > tol) {
        (false, _) => (None, None),
        (true, true) => (Some(ConservationFactor::LeafRadius), Some(ConservationFactor::Unity)),
        (true, false) => (Some(ConservationFactor::Unity), Some(ConservationFactor::Unity)),
    };
    Ok(ConservationReport {
        feasible,
        reason,
        f_factor,
        g_factor,
        samples_checked: samples,
        max_kappa_n,
        max_c_spread: max_spread,
    })
}
