use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Vec3, VectorField};

pub const MIN_STEPS: usize = 16;

/// Samples `γ(τ_k)` of an integral curve at uniform parameter spacing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCurve {
    pub tau: Vec<f64>,
    pub points: Vec<Vec3>,
}

impl SampledCurve {
    pub fn start(&self) -> Vec3 {
        self.points[0]
    }

    pub fn end(&self) -> Vec3 {
        *self.points.last().expect("curve has at least two samples")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Traces `dγ/dτ = u(γ)` from `r0` over `tau_span` with fixed-step RK4.
///
/// Any field failure along the way (a degenerate frame point, a non-unit
/// value) stops the integration with [`Error::LeftDomain`].
pub fn integrate_curve(field: &dyn VectorField, r0: Vec3, tau_span: (f64, f64), steps: usize) -> Result<SampledCurve> {
    if steps < MIN_STEPS {
        return Err(Error::InvalidParameter(format!(
            "steps = {steps} is below the minimum {MIN_STEPS}"
        )));
    }
    let (t0, t1) = tau_span;
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::NonFinite("tau span"));
    }
    let h = (t1 - t0) / steps as f64;
    let eval = |step: usize, p: Vec3| -> Result<Vec3> {
        let u = field.eval(p).map_err(|e| Error::LeftDomain {
            step,
            reason: e.to_string(),
        })?;
        let norm = u.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-6 {
            return Err(Error::LeftDomain {
                step,
                reason: format!("field is not unit length at {p} (|u| = {norm})"),
            });
        }
        Ok(u)
    };

    let mut tau = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut p = r0;
    eval(0, p)?;
    tau.push(t0);
    points.push(p);
    for k in 0..steps {
        let k1 = eval(k, p)?;
        let k2 = eval(k, p + k1 * (0.5 * h))?;
        let k3 = eval(k, p + k2 * (0.5 * h))?;
        let k4 = eval(k, p + k3 * h)?;
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        tau.push(t0 + (k + 1) as f64 * h);
        points.push(p);
    }
    eval(steps, p)?;
    Ok(SampledCurve { tau, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_frame, ClosedFormId, FnField, FrameAxis, FrameComponent};
    use std::f64::consts::PI;

    #[test]
    fn straight_segment() {
        let f = FnField(|_| Ok(Vec3::Z));
        let c = integrate_curve(&f, Vec3::zero(), (0.0, 1.0), 16).unwrap();
        assert!((c.end() - Vec3::Z).max_abs() < 1e-15);
        assert_eq!(c.len(), 17);
    }

    #[test]
    fn equator_closes() {
        let frame = builtin_frame(ClosedFormId::Sphere).unwrap();
        let b = FrameComponent::new(&frame, FrameAxis::B);
        let c = integrate_curve(&b, Vec3::X, (0.0, 2.0 * PI), 2000).unwrap();
        assert!((c.end() - c.start()).max_abs() < 1e-6);
    }

    #[test]
    fn cylinder_circle_closes() {
        let frame = builtin_frame(ClosedFormId::CylindricalI).unwrap();
        let b = FrameComponent::new(&frame, FrameAxis::B);
        let c = integrate_curve(&b, Vec3::new(2.0, 0.0, 0.0), (0.0, 4.0 * PI), 2000).unwrap();
        assert!((c.end() - c.start()).max_abs() < 1e-6);
        let halfway = c.points[1000];
        assert!((halfway - Vec3::new(-2.0, 0.0, 0.0)).max_abs() < 1e-6);
    }

    #[test]
    fn crossing_the_axis_leaves_the_domain() {
        let frame = builtin_frame(ClosedFormId::CylindricalII).unwrap();
        let n = FrameComponent::new(&frame, FrameAxis::N);
        // -n points at the axis; tracing n backwards hits it.
        let err = integrate_curve(&n, Vec3::new(1.0, 0.0, 0.0), (0.0, -2.0), 16).unwrap_err();
        assert!(matches!(err, Error::LeftDomain { .. }), "{err}");
    }

    #[test]
    fn too_few_steps() {
        let f = FnField(|_| Ok(Vec3::Z));
        assert!(integrate_curve(&f, Vec3::zero(), (0.0, 1.0), 8).is_err());
    }
}
