use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{FrameAxis, FrameComponent, FrameField, Vec3};

use super::integrate::integrate_curve;

/// Largest tolerated `|n·T|` between the leaf normal and the loop tangent.
pub const LEAF_TOL: f64 = 1e-6;

/// Rotation acquired by a tangent vector transported once around a loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolonomyResult {
    /// `residual + 2π · full_turns`.
    pub angle: f64,
    /// Angle from `v0` to the transported vector, in `(−π, π]`.
    pub residual: f64,
    pub full_turns: i64,
    pub samples: usize,
}

fn wrap_pi(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Latitude circle at colatitude `theta` on the sphere of radius `rho`,
/// traced along the sphere frame's `b`-field with `steps` RK4 steps.
pub fn latitude_loop(frame: &dyn FrameField, rho: f64, theta: f64, steps: usize) -> Result<Vec<Vec3>> {
    let start = Vec3::new(rho * theta.sin(), 0.0, rho * theta.cos());
    let b = FrameComponent::new(frame, FrameAxis::B);
    let curve = integrate_curve(&b, start, (0.0, TAU * rho * theta.sin()), steps)?;
    Ok(curve.points)
}

/// Transports `v0` around the closed sampled `loop_points` on the leaf
/// orthogonal to the frame's `n`.
///
/// Each step applies the minimal rotation carrying the normal at one sample
/// to the normal at the next, which keeps the vector tangent and costs only
/// evaluations of `n`. The result is the signed rotation about `n`, with full
/// turns recovered by tracking the vector's angle against the loop tangent:
/// for a simple loop that tangent turns exactly once.
///
/// The loop is closed implicitly; a final sample repeating the first one is
/// dropped.
pub fn parallel_transport_holonomy(frame: &dyn FrameField, loop_points: &[Vec3], v0: Vec3) -> Result<HolonomyResult> {
    let mut pts = loop_points;
    if pts.len() > 1 && (pts[pts.len() - 1] - pts[0]).max_abs() < 1e-6 {
        pts = &pts[..pts.len() - 1];
    }
    let m = pts.len();
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "loop needs at least 3 distinct samples, got {m}"
        )));
    }
    let normals = pts
        .iter()
        .map(|&p| frame.frame(p).map(|f| f.n()).map_err(|e| Error::eval_failure(p, &e)))
        .collect::<Result<Vec<_>>>()?;

    let mut tangents = Vec::with_capacity(m);
    for i in 0..m {
        let chord = pts[(i + 1) % m] - pts[(i + m - 1) % m];
        let len = chord.norm();
        if len == 0.0 {
            return Err(Error::InvalidParameter(format!("repeated loop sample at index {i}")));
        }
        let chord = chord * (1.0 / len);
        let deviation = normals[i].dot(chord).abs();
        if deviation > LEAF_TOL {
            return Err(Error::NotOnLeaf { index: i, deviation });
        }
        let tangent = chord - normals[i] * normals[i].dot(chord);
        tangents.push(tangent.normalize());
    }

    let deviation = normals[0].dot(v0).abs() / v0.norm();
    if deviation.is_nan() || deviation > LEAF_TOL {
        return Err(Error::InvalidParameter(format!(
            "v0 is not tangent at the loop start (|n.v0|/|v0| = {deviation:e})"
        )));
    }
    let start = (v0 - normals[0] * normals[0].dot(v0)).normalize();

    // Angle of v against the tangent T, measured towards n × T.
    let relative = |i: usize, v: Vec3| {
        let t = tangents[i];
        normals[i].dot(t.cross(v)).atan2(t.dot(v))
    };

    let mut v = start;
    let mut phi = relative(0, v);
    let phi0 = phi;
    for k in 1..=m {
        let i = k % m;
        let (nj, ni) = (normals[k - 1], normals[i]);
        let denom = 1.0 + nj.dot(ni);
        if denom < 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "normal flips between samples {} and {i}",
                k - 1
            )));
        }
        v -= (nj + ni) * (ni.dot(v) / denom);
        v = v.normalize();
        let next = relative(i, v);
        phi += wrap_pi(next - wrap_pi(phi));
    }
    let delta = phi - phi0;
    let angle = if delta <= 1e-9 { delta + TAU } else { delta - TAU };
    let residual = wrap_pi(angle);
    let full_turns = ((angle - residual) / TAU).round() as i64;
    Ok(HolonomyResult {
        angle,
        residual,
        full_turns,
        samples: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_frame, ClosedFormId};
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn latitude_loops_match_the_enclosed_area() {
        let frame = builtin_frame(ClosedFormId::Sphere).unwrap();
        for theta in [FRAC_PI_3, 1.2] {
            let pts = latitude_loop(&frame, 1.0, theta, 4000).unwrap();
            let h = parallel_transport_holonomy(&frame, &pts, Vec3::Y).unwrap();
            assert!((h.angle - TAU * (1.0 - theta.cos())).abs() < 1e-5, "{h:?}");
        }
    }

    #[test]
    fn equator_is_one_full_turn() {
        let frame = builtin_frame(ClosedFormId::Sphere).unwrap();
        let pts = latitude_loop(&frame, 1.0, PI / 2.0, 2000).unwrap();
        let h = parallel_transport_holonomy(&frame, &pts, Vec3::Y).unwrap();
        assert_eq!(h.full_turns, 1);
        assert!(h.residual.abs() < 1e-6);
    }

    #[test]
    fn plane_has_trivial_holonomy() {
        let frame = builtin_frame(ClosedFormId::CylindricalI).unwrap();
        let pts: Vec<Vec3> = (0..500)
            .map(|k| {
                let a = TAU * k as f64 / 500.0;
                Vec3::new(1.0 + 0.5 * a.cos(), 0.5 * a.sin(), 0.2)
            })
            .collect();
        let h = parallel_transport_holonomy(&frame, &pts, Vec3::X).unwrap();
        assert!(h.angle.abs() < 1e-12, "{h:?}");
    }

    #[test]
    fn off_leaf_loop_is_rejected() {
        let frame = builtin_frame(ClosedFormId::CylindricalI).unwrap();
        let pts: Vec<Vec3> = (0..100)
            .map(|k| {
                let a = TAU * k as f64 / 100.0;
                Vec3::new(2.0 + a.cos(), 0.0, a.sin())
            })
            .collect();
        let err = parallel_transport_holonomy(&frame, &pts, Vec3::X).unwrap_err();
        assert!(matches!(err, Error::NotOnLeaf { .. }));
    }
}
