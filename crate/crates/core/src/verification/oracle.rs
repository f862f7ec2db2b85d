//! Straight-ray finite-difference oracle for `∇_Ω μ` and `∇_Ω ω`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::differential::DiffConfig;
use crate::error::{Error, Result};
use crate::geometry::{FrameField, Vec3};

pub const DEFAULT_RAY_STEP: f64 = 1e-3;
/// Smallest `1 − μ²` at which the azimuth is still differenced.
pub const RAY_POLAR_GAP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayOracleResult {
    pub dmu_ds: f64,
    pub domega_ds: f64,
    pub step: f64,
    pub richardson_error_estimate: f64,
}

struct Probe {
    mu: f64,
    omega: f64,
}

fn probe(frame: &dyn FrameField, r: Vec3, dir: Vec3, s: f64) -> Result<Probe> {
    let f = frame.frame(r + dir * s).map_err(|e| Error::DomainExit {
        s,
        reason: e.to_string(),
    })?;
    Ok(Probe {
        mu: dir.dot(f.n()),
        omega: dir.dot(f.b()).atan2(dir.dot(f.t())),
    })
}

/// Continues `omega` onto the branch nearest `reference`.
fn unwrap(omega: f64, reference: f64) -> Result<f64> {
    let mut d = (omega - reference) % TAU;
    if d > PI {
        d -= TAU;
    } else if d < -PI {
        d += TAU;
    }
    if d.abs() > FRAC_PI_2 {
        return Err(Error::UnwrapFailure { jump: d });
    }
    Ok(reference + d)
}

/// Differentiates `μ(s) = Ω·n(r + sΩ)` and the unwrapped azimuth `ω(s)`
/// at `s = 0` by central differences at `step` and `step/2`, combined by
/// Richardson extrapolation. Only plain frame evaluations are used, so the
/// result does not depend on the engine in `cfg`.
pub fn ray_oracle(frame: &dyn FrameField, r: Vec3, omega_dir: Vec3, step: f64, cfg: &DiffConfig) -> Result<RayOracleResult> {
    cfg.validate()?;
    if !(r.is_finite() && omega_dir.is_finite()) {
        return Err(Error::NonFinite("ray oracle input"));
    }
    if (omega_dir.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::OutOfRange {
            name: "|Omega|",
            value: omega_dir.norm(),
        });
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::OutOfRange {
            name: "step",
            value: step,
        });
    }
    let centre = probe(frame, r, omega_dir, 0.0)?;
    let gap = 1.0 - centre.mu * centre.mu;
    if gap <= RAY_POLAR_GAP {
        return Err(Error::PolarDirection { gap });
    }

    let diff = |h: f64| -> Result<(f64, f64)> {
        let plus = probe(frame, r, omega_dir, h)?;
        let minus = probe(frame, r, omega_dir, -h)?;
        let wp = unwrap(plus.omega, centre.omega)?;
        let wm = unwrap(minus.omega, centre.omega)?;
        Ok(((plus.mu - minus.mu) / (2.0 * h), (wp - wm) / (2.0 * h)))
    };
    let (mu_h, om_h) = diff(step)?;
    let (mu_h2, om_h2) = diff(0.5 * step)?;
    let dmu_ds = (4.0 * mu_h2 - mu_h) / 3.0;
    let domega_ds = (4.0 * om_h2 - om_h) / 3.0;
    Ok(RayOracleResult {
        dmu_ds,
        domega_ds,
        step,
        richardson_error_estimate: (dmu_ds - mu_h2).abs().max((domega_ds - om_h2).abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_frame, direction_from_angles, ClosedFormId};

    #[test]
    fn canonical_frame_is_straight() {
        let f = builtin_frame(ClosedFormId::Canonical).unwrap();
        let dir = Vec3::new(0.3, -0.4, 0.5).normalize();
        let o = ray_oracle(&f, Vec3::new(1.0, 2.0, 3.0), dir, DEFAULT_RAY_STEP, &DiffConfig::dual()).unwrap();
        assert!(o.dmu_ds.abs() < 1e-13 && o.domega_ds.abs() < 1e-13);
    }

    #[test]
    fn cylinder_i_reference() {
        let f = builtin_frame(ClosedFormId::CylindricalI).unwrap();
        let r = Vec3::new(2.0, 0.0, 0.0);
        let dir = direction_from_angles(&f.frame(r).unwrap(), 0.5, FRAC_PI_2).unwrap();
        let o = ray_oracle(&f, r, dir, DEFAULT_RAY_STEP, &DiffConfig::dual()).unwrap();
        assert!(o.dmu_ds.abs() < 1e-7);
        assert!((o.domega_ds + 0.4330127018922193).abs() < 1e-7);
        assert!(o.richardson_error_estimate >= 0.0);
    }

    #[test]
    fn unwraps_across_the_seam() {
        let f = builtin_frame(ClosedFormId::CylindricalI).unwrap();
        let r = Vec3::new(2.0, 0.0, 0.0);
        let dir = direction_from_angles(&f.frame(r).unwrap(), 0.2, PI).unwrap();
        let o = ray_oracle(&f, r, dir, DEFAULT_RAY_STEP, &DiffConfig::dual()).unwrap();
        assert!(o.domega_ds.abs() < 1e-7, "{o:?}");
    }

    #[test]
    fn refuses_bad_input() {
        let f = builtin_frame(ClosedFormId::CylindricalI).unwrap();
        let cfg = DiffConfig::dual();
        assert!(matches!(
            ray_oracle(&f, Vec3::new(1.0, 0.0, 0.0), Vec3::X * 2.0, 1e-3, &cfg),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            ray_oracle(&f, Vec3::new(1.0, 0.0, 0.0), Vec3::Z, 1e-3, &cfg),
            Err(Error::PolarDirection { .. })
        ));
        assert!(matches!(
            ray_oracle(&f, Vec3::new(1e-3, 0.0, 0.0), -Vec3::X, 1e-3, &cfg),
            Err(Error::DomainExit { .. })
        ));
        // A ray crossing the axis between probes flips the azimuth by π.
        assert!(matches!(
            ray_oracle(&f, Vec3::new(1e-4, 0.0, 0.0), -Vec3::X, 1e-3, &cfg),
            Err(Error::UnwrapFailure { .. })
        ));
    }
}
