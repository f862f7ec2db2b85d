//! Direction coordinates `(μ, ω)` relative to a frame.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};

use super::{FramePoint, Vec3};

/// Smallest `1 − μ²` for which the azimuth is considered defined.
pub const POLAR_GAP: f64 = 1e-14;

/// Direction `Ω` expressed as `μ = Ω·n` and azimuth `ω` measured from `t`
/// towards `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularPoint {
    pub mu: f64,
    pub omega: f64,
    pub frame: FramePoint,
}

impl AngularPoint {
    pub fn new(frame: FramePoint, mu: f64, omega: f64) -> Result<Self> {
        check_mu(mu)?;
        if !omega.is_finite() {
            return Err(Error::NonFinite("omega"));
        }
        Ok(Self {
            mu,
            omega: wrap_angle(omega),
            frame,
        })
    }

    /// `Ω = μ n + √(1−μ²)(cos ω t + sin ω b)`.
    pub fn direction(&self) -> Vec3 {
        reconstruct(&self.frame, self.mu, self.omega)
    }

    /// Unit in-plane direction `Ω̂∥ = cos ω t + sin ω b`.
    pub fn parallel(&self) -> Vec3 {
        let (s, c) = self.omega.sin_cos();
        self.frame.t() * c + self.frame.b() * s
    }

    /// `∂Ω̂∥/∂ω = −sin ω t + cos ω b`.
    pub fn perpendicular(&self) -> Vec3 {
        let (s, c) = self.omega.sin_cos();
        self.frame.t() * -s + self.frame.b() * c
    }
}

/// Maps an angle into `[0, 2π)`.
pub fn wrap_angle(omega: f64) -> f64 {
    let w = omega.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !mu.is_finite() {
        return Err(Error::NonFinite("mu"));
    }
    if mu.abs() > 1.0 {
        return Err(Error::OutOfRange { name: "mu", value: mu });
    }
    Ok(())
}

fn reconstruct(frame: &FramePoint, mu: f64, omega: f64) -> Vec3 {
    let sigma = (1.0 - mu * mu).max(0.0).sqrt();
    let (s, c) = omega.sin_cos();
    frame.n() * mu + frame.t() * (sigma * c) + frame.b() * (sigma * s)
}

/// Decomposes a unit direction against `frame`.
pub fn angles_from_direction(frame: &FramePoint, omega_dir: Vec3) -> Result<AngularPoint> {
    if !omega_dir.is_finite() {
        return Err(Error::NonFinite("direction"));
    }
    let len = omega_dir.norm();
    if (len - 1.0).abs() > 1e-10 {
        return Err(Error::OutOfRange {
            name: "|Omega|",
            value: len,
        });
    }
    let mu = omega_dir.dot(frame.n()).clamp(-1.0, 1.0);
    let gap = 1.0 - mu * mu;
    if gap < POLAR_GAP {
        return Err(Error::PolarDirection { gap });
    }
    let omega = wrap_angle(omega_dir.dot(frame.b()).atan2(omega_dir.dot(frame.t())));
    Ok(AngularPoint {
        mu,
        omega,
        frame: *frame,
    })
}

/// Rebuilds the unit direction with coordinates `(μ, ω)`.
pub fn direction_from_angles(frame: &FramePoint, mu: f64, omega: f64) -> Result<Vec3> {
    check_mu(mu)?;
    if !omega.is_finite() {
        return Err(Error::NonFinite("omega"));
    }
    Ok(reconstruct(frame, mu, omega))
}
