//! Random non-degenerate phase-space states for each reference frame.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{ClosedFormId, Vec3};

pub const MU_LIMIT: f64 = 0.99;

/// Deterministic generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A point away from the degenerate set of `id`.
pub fn sample_point(id: &ClosedFormId, rng: &mut impl Rng) -> Vec3 {
    match *id {
        ClosedFormId::CylindricalI | ClosedFormId::CylindricalII => {
            let rho = rng.gen_range(0.5..3.0);
            let phi = rng.gen_range(0.0..TAU);
            Vec3::new(rho * phi.cos(), rho * phi.sin(), rng.gen_range(-2.0..2.0))
        }
        ClosedFormId::Sphere => scaled_spherical(rng, 1.0, 1.0, 1.0),
        ClosedFormId::Ellipsoid { a, b, c } => scaled_spherical(rng, a, b, c),
        ClosedFormId::Paraboloid { .. } | ClosedFormId::Graph(_) => {
            Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }
        ClosedFormId::Canonical => Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
    }
}

fn scaled_spherical(rng: &mut impl Rng, a: f64, b: f64, c: f64) -> Vec3 {
    let rho = rng.gen_range(0.5..3.0);
    let theta = rng.gen_range(0.2..PI - 0.2);
    let phi = rng.gen_range(0.0..TAU);
    Vec3::new(a * phi.cos() * theta.sin(), b * phi.sin() * theta.sin(), c * theta.cos()) * rho
}

/// `(μ, ω)` with `|μ| ≤ 0.99`.
pub fn sample_angles(rng: &mut impl Rng) -> (f64, f64) {
    (rng.gen_range(-MU_LIMIT..MU_LIMIT), rng.gen_range(0.0..TAU))
}

pub fn sample_state(id: &ClosedFormId, rng: &mut impl Rng) -> (Vec3, f64, f64) {
    let r = sample_point(id, rng);
    let (mu, omega) = sample_angles(rng);
    (r, mu, omega)
}
