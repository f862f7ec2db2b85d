//! Directional derivatives, Jacobians and curls with two interchangeable
//! engines: forward-mode dual numbers and central finite differences.

mod dual;

pub use dual::{Dual, Scalar};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Frame, FrameField, Vec3, VectorField};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const MIN_FD_STEP: f64 = 1e-9;
pub const MAX_FD_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Engine {
    DualNumber,
    CentralDifference,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::DualNumber => "dual",
            Engine::CentralDifference => "fd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffConfig {
    pub engine: Engine,
    pub fd_step: f64,
    pub richardson: bool,
}

impl Default for DiffConfig {
    fn default() -> Self {
        Self::dual()
    }
}

impl DiffConfig {
    pub fn dual() -> Self {
        Self {
            engine: Engine::DualNumber,
            fd_step: DEFAULT_FD_STEP,
            richardson: false,
        }
    }

    pub fn central_difference() -> Self {
        Self {
            engine: Engine::CentralDifference,
            fd_step: DEFAULT_FD_STEP,
            richardson: true,
        }
    }

    pub fn with_step(mut self, fd_step: f64) -> Result<Self> {
        self.fd_step = fd_step;
        self.validate()?;
        Ok(self)
    }

    pub fn with_richardson(mut self, richardson: bool) -> Self {
        self.richardson = richardson;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_FD_STEP..=MAX_FD_STEP).contains(&self.fd_step) {
            return Err(Error::InvalidParameter(format!(
                "fd_step = {:e} must lie in [{MIN_FD_STEP:e}, {MAX_FD_STEP:e}]",
                self.fd_step
            )));
        }
        Ok(())
    }
}

/// 3×3 matrix whose column `j` is `∂field/∂x_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jacobian3 {
    pub columns: [Vec3; 3],
}

impl Jacobian3 {
    pub fn zero() -> Self {
        Self {
            columns: [Vec3::default(); 3],
        }
    }

    /// Entry `(i, j) = ∂field_i/∂x_j`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }

    pub fn apply(&self, h: Vec3) -> Vec3 {
        self.columns[0] * h.x + self.columns[1] * h.y + self.columns[2] * h.z
    }

    /// Curl from the antisymmetric part.
    pub fn curl(&self) -> Vec3 {
        Vec3::new(
            self.entry(2, 1) - self.entry(1, 2),
            self.entry(0, 2) - self.entry(2, 0),
            self.entry(1, 0) - self.entry(0, 1),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.columns.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }
}

/// Central difference of a vector-valued map along `h`, optionally
/// Richardson-extrapolated. The step is applied to the unit direction and
/// the result rescaled by `|h|`, so the derivative is linear in `h`.
fn central<const K: usize>(eval: impl Fn(Vec3) -> Result<[Vec3; K]>, r: Vec3, h: Vec3, cfg: &DiffConfig) -> Result<[Vec3; K]> {
    let len = h.norm();
    if len == 0.0 {
        return Ok([Vec3::default(); K]);
    }
    let dir = h * (1.0 / len);
    let probe = |p: Vec3| eval(p).map_err(|e| Error::eval_failure(p, &e));
    let diff = |step: f64| -> Result<[Vec3; K]> {
        let plus = probe(r + dir * step)?;
        let minus = probe(r - dir * step)?;
        Ok(std::array::from_fn(|k| (plus[k] - minus[k]) * (1.0 / (2.0 * step))))
    };
    let coarse = diff(cfg.fd_step)?;
    let out = if cfg.richardson {
        let fine = diff(0.5 * cfg.fd_step)?;
        std::array::from_fn(|k| (fine[k] * 4.0 - coarse[k]) * (1.0 / 3.0))
    } else {
        coarse
    };
    Ok(std::array::from_fn(|k| out[k] * len))
}

fn check_inputs(r: Vec3, h: Vec3) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::NonFinite("evaluation point"));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite("direction"));
    }
    Ok(())
}

/// `(h·∇) field` at `r`.
pub fn directional_derivative(field: &dyn VectorField, r: Vec3, h: Vec3, cfg: &DiffConfig) -> Result<Vec3> {
    check_inputs(r, h)?;
    match cfg.engine {
        Engine::DualNumber => field
            .eval_dual(r.seeded(h))
            .map(|v| v.eps())
            .map_err(|e| Error::eval_failure(r, &e)),
        Engine::CentralDifference => {
            cfg.validate()?;
            central(|p| field.eval(p).map(|v| [v]), r, h, cfg).map(|[d]| d)
        }
    }
}

pub fn jacobian(field: &dyn VectorField, r: Vec3, cfg: &DiffConfig) -> Result<Jacobian3> {
    Ok(Jacobian3 {
        columns: [
            directional_derivative(field, r, Vec3::X, cfg)?,
            directional_derivative(field, r, Vec3::Y, cfg)?,
            directional_derivative(field, r, Vec3::Z, cfg)?,
        ],
    })
}

pub fn curl(field: &dyn VectorField, r: Vec3, cfg: &DiffConfig) -> Result<Vec3> {
    Ok(jacobian(field, r, cfg)?.curl())
}

/// `(∇ₕn, ∇ₕt, ∇ₕb)` in one pass.
pub fn frame_derivative(frame: &dyn FrameField, r: Vec3, h: Vec3, cfg: &DiffConfig) -> Result<Frame> {
    check_inputs(r, h)?;
    match cfg.engine {
        Engine::DualNumber => frame
            .frame_dual(r.seeded(h))
            .map(|f| f.eps())
            .map_err(|e| Error::eval_failure(r, &e)),
        Engine::CentralDifference => {
            cfg.validate()?;
            let [n, t, b] = central(|p| frame.frame(p).map(|f| [f.n(), f.t(), f.b()]), r, h, cfg)?;
            Ok(Frame::new(n, t, b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_frame, ClosedFormId, FnField, FrameAxis, FrameComponent};

    struct Identity;
    impl crate::geometry::AnalyticField for Identity {
        fn field_at<S: Scalar>(&self, r: Vec3<S>) -> Result<Vec3<S>> {
            Ok(r)
        }
    }

    struct Square;
    impl crate::geometry::AnalyticField for Square {
        fn field_at<S: Scalar>(&self, r: Vec3<S>) -> Result<Vec3<S>> {
            let z = S::from_f64(0.0);
            Ok(Vec3::new(r.x * r.x, z, z))
        }
    }

    struct Swirl;
    impl crate::geometry::AnalyticField for Swirl {
        fn field_at<S: Scalar>(&self, r: Vec3<S>) -> Result<Vec3<S>> {
            Ok(Vec3::new(-r.y, r.x, S::from_f64(0.0)))
        }
    }

    fn engines() -> [DiffConfig; 2] {
        [DiffConfig::dual(), DiffConfig::central_difference()]
    }

    #[test]
    fn identity_and_square_fields() {
        for cfg in engines() {
            let d = directional_derivative(&Identity, Vec3::new(0.3, -1.0, 2.0), Vec3::new(1.0, 2.0, 3.0), &cfg).unwrap();
            assert!((d - Vec3::new(1.0, 2.0, 3.0)).max_abs() < 1e-9);
            let d = directional_derivative(&Square, Vec3::new(3.0, 0.0, 0.0), Vec3::X, &cfg).unwrap();
            assert!((d - Vec3::new(6.0, 0.0, 0.0)).max_abs() < 1e-8);
        }
    }

    #[test]
    fn jacobian_of_identity_and_constant() {
        for cfg in engines() {
            let j = jacobian(&Identity, Vec3::new(1.0, 2.0, 3.0), &cfg).unwrap();
            for i in 0..3 {
                for k in 0..3 {
                    let expected = if i == k { 1.0 } else { 0.0 };
                    assert!((j.entry(i, k) - expected).abs() < 1e-9);
                }
            }
            let constant = FnField(|_| Ok(Vec3::new(1.0, 2.0, 3.0)));
            if cfg.engine == Engine::CentralDifference {
                assert_eq!(jacobian(&constant, Vec3::X, &cfg).unwrap().max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn swirl_curl() {
        for cfg in engines() {
            let c = curl(&Swirl, Vec3::new(0.4, 0.1, -2.0), &cfg).unwrap();
            assert!((c - Vec3::new(0.0, 0.0, 2.0)).max_abs() < 1e-9);
        }
    }

    #[test]
    fn radial_field_derivative_on_cylinder() {
        let frame = builtin_frame(ClosedFormId::CylindricalII).unwrap();
        let n = FrameComponent::new(&frame, FrameAxis::N);
        let r = Vec3::new(2.0, 0.0, 0.0);
        let dual = directional_derivative(&n, r, Vec3::Y, &DiffConfig::dual()).unwrap();
        let fd = directional_derivative(&n, r, Vec3::Y, &DiffConfig::central_difference()).unwrap();
        assert!((dual - Vec3::new(0.0, 0.5, 0.0)).max_abs() < 1e-15);
        assert!((dual - fd).max_abs() < 1e-8);
    }

    #[test]
    fn sphere_normal_jacobian() {
        let frame = builtin_frame(ClosedFormId::Sphere).unwrap();
        let n = FrameComponent::new(&frame, FrameAxis::N);
        // The pole itself is degenerate for the frame; use a nearby point
        // only through the n-field, which is smooth there.
        let r = Vec3::new(1e-3, 0.0, 2.0);
        for cfg in engines() {
            let j = jacobian(&n, r, &cfg).unwrap();
            assert!((j.entry(0, 0) - 0.5).abs() < 1e-6);
            assert!((j.entry(1, 1) - 0.5).abs() < 1e-6);
            assert!(j.entry(2, 2).abs() < 1e-6);
        }
    }

    #[test]
    fn probes_across_the_axis_fail_cleanly() {
        let frame = builtin_frame(ClosedFormId::CylindricalI).unwrap();
        let t = FrameComponent::new(&frame, FrameAxis::T);
        let cfg = DiffConfig::central_difference().with_step(1e-2).unwrap();
        let err = directional_derivative(&t, Vec3::new(5e-3, 0.0, 0.0), Vec3::X, &cfg).unwrap_err();
        assert!(matches!(err, Error::EvaluationFailure { .. }), "{err}");
    }

    #[test]
    fn dual_engine_refuses_black_box_fields() {
        let f = FnField(|r: Vec3| Ok(r));
        let err = directional_derivative(&f, Vec3::X, Vec3::Y, &DiffConfig::dual()).unwrap_err();
        assert_eq!(err, Error::DualUnsupported);
    }

    #[test]
    fn step_bounds_are_enforced() {
        assert!(DiffConfig::central_difference().with_step(1e-10).is_err());
        assert!(DiffConfig::central_difference().with_step(0.1).is_err());
        assert!(DiffConfig::central_difference().with_step(1e-3).is_ok());
    }
}
