//! Reference frame fields with closed-form streaming coefficients.

use std::fmt;
use std::sync::Arc;

use crate::differential::Scalar;
use crate::error::{Error, Result};

use super::frame::{orthonormalize_generic, AnalyticField, AnalyticFrame, Frame};
use super::Vec3;

/// Below this distance from the axis (or below this `sin θ`) the
/// cylindrical and spherical frames are treated as undefined.
pub const AXIS_TOL: f64 = 1e-10;

type Fn2 = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// `f` and its derivatives up to second order, for translating-graph frames.
#[derive(Clone)]
pub struct GraphFunctions {
    pub f: Arc<Fn2>,
    pub f_x: Arc<Fn2>,
    pub f_y: Arc<Fn2>,
    pub f_xx: Arc<Fn2>,
    pub f_xy: Arc<Fn2>,
    pub f_yy: Arc<Fn2>,
}

impl GraphFunctions {
    pub fn new<F, Fx, Fy, Fxx, Fxy, Fyy>(f: F, f_x: Fx, f_y: Fy, f_xx: Fxx, f_xy: Fxy, f_yy: Fyy) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        Fx: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        Fy: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        Fxx: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        Fxy: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        Fyy: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            f_x: Arc::new(f_x),
            f_y: Arc::new(f_y),
            f_xx: Arc::new(f_xx),
            f_xy: Arc::new(f_xy),
            f_yy: Arc::new(f_yy),
        }
    }

    /// `f(x, y) = a x² + b y²`.
    pub fn paraboloid(a: f64, b: f64) -> Self {
        Self::new(
            move |x, y| a * x * x + b * y * y,
            move |x, _| 2.0 * a * x,
            move |_, y| 2.0 * b * y,
            move |_, _| 2.0 * a,
            |_, _| 0.0,
            move |_, _| 2.0 * b,
        )
    }

    /// `f(x, y) = sin x + y²/2`.
    pub fn sine_ridge() -> Self {
        Self::new(
            |x: f64, y: f64| x.sin() + 0.5 * y * y,
            |x: f64, _| x.cos(),
            |_, y| y,
            |x: f64, _| -x.sin(),
            |_, _| 0.0,
            |_, _| 1.0,
        )
    }

    /// Slopes `(f_x, f_y)` lifted into the scalar type, with the Hessian
    /// supplying their derivatives.
    fn slopes<S: Scalar>(&self, x: S, y: S) -> (S, S) {
        let (x0, y0) = (x.re(), y.re());
        let fxy = (self.f_xy)(x0, y0);
        let p = S::lift2(x, y, (self.f_x)(x0, y0), (self.f_xx)(x0, y0), fxy);
        let q = S::lift2(x, y, (self.f_y)(x0, y0), fxy, (self.f_yy)(x0, y0));
        (p, q)
    }
}

impl fmt::Debug for GraphFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GraphFunctions { .. }")
    }
}

/// Selects one of the reference frames.
#[derive(Debug, Clone)]
pub enum ClosedFormId {
    /// `n = e_z`, `t = e_ρ`, `b = e_φ`.
    CylindricalI,
    /// `n = e_ρ`, `t = e_φ`, `b = e_z`.
    CylindricalII,
    /// `n = e_r`, `t = e_θ`, `b = e_φ`.
    Sphere,
    /// Normal of the ellipsoid through `r`, with `t ∝ ∂X/∂θ`.
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// Translates of the graph of `a x² + b y²`.
    Paraboloid { a: f64, b: f64 },
    /// Translates of the graph of a user function.
    Graph(GraphFunctions),
    /// Constant frame `n = e_z`, `t = e_x`, `b = e_y`.
    Canonical,
}

impl ClosedFormId {
    pub fn name(&self) -> &'static str {
        match self {
            ClosedFormId::CylindricalI => "cylindrical-i",
            ClosedFormId::CylindricalII => "cylindrical-ii",
            ClosedFormId::Sphere => "sphere",
            ClosedFormId::Ellipsoid { .. } => "ellipsoid",
            ClosedFormId::Paraboloid { .. } => "paraboloid",
            ClosedFormId::Graph(_) => "graph",
            ClosedFormId::Canonical => "constant",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ClosedFormId::Ellipsoid { a, b, c } => {
                for (name, v) in [("a", a), ("b", b), ("c", c)] {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::OutOfRange { name, value: v });
                    }
                }
                Ok(())
            }
            ClosedFormId::Paraboloid { a, b } => {
                for (name, v) in [("a", a), ("b", b)] {
                    if !v.is_finite() {
                        return Err(Error::OutOfRange { name, value: v });
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_homothetic(&self) -> bool {
        matches!(
            self,
            ClosedFormId::CylindricalI | ClosedFormId::CylindricalII | ClosedFormId::Sphere | ClosedFormId::Ellipsoid { .. }
        )
    }
}

/// A validated reference frame field.
#[derive(Debug, Clone)]
pub struct BuiltinFrame {
    id: ClosedFormId,
}

/// Builds the frame field for `id`.
pub fn builtin_frame(id: ClosedFormId) -> Result<BuiltinFrame> {
    id.validate()?;
    Ok(BuiltinFrame { id })
}

fn degenerate<S: Scalar>(r: Vec3<S>, reason: &'static str) -> Error {
    Error::DegeneratePoint { point: r.re(), reason }
}

fn check_finite<S: Scalar>(r: Vec3<S>) -> Result<()> {
    if r.re().is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("frame evaluation point"))
    }
}

/// Unit vectors `(cos φ, sin φ)` of the azimuth around the z-axis.
fn azimuth<S: Scalar>(r: Vec3<S>) -> Result<(S, S, S)> {
    let rho = (r.x * r.x + r.y * r.y).sqrt();
    if rho.re() < AXIS_TOL {
        return Err(degenerate(r, "on the cylinder axis"));
    }
    Ok((r.x / rho, r.y / rho, rho))
}

/// Azimuth and colatitude of `(x/a, y/b, z/c)`.
struct EllipticAngles<S> {
    cos_phi: S,
    sin_phi: S,
    cos_theta: S,
    sin_theta: S,
}

fn elliptic_angles<S: Scalar>(r: Vec3<S>, a: f64, b: f64, c: f64) -> Result<EllipticAngles<S>> {
    let scaled = Vec3::new(
        r.x * S::from_f64(1.0 / a),
        r.y * S::from_f64(1.0 / b),
        r.z * S::from_f64(1.0 / c),
    );
    let rho = scaled.norm();
    if rho.re() < AXIS_TOL {
        return Err(degenerate(r, "at the origin"));
    }
    let u = scaled * rho.recip();
    let sin_theta = (u.x * u.x + u.y * u.y).sqrt();
    if sin_theta.re() < AXIS_TOL {
        return Err(degenerate(r, "at a pole (sin theta = 0)"));
    }
    Ok(EllipticAngles {
        cos_phi: u.x / sin_theta,
        sin_phi: u.y / sin_theta,
        cos_theta: u.z,
        sin_theta,
    })
}

impl BuiltinFrame {
    pub fn id(&self) -> &ClosedFormId {
        &self.id
    }

    /// The auxiliary unit field `b̃` that the Ellipsoid and graph frames
    /// orthonormalize into `b`. `None` for frames without one.
    pub fn b_tilde_at<S: Scalar>(&self, r: Vec3<S>) -> Option<Result<Vec3<S>>> {
        match &self.id {
            ClosedFormId::Ellipsoid { a, b, c } => Some(
                elliptic_angles(r, *a, *b, *c)
                    .map(|e| Vec3::new(-e.sin_phi * S::from_f64(*a), e.cos_phi * S::from_f64(*b), S::from_f64(0.0)).normalize()),
            ),
            ClosedFormId::Paraboloid { b, .. } => {
                let q = r.y * S::from_f64(2.0 * b);
                Some(Ok(Vec3::new(S::from_f64(0.0), S::from_f64(1.0), q).normalize()))
            }
            ClosedFormId::Graph(g) => {
                let (_, q) = g.slopes(r.x, r.y);
                Some(Ok(Vec3::new(S::from_f64(0.0), S::from_f64(1.0), q).normalize()))
            }
            _ => None,
        }
    }

    fn graph_frame<S: Scalar>(r: Vec3<S>, p: S, q: S) -> Result<Frame<S>> {
        let one = S::from_f64(1.0);
        let zero = S::from_f64(0.0);
        let n = Vec3::new(-p, -q, one).normalize();
        let t = Vec3::new(one, zero, p).normalize();
        let b_tilde = Vec3::new(zero, one, q).normalize();
        let b = orthonormalize_generic(t, b_tilde).ok_or_else(|| degenerate(r, "t and b_tilde are parallel"))?;
        Ok(Frame::new(n, t, b))
    }
}

impl AnalyticFrame for BuiltinFrame {
    fn frame_at<S: Scalar>(&self, r: Vec3<S>) -> Result<Frame<S>> {
        check_finite(r)?;
        let zero = S::from_f64(0.0);
        let one = S::from_f64(1.0);
        match &self.id {
            ClosedFormId::CylindricalI => {
                let (c, s, _) = azimuth(r)?;
                Ok(Frame::new(
                    Vec3::new(zero, zero, one),
                    Vec3::new(c, s, zero),
                    Vec3::new(-s, c, zero),
                ))
            }
            ClosedFormId::CylindricalII => {
                let (c, s, _) = azimuth(r)?;
                Ok(Frame::new(
                    Vec3::new(c, s, zero),
                    Vec3::new(-s, c, zero),
                    Vec3::new(zero, zero, one),
                ))
            }
            ClosedFormId::Sphere => {
                let e = elliptic_angles(r, 1.0, 1.0, 1.0)?;
                let n = Vec3::new(e.cos_phi * e.sin_theta, e.sin_phi * e.sin_theta, e.cos_theta);
                let t = Vec3::new(e.cos_phi * e.cos_theta, e.sin_phi * e.cos_theta, -e.sin_theta);
                let b = Vec3::new(-e.sin_phi, e.cos_phi, zero);
                Ok(Frame::new(n, t, b))
            }
            ClosedFormId::Ellipsoid { a, b, c } => {
                let (sa, sb, sc) = (S::from_f64(*a), S::from_f64(*b), S::from_f64(*c));
                let e = elliptic_angles(r, *a, *b, *c)?;
                let n = Vec3::new(e.cos_phi * e.sin_theta / sa, e.sin_phi * e.sin_theta / sb, e.cos_theta / sc).normalize();
                let t = Vec3::new(e.cos_phi * e.cos_theta * sa, e.sin_phi * e.cos_theta * sb, -e.sin_theta * sc).normalize();
                let b_tilde = Vec3::new(-e.sin_phi * sa, e.cos_phi * sb, zero).normalize();
                let bv = orthonormalize_generic(t, b_tilde).ok_or_else(|| degenerate(r, "t and b_tilde are parallel"))?;
                Ok(Frame::new(n, t, bv))
            }
            ClosedFormId::Paraboloid { a, b } => {
                let p = r.x * S::from_f64(2.0 * a);
                let q = r.y * S::from_f64(2.0 * b);
                Self::graph_frame(r, p, q)
            }
            ClosedFormId::Graph(g) => {
                let (p, q) = g.slopes(r.x, r.y);
                if !(p.re().is_finite() && q.re().is_finite()) {
                    return Err(Error::NonFinite("graph slope"));
                }
                Self::graph_frame(r, p, q)
            }
            ClosedFormId::Canonical => Ok(Frame::new(
                Vec3::new(zero, zero, one),
                Vec3::new(one, zero, zero),
                Vec3::new(zero, one, zero),
            )),
        }
    }

    fn smoothness(&self) -> u32 {
        2
    }

    fn is_homothetic(&self) -> bool {
        self.id.is_homothetic()
    }
}

/// `b̃` of a builtin frame as a vector field.
pub struct BTildeField<'a>(pub &'a BuiltinFrame);

impl AnalyticField for BTildeField<'_> {
    fn field_at<S: Scalar>(&self, r: Vec3<S>) -> Result<Vec3<S>> {
        self.0
            .b_tilde_at(r)
            .unwrap_or_else(|| Err(Error::InvalidParameter(format!("{} has no b_tilde field", self.0.id.name()))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FrameField, FramePoint};

    fn frame(id: ClosedFormId, r: Vec3) -> Result<FramePoint> {
        builtin_frame(id).unwrap().frame(r)
    }

    #[test]
    fn cylindrical_i_at_x_axis() {
        let f = frame(ClosedFormId::CylindricalI, Vec3::new(2.0, 0.0, 0.0)).unwrap();
        assert_eq!(f.n(), Vec3::Z);
        assert_eq!(f.t(), Vec3::X);
        assert_eq!(f.b(), Vec3::Y);
    }

    #[test]
    fn sphere_pole_is_degenerate() {
        let err = frame(ClosedFormId::Sphere, Vec3::new(0.0, 0.0, 3.0)).unwrap_err();
        assert!(matches!(err, Error::DegeneratePoint { .. }));
        let err = frame(ClosedFormId::CylindricalII, Vec3::new(0.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::DegeneratePoint { .. }));
    }

    #[test]
    fn ellipsoid_normal_on_major_axis() {
        let r = Vec3::new(2.0, 0.0, 0.0);
        let id = ClosedFormId::Ellipsoid { a: 2.0, b: 1.0, c: 1.0 };
        let f = frame(id, r).unwrap();
        assert!((f.n() - Vec3::X).max_abs() < 1e-15);
        assert!(FramePoint::new(f.n(), f.t(), f.b()).is_ok());
    }

    #[test]
    fn ellipsoid_rejects_nonpositive_axes() {
        let err = builtin_frame(ClosedFormId::Ellipsoid { a: 2.0, b: 0.0, c: 1.0 }).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { name: "b", .. }));
    }

    #[test]
    fn paraboloid_b_matches_the_closed_form_direction() {
        // Printed b for f = a x² + b y², up to its normalization.
        let (a, b, x, y) = (1.0, 1.0, 0.3, 0.7);
        let f = frame(ClosedFormId::Paraboloid { a, b }, Vec3::new(x, y, 0.4)).unwrap();
        let sp = (4.0 * a * a * x * x + 1.0f64).sqrt();
        let printed = Vec3::new(-4.0 * a * b * x * y / sp, sp, 2.0 * b * y / sp).normalize();
        assert!((f.b() - printed).max_abs() < 1e-10);
    }

    #[test]
    fn graph_of_paraboloid_equals_paraboloid_frame() {
        let r = Vec3::new(0.5, -0.3, 0.1);
        let p = frame(ClosedFormId::Paraboloid { a: 1.0, b: 2.0 }, r).unwrap();
        let g = frame(ClosedFormId::Graph(GraphFunctions::paraboloid(1.0, 2.0)), r).unwrap();
        assert!(p.distance(&g) < 1e-15);
    }

    #[test]
    fn canonical_frame_is_constant() {
        let f = frame(ClosedFormId::Canonical, Vec3::new(-4.0, 1.0, 9.0)).unwrap();
        assert_eq!(f, FramePoint::canonical());
    }
}
