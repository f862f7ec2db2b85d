//! Orthonormal frames, frame fields and plain vector fields.

use serde::Serialize;

use crate::differential::{Dual, Scalar};
use crate::error::{Error, Result};

use super::Vec3;

/// Tolerance for analytically constructed frames.
pub const STRICT_FRAME_TOL: f64 = 1e-12;
/// Tolerance for frames assembled by numerical orthonormalization.
pub const LOOSE_FRAME_TOL: f64 = 1e-8;

/// Raw triple `(n, t, b)` without validation; used for dual-number
/// evaluation and for derivative triples such as `(∇_h n, ∇_h t, ∇_h b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame<S = f64> {
    pub n: Vec3<S>,
    pub t: Vec3<S>,
    pub b: Vec3<S>,
}

impl<S: Scalar> Frame<S> {
    pub fn new(n: Vec3<S>, t: Vec3<S>, b: Vec3<S>) -> Self {
        Self { n, t, b }
    }

    pub fn re(&self) -> Frame {
        Frame::new(self.n.re(), self.t.re(), self.b.re())
    }

    pub fn get(&self, axis: FrameAxis) -> Vec3<S> {
        match axis {
            FrameAxis::N => self.n,
            FrameAxis::T => self.t,
            FrameAxis::B => self.b,
        }
    }
}

impl Frame<Dual> {
    pub fn eps(&self) -> Frame {
        Frame::new(self.n.eps(), self.t.eps(), self.b.eps())
    }
}

/// One of the three frame directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FrameAxis {
    N,
    T,
    B,
}

impl FrameAxis {
    pub const ALL: [FrameAxis; 3] = [FrameAxis::N, FrameAxis::T, FrameAxis::B];

    pub fn label(self) -> &'static str {
        match self {
            FrameAxis::N => "n",
            FrameAxis::T => "t",
            FrameAxis::B => "b",
        }
    }
}

/// Validated right-handed orthonormal frame at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FramePoint {
    n: Vec3,
    t: Vec3,
    b: Vec3,
}

impl FramePoint {
    /// Validates unit length, mutual orthogonality and `b = n × t` within
    /// [`STRICT_FRAME_TOL`].
    pub fn new(n: Vec3, t: Vec3, b: Vec3) -> Result<Self> {
        Self::with_tolerance(n, t, b, STRICT_FRAME_TOL)
    }

    /// Same checks with the looser [`LOOSE_FRAME_TOL`].
    pub fn new_loose(n: Vec3, t: Vec3, b: Vec3) -> Result<Self> {
        Self::with_tolerance(n, t, b, LOOSE_FRAME_TOL)
    }

    pub fn with_tolerance(n: Vec3, t: Vec3, b: Vec3, tol: f64) -> Result<Self> {
        if !(n.is_finite() && t.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite("frame vector"));
        }
        let checks = [
            ("|n| - 1", n.norm() - 1.0),
            ("|t| - 1", t.norm() - 1.0),
            ("|b| - 1", b.norm() - 1.0),
            ("n.t", n.dot(t)),
            ("n.b", n.dot(b)),
            ("t.b", t.dot(b)),
            ("|b - n x t|", (b - n.cross(t)).max_abs()),
        ];
        for (name, value) in checks {
            if value.abs() > tol {
                return Err(Error::InvalidFrame(format!("{name} = {value:e} exceeds {tol:e}")));
            }
        }
        Ok(Self { n, t, b })
    }

    /// Fixed Cartesian frame `n = e_z, t = e_x, b = e_y`.
    pub fn canonical() -> Self {
        Self {
            n: Vec3::Z,
            t: Vec3::X,
            b: Vec3::Y,
        }
    }

    pub fn n(&self) -> Vec3 {
        self.n
    }
    pub fn t(&self) -> Vec3 {
        self.t
    }
    pub fn b(&self) -> Vec3 {
        self.b
    }

    pub fn get(&self, axis: FrameAxis) -> Vec3 {
        match axis {
            FrameAxis::N => self.n,
            FrameAxis::T => self.t,
            FrameAxis::B => self.b,
        }
    }

    pub fn as_frame(&self) -> Frame {
        Frame::new(self.n, self.t, self.b)
    }

    /// Largest componentwise distance between two frames.
    pub fn distance(&self, other: &FramePoint) -> f64 {
        (self.n - other.n)
            .max_abs()
            .max((self.t - other.t).max_abs())
            .max((self.b - other.b).max_abs())
    }
}

/// Assignment `r ↦ (n, t, b)` of an orthonormal frame to points of space.
///
/// `frame_dual` lets the dual-number engine differentiate the frame; frames
/// that only exist as black-box callables leave the default, and must be
/// used with the finite-difference engine.
pub trait FrameField: Send + Sync {
    fn frame(&self, r: Vec3) -> Result<FramePoint>;

    fn frame_dual(&self, _r: Vec3<Dual>) -> Result<Frame<Dual>> {
        Err(Error::DualUnsupported)
    }

    /// Number of continuous derivatives the frame is known to have.
    fn smoothness(&self) -> u32 {
        1
    }

    /// Whether `F(ρ r) = F(r)` for all `ρ > 0`.
    fn is_homothetic(&self) -> bool {
        false
    }
}

/// Frame written once against [`Scalar`]; gets both engines for free.
pub trait AnalyticFrame: Send + Sync {
    fn frame_at<S: Scalar>(&self, r: Vec3<S>) -> Result<Frame<S>>;

    fn smoothness(&self) -> u32 {
        2
    }

    fn is_homothetic(&self) -> bool {
        false
    }

    /// Tolerance used to validate real-valued evaluations.
    fn frame_tolerance(&self) -> f64 {
        STRICT_FRAME_TOL
    }
}

impl<T: AnalyticFrame> FrameField for T {
    fn frame(&self, r: Vec3) -> Result<FramePoint> {
        let f = self.frame_at(r)?;
        FramePoint::with_tolerance(f.n, f.t, f.b, self.frame_tolerance())
    }

    fn frame_dual(&self, r: Vec3<Dual>) -> Result<Frame<Dual>> {
        self.frame_at(r)
    }

    fn smoothness(&self) -> u32 {
        AnalyticFrame::smoothness(self)
    }

    fn is_homothetic(&self) -> bool {
        AnalyticFrame::is_homothetic(self)
    }
}

/// Frame backed by an `f64`-only closure; finite differences only.
pub struct ClosureFrame<F> {
    eval: F,
    homothetic: bool,
}

impl<F> ClosureFrame<F>
where
    F: Fn(Vec3) -> Result<FramePoint> + Send + Sync,
{
    pub fn new(eval: F) -> Self {
        Self { eval, homothetic: false }
    }

    pub fn homothetic(mut self, flag: bool) -> Self {
        self.homothetic = flag;
        self
    }
}

impl<F> FrameField for ClosureFrame<F>
where
    F: Fn(Vec3) -> Result<FramePoint> + Send + Sync,
{
    fn frame(&self, r: Vec3) -> Result<FramePoint> {
        (self.eval)(r)
    }

    fn is_homothetic(&self) -> bool {
        self.homothetic
    }
}

/// Vector field `ℝ³ → ℝ³`.
pub trait VectorField: Send + Sync {
    fn eval(&self, r: Vec3) -> Result<Vec3>;

    fn eval_dual(&self, _r: Vec3<Dual>) -> Result<Vec3<Dual>> {
        Err(Error::DualUnsupported)
    }
}

/// Vector field written once against [`Scalar`].
pub trait AnalyticField: Send + Sync {
    fn field_at<S: Scalar>(&self, r: Vec3<S>) -> Result<Vec3<S>>;
}

impl<T: AnalyticField> VectorField for T {
    fn eval(&self, r: Vec3) -> Result<Vec3> {
        self.field_at(r)
    }

    fn eval_dual(&self, r: Vec3<Dual>) -> Result<Vec3<Dual>> {
        self.field_at(r)
    }
}

/// Vector field backed by an `f64`-only closure.
pub struct FnField<F>(pub F);

impl<F> VectorField for FnField<F>
where
    F: Fn(Vec3) -> Result<Vec3> + Send + Sync,
{
    fn eval(&self, r: Vec3) -> Result<Vec3> {
        (self.0)(r)
    }
}

/// One column of a frame field, viewed as a vector field.
#[derive(Clone, Copy)]
pub struct FrameComponent<'a> {
    pub frame: &'a dyn FrameField,
    pub axis: FrameAxis,
}

impl<'a> FrameComponent<'a> {
    pub fn new(frame: &'a dyn FrameField, axis: FrameAxis) -> Self {
        Self { frame, axis }
    }
}

impl VectorField for FrameComponent<'_> {
    fn eval(&self, r: Vec3) -> Result<Vec3> {
        Ok(self.frame.frame(r)?.get(self.axis))
    }

    fn eval_dual(&self, r: Vec3<Dual>) -> Result<Vec3<Dual>> {
        Ok(self.frame.frame_dual(r)?.get(self.axis))
    }
}

/// The unit field `cos(ω) t + sin(ω) b` at a fixed azimuth.
#[derive(Clone, Copy)]
pub struct AzimuthalField<'a> {
    pub frame: &'a dyn FrameField,
    pub omega: f64,
}

impl VectorField for AzimuthalField<'_> {
    fn eval(&self, r: Vec3) -> Result<Vec3> {
        let f = self.frame.frame(r)?;
        Ok(f.t() * self.omega.cos() + f.b() * self.omega.sin())
    }

    fn eval_dual(&self, r: Vec3<Dual>) -> Result<Vec3<Dual>> {
        let f = self.frame.frame_dual(r)?;
        let (s, c) = self.omega.sin_cos();
        Ok(f.t * Dual::constant(c) + f.b * Dual::constant(s))
    }
}

/// Gram–Schmidt step: keeps `t`, returns the unit component of `b_tilde`
/// orthogonal to it.
pub fn orthonormalize(t: Vec3, b_tilde: Vec3) -> Result<(Vec3, Vec3)> {
    if !(t.is_finite() && b_tilde.is_finite()) {
        return Err(Error::NonFinite("orthonormalize input"));
    }
    if (t.norm() - 1.0).abs() > LOOSE_FRAME_TOL {
        return Err(Error::OutOfRange {
            name: "|t|",
            value: t.norm(),
        });
    }
    let residual = b_tilde - t * t.dot(b_tilde);
    let len = residual.norm();
    if len < 1e-10 {
        return Err(Error::ParallelInput { residual: len });
    }
    Ok((t, residual * (1.0 / len)))
}

/// Generic form of [`orthonormalize`] used inside frame formulas.
pub(crate) fn orthonormalize_generic<S: Scalar>(t: Vec3<S>, b_tilde: Vec3<S>) -> Option<Vec3<S>> {
    let residual = b_tilde - t * t.dot(b_tilde);
    let len = residual.norm();
    if len.re() < 1e-10 {
        return None;
    }
    Some(residual * len.recip())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormalize_keeps_orthogonal_input() {
        let (t, b) = orthonormalize(Vec3::X, Vec3::Y).unwrap();
        assert_eq!(t, Vec3::X);
        assert_eq!(b, Vec3::Y);
    }

    #[test]
    fn orthonormalize_removes_the_t_component() {
        let s = 0.5f64.sqrt();
        let (_, b) = orthonormalize(Vec3::X, Vec3::new(s, s, 0.0)).unwrap();
        assert!((b - Vec3::Y).max_abs() < 1e-15);
    }

    #[test]
    fn orthonormalize_rejects_parallel_input() {
        let err = orthonormalize(Vec3::X, Vec3::new(2.0, 1e-12, 0.0)).unwrap_err();
        assert!(matches!(err, Error::ParallelInput { .. }));
    }

    #[test]
    fn frame_point_rejects_left_handed_triples() {
        assert!(FramePoint::new(Vec3::Z, Vec3::X, Vec3::Y).is_ok());
        let err = FramePoint::new(Vec3::Z, Vec3::Y, Vec3::X).unwrap_err();
        assert!(matches!(err, Error::InvalidFrame(_)));
    }

    #[test]
    fn loose_constructor_accepts_small_defects() {
        let t = Vec3::new(1.0, 1e-10, 0.0);
        assert!(FramePoint::new(Vec3::Z, t, Vec3::Y).is_err());
        assert!(FramePoint::new_loose(Vec3::Z, t, Vec3::Y).is_ok());
    }
}
