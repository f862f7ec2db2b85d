//! Curvatures of integral curves and leaves, the foliation defect, the
//! winding term, and curve/loop integration for holonomy.

mod holonomy;
mod integrate;

pub use holonomy::{latitude_loop, parallel_transport_holonomy, HolonomyResult};
pub use integrate::{integrate_curve, SampledCurve, MIN_STEPS};

use serde::Serialize;

use crate::differential::{curl, directional_derivative, frame_derivative, DiffConfig};
use crate::error::{Error, Result};
use crate::geometry::{FrameAxis, FrameComponent, FrameField, Vec3, VectorField};

/// `|u| − 1` tolerated by curvature operations.
pub const UNIT_TOL: f64 = 1e-6;
/// Below this normal component a parametrized curve counts as straight.
pub const STRAIGHT_TOL: f64 = 1e-14;

fn unit_value(field: &dyn VectorField, r: Vec3) -> Result<Vec3> {
    let u = field.eval(r).map_err(|e| Error::eval_failure(r, &e))?;
    let norm = u.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitField { point: r, norm });
    }
    Ok(u)
}

/// `κᵘ = −∇ᵤu`, the curvature vector of the integral curve of `u` through `r`.
pub fn integral_curve_curvature(field: &dyn VectorField, r: Vec3, cfg: &DiffConfig) -> Result<Vec3> {
    let u = unit_value(field, r)?;
    Ok(-directional_derivative(field, r, u, cfg)?)
}

/// Arc-length curvature vector of a curve with velocity `γ′` and
/// acceleration `γ″` in an arbitrary parametrization.
///
/// Points along the component of `−γ″` normal to `γ′`, with magnitude
/// `|γ′ × γ″| / |γ′|³`.
pub fn curvature_from_parametrization(gamma_prime: Vec3, gamma_double_prime: Vec3) -> Result<Vec3> {
    if !(gamma_prime.is_finite() && gamma_double_prime.is_finite()) {
        return Err(Error::NonFinite("curve derivatives"));
    }
    let speed = gamma_prime.norm();
    if speed <= 1e-12 {
        return Err(Error::DegenerateTangent { norm: speed });
    }
    let tangent = gamma_prime * (1.0 / speed);
    let normal = gamma_double_prime - tangent * tangent.dot(gamma_double_prime);
    let len = normal.norm();
    if len < STRAIGHT_TOL {
        return Ok(Vec3::zero());
    }
    let magnitude = gamma_prime.cross(gamma_double_prime).norm() / speed.powi(3);
    Ok(normal * (-magnitude / len))
}

/// Matrix `S[α][β] = T_α · ∇_{T_β} N` in the ordered basis `(T₁, T₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeOperator2x2 {
    pub matrix: [[f64; 2]; 2],
    pub basis: [Vec3; 2],
    pub normal: Vec3,
}

impl ShapeOperator2x2 {
    pub fn zero(normal: Vec3, basis: [Vec3; 2]) -> Self {
        Self {
            matrix: [[0.0; 2]; 2],
            basis,
            normal,
        }
    }

    /// Twice the mean curvature.
    pub fn trace(&self) -> f64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    /// Gauss curvature.
    pub fn det(&self) -> f64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    /// `S[1][0] − S[0][1]`; equals `N·rot N` for a unit normal field.
    pub fn antisymmetry(&self) -> f64 {
        self.matrix[1][0] - self.matrix[0][1]
    }

    /// `xᵀ S y` for coordinates in the stored basis.
    pub fn bilinear(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        let m = &self.matrix;
        x[0] * (m[0][0] * y[0] + m[0][1] * y[1]) + x[1] * (m[1][0] * y[0] + m[1][1] * y[1])
    }

    /// The same operator in another orthonormal basis of the tangent plane.
    pub fn in_basis(&self, basis: [Vec3; 2]) -> Self {
        // R[i][k] = new_i · old_k
        let r = [
            [basis[0].dot(self.basis[0]), basis[0].dot(self.basis[1])],
            [basis[1].dot(self.basis[0]), basis[1].dot(self.basis[1])],
        ];
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.bilinear(r[i], r[j]);
            }
        }
        Self {
            matrix: out,
            basis,
            normal: self.normal,
        }
    }

    pub fn max_abs_diff(&self, other: &ShapeOperator2x2) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.matrix[i][j] - other.matrix[i][j]).abs());
            }
        }
        m
    }
}

/// Shape operator of the leaf with normal field `normal`, in the basis
/// `(basis1, basis2)`, computed from the Weingarten form.
pub fn shape_operator(
    normal: &dyn VectorField,
    basis1: &dyn VectorField,
    basis2: &dyn VectorField,
    r: Vec3,
    cfg: &DiffConfig,
) -> Result<ShapeOperator2x2> {
    let e = |f: &dyn VectorField| f.eval(r).map_err(|err| Error::eval_failure(r, &err));
    let (nv, t1, t2) = (e(normal)?, e(basis1)?, e(basis2)?);
    let d1 = directional_derivative(normal, r, t1, cfg)?;
    let d2 = directional_derivative(normal, r, t2, cfg)?;
    Ok(ShapeOperator2x2 {
        matrix: [[t1.dot(d1), t1.dot(d2)], [t2.dot(d1), t2.dot(d2)]],
        basis: [t1, t2],
        normal: nv,
    })
}

/// Shape operator of the leaf orthogonal to `n`, in the frame's `(t, b)`.
pub fn frame_shape_operator(frame: &dyn FrameField, r: Vec3, cfg: &DiffConfig) -> Result<ShapeOperator2x2> {
    shape_operator(
        &FrameComponent::new(frame, FrameAxis::N),
        &FrameComponent::new(frame, FrameAxis::T),
        &FrameComponent::new(frame, FrameAxis::B),
        r,
        cfg,
    )
}

/// `C(ω) = (cos ω, sin ω) S (cos ω, sin ω)ᵀ`, the normal curvature in the
/// direction at azimuth `ω` from the first basis vector.
pub fn normal_curvature(shape: &ShapeOperator2x2, omega: f64) -> f64 {
    let (s, c) = omega.sin_cos();
    shape.bilinear([c, s], [c, s])
}

/// `V·rot V`; zero exactly when the planes orthogonal to `V` integrate to
/// leaves near `r`.
pub fn foliation_defect(field: &dyn VectorField, r: Vec3, cfg: &DiffConfig) -> Result<f64> {
    let v = unit_value(field, r)?;
    Ok(v.dot(curl(field, r, cfg)?))
}

/// Largest tolerated `|t·∇ₙb + b·∇ₙt|` in [`winding_term`].
pub const WINDING_ANTISYMMETRY_TOL: f64 = 1e-8;

/// `t·∇ₙb`, the rate at which `(t, b)` turns about `n` along `γⁿ`.
pub fn winding_term(frame: &dyn FrameField, r: Vec3, cfg: &DiffConfig) -> Result<f64> {
    let f = frame.frame(r).map_err(|e| Error::eval_failure(r, &e))?;
    let d = frame_derivative(frame, r, f.n(), cfg)?;
    let tb = f.t().dot(d.b);
    let bt = f.b().dot(d.t);
    let skew = (tb + bt).abs();
    if skew > WINDING_ANTISYMMETRY_TOL * (1.0 + tb.abs()) {
        return Err(Error::EvaluationFailure {
            point: r,
            reason: format!("t.grad_n b + b.grad_n t = {skew:e}; frame derivative is not antisymmetric"),
        });
    }
    Ok(tb)
}

/// All curvature quantities of a frame at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub point: Vec3,
    pub kappa_n: Vec3,
    pub kappa_t: Vec3,
    pub kappa_b: Vec3,
    /// Shape operator of the leaf orthogonal to `n`, basis `(t, b)`.
    pub shape_n: ShapeOperator2x2,
    pub winding: f64,
    pub foliation_defect_n: f64,
}

impl CurvatureReport {
    /// Scalar entries in a fixed order, for scaling and comparison checks.
    pub fn entries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(15);
        for v in [self.kappa_n, self.kappa_t, self.kappa_b] {
            out.extend(v.to_array());
        }
        for row in self.shape_n.matrix {
            out.extend(row);
        }
        out.push(self.winding);
        out.push(self.foliation_defect_n);
        out
    }
}

pub fn curvature_report(frame: &dyn FrameField, r: Vec3, cfg: &DiffConfig) -> Result<CurvatureReport> {
    let n = FrameComponent::new(frame, FrameAxis::N);
    let t = FrameComponent::new(frame, FrameAxis::T);
    let b = FrameComponent::new(frame, FrameAxis::B);
    Ok(CurvatureReport {
        point: r,
        kappa_n: integral_curve_curvature(&n, r, cfg)?,
        kappa_t: integral_curve_curvature(&t, r, cfg)?,
        kappa_b: integral_curve_curvature(&b, r, cfg)?,
        shape_n: shape_operator(&n, &t, &b, r, cfg)?,
        winding: winding_term(frame, r, cfg)?,
        foliation_defect_n: foliation_defect(&n, r, cfg)?,
    })
}
