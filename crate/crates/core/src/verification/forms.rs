//! Shape operators from the first and second fundamental forms of a
//! parametrized surface, and the κᵇ transform residual.

use crate::curvature::{integral_curve_curvature, ShapeOperator2x2};
use crate::differential::DiffConfig;
use crate::error::{Error, Result};
use crate::geometry::{BTildeField, BuiltinFrame, FrameAxis, FrameComponent, FrameField, Vec3};

pub const MIN_METRIC_DET: f64 = 1e-12;
const FIRST_STEP: f64 = 1e-5;
const SECOND_STEP: f64 = 1e-3;

fn checked(x: Vec3) -> Result<Vec3> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite("surface parametrization"))
    }
}

fn extrapolate(d: impl Fn(f64) -> Result<Vec3>, h: f64) -> Result<Vec3> {
    let coarse = d(h)?;
    let fine = d(0.5 * h)?;
    Ok((fine * 4.0 - coarse) * (1.0 / 3.0))
}

/// `g⁻¹h` of the surface `X(u, v)` at `(u, v)` with `h = −X_αβ·N`, in the
/// orthonormal basis obtained from `(X_u, X_v)` by Gram–Schmidt and with
/// `N ∝ X_u × X_v`. Derivatives of `X` are Richardson-extrapolated central
/// differences whatever the engine in `cfg`.
pub fn shape_operator_via_fundamental_forms(
    surface: &dyn Fn(f64, f64) -> Vec3,
    u: f64,
    v: f64,
    cfg: &DiffConfig,
) -> Result<ShapeOperator2x2> {
    cfg.validate()?;
    let x = |a: f64, b: f64| checked(surface(a, b));
    let xu = extrapolate(|h| Ok((x(u + h, v)? - x(u - h, v)?) * (0.5 / h)), FIRST_STEP)?;
    let xv = extrapolate(|h| Ok((x(u, v + h)? - x(u, v - h)?) * (0.5 / h)), FIRST_STEP)?;
    let centre = x(u, v)?;
    let xuu = extrapolate(
        |h| Ok((x(u + h, v)? - centre * 2.0 + x(u - h, v)?) * (1.0 / (h * h))),
        SECOND_STEP,
    )?;
    let xvv = extrapolate(
        |h| Ok((x(u, v + h)? - centre * 2.0 + x(u, v - h)?) * (1.0 / (h * h))),
        SECOND_STEP,
    )?;
    let xuv = extrapolate(
        |h| Ok((x(u + h, v + h)? - x(u + h, v - h)? - x(u - h, v + h)? + x(u - h, v - h)?) * (0.25 / (h * h))),
        SECOND_STEP,
    )?;

    let g = [[xu.dot(xu), xu.dot(xv)], [xv.dot(xu), xv.dot(xv)]];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if det.is_nan() || det < MIN_METRIC_DET {
        return Err(Error::DegenerateMetric { det });
    }
    let normal = xu.cross(xv).normalize();
    let h = [[-xuu.dot(normal), -xuv.dot(normal)], [-xuv.dot(normal), -xvv.dot(normal)]];
    let g_inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    let l = mul(g_inv, h);

    // Orthonormal e = (X_u, X_v) M with M upper triangular.
    let nu = xu.norm();
    let e1 = xu * (1.0 / nu);
    let w = xv - e1 * e1.dot(xv);
    let nw = w.norm();
    let e2 = w * (1.0 / nw);
    let m = [[1.0 / nu, -e1.dot(xv) / (nu * nw)], [0.0, 1.0 / nw]];
    let m_inv = [[nu, e1.dot(xv)], [0.0, nw]];
    Ok(ShapeOperator2x2 {
        matrix: mul(mul(m_inv, l), m),
        basis: [e1, e2],
        normal,
    })
}

fn mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Re-expresses `shape` in `basis` around `normal`, flipping the sign when
/// the two normals point opposite ways.
pub fn align_shape_operator(shape: &ShapeOperator2x2, basis: [Vec3; 2], normal: Vec3) -> ShapeOperator2x2 {
    let mut out = shape.in_basis(basis);
    if shape.normal.dot(normal) < 0.0 {
        for row in out.matrix.iter_mut() {
            for entry in row.iter_mut() {
                *entry = -*entry;
            }
        }
    }
    out.normal = normal;
    out
}

/// Eigenvalues of a 2×2 matrix with real spectrum, ascending.
pub fn eigenvalues(shape: &ShapeOperator2x2) -> Result<[f64; 2]> {
    let tr = shape.trace();
    let disc = tr * tr - 4.0 * shape.det();
    if disc < -1e-12 * tr.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!("complex eigenvalues (discriminant {disc})")));
    }
    let root = disc.max(0.0).sqrt();
    Ok([0.5 * (tr - root), 0.5 * (tr + root)])
}

/// `|κᵇ − (κᵇ̃ − (t·b̃) κᵗ)/(1 − t·b̃)|` with every curvature taken from
/// the engine. Nonzero in general because `κᵘ` is not linear in `u`.
pub fn kb_transform_residual(frame: &BuiltinFrame, r: Vec3, cfg: &DiffConfig) -> Result<f64> {
    let b_tilde_field = BTildeField(frame);
    let b_tilde = frame
        .b_tilde_at(r)
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no b_tilde field", frame.id().name())))??;
    let f = frame.frame(r)?;
    let kappa_t = integral_curve_curvature(&FrameComponent::new(frame, FrameAxis::T), r, cfg)?;
    let kappa_b = integral_curve_curvature(&FrameComponent::new(frame, FrameAxis::B), r, cfg)?;
    let kappa_bt = integral_curve_curvature(&b_tilde_field, r, cfg)?;
    let tb = f.t().dot(b_tilde);
    let transformed = (kappa_bt - kappa_t * tb) * (1.0 / (1.0 - tb));
    Ok((kappa_b - transformed).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::frame_shape_operator;
    use crate::geometry::{builtin_frame, ClosedFormId};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn scaled_sphere(a: f64, b: f64, c: f64) -> impl Fn(f64, f64) -> Vec3 {
        move |phi, th| Vec3::new(a * phi.cos() * th.sin(), b * phi.sin() * th.sin(), c * th.cos())
    }

    #[test]
    fn sphere_and_plane() {
        let cfg = DiffConfig::dual();
        // (θ, φ) order gives the outward normal.
        let x = scaled_sphere(2.0, 2.0, 2.0);
        let s = shape_operator_via_fundamental_forms(&|th, phi| x(phi, th), 1.1, 0.3, &cfg).unwrap();
        let ev = eigenvalues(&s).unwrap();
        assert!((ev[0] - 0.5).abs() < 1e-7 && (ev[1] - 0.5).abs() < 1e-7, "{ev:?}");
        let plane = |u: f64, v: f64| Vec3::new(u, v, 0.0);
        let p = shape_operator_via_fundamental_forms(&plane, 0.2, -0.4, &cfg).unwrap();
        assert!(p.matrix.iter().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn ellipsoid_leaf_matches_weingarten_route() {
        let cfg = DiffConfig::dual();
        let frame = builtin_frame(ClosedFormId::Ellipsoid { a: 2.0, b: 1.0, c: 1.0 }).unwrap();
        let x = scaled_sphere(2.0, 1.0, 1.0);
        let r = x(FRAC_PI_4, FRAC_PI_3);
        let weingarten = frame_shape_operator(&frame, r, &cfg).unwrap();
        let forms = shape_operator_via_fundamental_forms(&x, FRAC_PI_4, FRAC_PI_3, &cfg).unwrap();
        let aligned = align_shape_operator(&forms, weingarten.basis, weingarten.normal);
        assert!(aligned.max_abs_diff(&weingarten) < 1e-7, "{aligned:?} vs {weingarten:?}");
    }

    #[test]
    fn degenerate_metric() {
        let line = |u: f64, v: f64| Vec3::new(u + v, 0.0, 0.0);
        assert!(matches!(
            shape_operator_via_fundamental_forms(&line, 0.0, 0.0, &DiffConfig::dual()),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn kb_residual_vanishes_where_t_and_b_tilde_are_orthogonal() {
        let cfg = DiffConfig::dual();
        let sphere_like = builtin_frame(ClosedFormId::Ellipsoid { a: 1.0, b: 1.0, c: 1.0 }).unwrap();
        assert!(kb_transform_residual(&sphere_like, scaled_sphere(1.0, 1.0, 1.0)(0.7, 1.2), &cfg).unwrap() < 1e-10);
        let e = builtin_frame(ClosedFormId::Ellipsoid { a: 2.0, b: 1.0, c: 1.0 }).unwrap();
        let x = scaled_sphere(2.0, 1.0, 1.0);
        // On φ = π/2 only t·b̃ vanishes; its derivative along b does not,
        // except on the equator.
        assert!(kb_transform_residual(&e, x(FRAC_PI_2, FRAC_PI_2), &cfg).unwrap() < 1e-8);
        let off_equator = kb_transform_residual(&e, x(FRAC_PI_2, 1.1), &cfg).unwrap();
        assert!((off_equator - 0.3817260789).abs() < 1e-8, "{off_equator}");
        let generic = kb_transform_residual(&e, x(FRAC_PI_4, FRAC_PI_3), &cfg).unwrap();
        assert!((generic - 0.5023).abs() < 1e-3, "{generic}");
    }
}
