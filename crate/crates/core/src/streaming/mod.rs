//! Coefficients of `∂Ψ/∂μ` and `∂Ψ/∂ω` in the streaming term
//!
//! ```text
//! Ω·∇Ψ = Ω·∇ʳΨ + (∇_Ω μ) ∂Ψ/∂μ + (∇_Ω ω) ∂Ψ/∂ω
//! ```
//!
//! With `σ = √(1−μ²)`, `Ω̂∥ = cos ω t + sin ω b` and `Ω̂⊥ = ∂Ω̂∥/∂ω`:
//!
//! ```text
//! ∇_Ω μ = σ² C(ω) − μσ (Ω̂∥·κⁿ)
//! ∇_Ω ω = σ Ω̂⊥·(κᵗ + κᵇ) + μ t·∇ₙb − μ Ω̂⊥ᵀ S Ω̂∥ + (μ²/σ) Ω̂⊥·κⁿ
//! ```
//!
//! The last two terms of `∇_Ω ω` account for `Ω̂∥` itself turning as the
//! ray leaves the point; they vanish when `S` is isotropic and `κⁿ = 0`.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::curvature::{foliation_defect, frame_shape_operator, integral_curve_curvature, shape_operator, winding_term};
use crate::differential::{frame_derivative, DiffConfig};
use crate::error::{Error, Result};
use crate::geometry::{AngularPoint, AzimuthalField, FrameAxis, FrameComponent, FrameField, Vec3, POLAR_GAP};

/// `|V·rot V|` above which the leaves of `V` are treated as nonexistent.
pub const FOLIATION_TOL: f64 = 1e-6;
/// Allowed mismatch between a supplied direction and `(μ, ω, frame)`.
pub const DIRECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MuForm {
    /// `σ² n·κ^{Ω̂∥} − μσ Ω̂∥·κⁿ`, valid without a foliation.
    CurveCurvature,
    /// `σ² C(ω) − μσ Ω̂∥·κⁿ` from the shape operator of the `n`-leaves.
    SurfaceCurvature,
}

impl MuForm {
    pub const ALL: [MuForm; 2] = [MuForm::CurveCurvature, MuForm::SurfaceCurvature];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OmegaForm {
    /// From `t·∇_Ω b`.
    DirectTB,
    /// From `−b·∇_Ω t`.
    DirectBT,
    /// Curvatures of integral curves only.
    CurveCurvature,
    /// Shape operator of the `b`-leaves in the basis `(t, n)`.
    SurfaceB,
    /// Shape operator of the `t`-leaves in the basis `(b, n)`.
    SurfaceT,
}

impl OmegaForm {
    pub const ALL: [OmegaForm; 5] = [
        OmegaForm::DirectTB,
        OmegaForm::DirectBT,
        OmegaForm::CurveCurvature,
        OmegaForm::SurfaceB,
        OmegaForm::SurfaceT,
    ];
}

/// Streaming coefficients at one phase-space point, with the named terms
/// they are assembled from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StreamingCoefficients {
    pub point: Vec3,
    pub at: AngularPoint,
    /// Multiplier of `∂Ψ/∂μ`.
    pub a_mu: f64,
    /// Multiplier of `∂Ψ/∂ω`.
    pub a_omega: f64,
    /// `(1−μ²) C(r, ω)`.
    pub mu_surface: f64,
    /// `−μ√(1−μ²) (Ω̂∥·κⁿ)`.
    pub mu_curve_n: f64,
    /// `(∂Ω∥/∂ω)·(κᵗ + κᵇ)`.
    pub omega_curve: f64,
    /// `μ t·∇ₙb`.
    pub omega_wind: f64,
    /// `−μ Ω̂⊥ᵀ S Ω̂∥`.
    pub omega_leaf: f64,
    /// `μ²/√(1−μ²) (Ω̂⊥·κⁿ)`.
    pub omega_curve_n: f64,
}

impl StreamingCoefficients {
    pub fn mu(&self) -> f64 {
        self.at.mu
    }

    pub fn omega(&self) -> f64 {
        self.at.omega
    }

    pub fn direction(&self) -> Vec3 {
        self.at.direction()
    }

    /// `|a_mu − Σ terms| + |a_omega − Σ terms|`.
    pub fn breakdown_residual(&self) -> f64 {
        (self.a_mu - (self.mu_surface + self.mu_curve_n)).abs()
            + (self.a_omega - (self.omega_curve + self.omega_wind + self.omega_leaf + self.omega_curve_n)).abs()
    }
}

fn angular_point(frame: &dyn FrameField, r: Vec3, mu: f64, omega: f64) -> Result<AngularPoint> {
    if !r.is_finite() {
        return Err(Error::NonFinite("evaluation point"));
    }
    let f = frame.frame(r).map_err(|e| Error::eval_failure(r, &e))?;
    AngularPoint::new(f, mu, omega)
}

fn require_azimuth(mu: f64) -> Result<f64> {
    let gap = 1.0 - mu * mu;
    if gap < POLAR_GAP {
        return Err(Error::PolarDirection { gap });
    }
    Ok(gap.sqrt())
}

fn require_leaves(field: &dyn crate::geometry::VectorField, name: &'static str, r: Vec3, cfg: &DiffConfig) -> Result<()> {
    let defect = foliation_defect(field, r, cfg)?;
    if defect.abs() > FOLIATION_TOL {
        return Err(Error::FoliationMissing { field: name, defect });
    }
    Ok(())
}

/// `∇_Ω μ` in the requested form.
pub fn grad_mu(frame: &dyn FrameField, r: Vec3, mu: f64, omega: f64, form: MuForm, cfg: &DiffConfig) -> Result<f64> {
    let at = angular_point(frame, r, mu, omega)?;
    let sigma2 = 1.0 - mu * mu;
    let sigma = sigma2.max(0.0).sqrt();
    let n = FrameComponent::new(frame, FrameAxis::N);
    let kappa_n = integral_curve_curvature(&n, r, cfg)?;
    let curve_n = -mu * sigma * at.parallel().dot(kappa_n);
    let c = match form {
        MuForm::CurveCurvature => {
            let u = AzimuthalField { frame, omega: at.omega };
            at.frame.n().dot(integral_curve_curvature(&u, r, cfg)?)
        }
        MuForm::SurfaceCurvature => {
            require_leaves(&n, "n", r, cfg)?;
            let shape = frame_shape_operator(frame, r, cfg)?;
            crate::curvature::normal_curvature(&shape, at.omega)
        }
    };
    Ok(sigma2 * c + curve_n)
}

/// `Ω̂⊥ᵀ S Ω̂∥` and `Ω̂⊥·κⁿ` from the `n`-field, via the leaf shape operator.
fn turning_terms_surface(frame: &dyn FrameField, r: Vec3, at: &AngularPoint, cfg: &DiffConfig) -> Result<(f64, f64)> {
    let shape = frame_shape_operator(frame, r, cfg)?;
    let (s, c) = at.omega.sin_cos();
    let kappa_n = integral_curve_curvature(&FrameComponent::new(frame, FrameAxis::N), r, cfg)?;
    Ok((shape.bilinear([-s, c], [c, s]), at.perpendicular().dot(kappa_n)))
}

/// Combines the turning terms into `−μ Ω̂⊥ᵀSΩ̂∥ + (μ²/σ) Ω̂⊥·κⁿ`.
fn turning_correction(mu: f64, sigma: f64, cross: f64, perp_kappa_n: f64) -> f64 {
    -mu * cross + mu * mu / sigma * perp_kappa_n
}

/// `∇_Ω ω` in the requested form.
pub fn grad_omega(frame: &dyn FrameField, r: Vec3, mu: f64, omega: f64, form: OmegaForm, cfg: &DiffConfig) -> Result<f64> {
    let at = angular_point(frame, r, mu, omega)?;
    let sigma = require_azimuth(mu)?;
    let f = at.frame;
    let (s, c) = at.omega.sin_cos();
    let perp = at.perpendicular();
    match form {
        OmegaForm::DirectTB | OmegaForm::DirectBT => {
            let d = frame_derivative(frame, r, at.direction(), cfg)?;
            let main = if form == OmegaForm::DirectTB {
                f.t().dot(d.b)
            } else {
                -f.b().dot(d.t)
            };
            Ok(main - mu / sigma * perp.dot(d.n))
        }
        OmegaForm::CurveCurvature => {
            let comp = |axis| FrameComponent::new(frame, axis);
            let kappa_n = integral_curve_curvature(&comp(FrameAxis::N), r, cfg)?;
            let kappa_t = integral_curve_curvature(&comp(FrameAxis::T), r, cfg)?;
            let kappa_b = integral_curve_curvature(&comp(FrameAxis::B), r, cfg)?;
            let wind = winding_term(frame, r, cfg)?;
            // Ω̂⊥ᵀSΩ̂∥ from normal curvatures along Ω̂∥ ± Ω̂⊥ plus the
            // antisymmetric part n·rot n.
            let n_kappa = |shift: f64| -> Result<f64> {
                let u = AzimuthalField {
                    frame,
                    omega: at.omega + shift,
                };
                Ok(f.n().dot(integral_curve_curvature(&u, r, cfg)?))
            };
            let defect = foliation_defect(&comp(FrameAxis::N), r, cfg)?;
            let cross = 0.5 * (n_kappa(FRAC_PI_4)? - n_kappa(-FRAC_PI_4)?) + 0.5 * defect;
            let curve = sigma * perp.dot(kappa_t + kappa_b);
            Ok(curve + mu * wind + turning_correction(mu, sigma, cross, perp.dot(kappa_n)))
        }
        OmegaForm::SurfaceB => {
            let b = FrameComponent::new(frame, FrameAxis::B);
            require_leaves(&b, "b", r, cfg)?;
            let t = FrameComponent::new(frame, FrameAxis::T);
            let n = FrameComponent::new(frame, FrameAxis::N);
            let shape_b = shape_operator(&b, &t, &n, r, cfg)?;
            let kappa_b = integral_curve_curvature(&b, r, cfg)?;
            let main = shape_b.bilinear([1.0, 0.0], [sigma * c, mu]) - sigma * s * f.t().dot(kappa_b);
            let (cross, perp_kn) = turning_terms_surface(frame, r, &at, cfg)?;
            Ok(main + turning_correction(mu, sigma, cross, perp_kn))
        }
        OmegaForm::SurfaceT => {
            let t = FrameComponent::new(frame, FrameAxis::T);
            require_leaves(&t, "t", r, cfg)?;
            let b = FrameComponent::new(frame, FrameAxis::B);
            let n = FrameComponent::new(frame, FrameAxis::N);
            let shape_t = shape_operator(&t, &b, &n, r, cfg)?;
            let kappa_t = integral_curve_curvature(&t, r, cfg)?;
            let main = -shape_t.bilinear([1.0, 0.0], [sigma * s, mu]) + sigma * c * f.b().dot(kappa_t);
            let (cross, perp_kn) = turning_terms_surface(frame, r, &at, cfg)?;
            Ok(main + turning_correction(mu, sigma, cross, perp_kn))
        }
    }
}

/// Both coefficients and their breakdown, from one set of frame derivatives
/// along `n`, `t` and `b`.
pub fn streaming_coefficients(
    frame: &dyn FrameField,
    r: Vec3,
    mu: f64,
    omega: f64,
    cfg: &DiffConfig,
) -> Result<StreamingCoefficients> {
    let at = angular_point(frame, r, mu, omega)?;
    let sigma = require_azimuth(mu)?;
    let f = at.frame;
    let along_n = frame_derivative(frame, r, f.n(), cfg)?;
    let along_t = frame_derivative(frame, r, f.t(), cfg)?;
    let along_b = frame_derivative(frame, r, f.b(), cfg)?;

    let kappa_n = -along_n.n;
    let kappa_t = -along_t.t;
    let kappa_b = -along_b.b;
    let shape = [
        [f.t().dot(along_t.n), f.t().dot(along_b.n)],
        [f.b().dot(along_t.n), f.b().dot(along_b.n)],
    ];
    let (s, c) = at.omega.sin_cos();
    let quad = |x: [f64; 2], y: [f64; 2]| {
        x[0] * (shape[0][0] * y[0] + shape[0][1] * y[1]) + x[1] * (shape[1][0] * y[0] + shape[1][1] * y[1])
    };
    let parallel = at.parallel();
    let perp = at.perpendicular();

    let mu_surface = sigma * sigma * quad([c, s], [c, s]);
    let mu_curve_n = -mu * sigma * parallel.dot(kappa_n);
    let omega_curve = sigma * perp.dot(kappa_t + kappa_b);
    let omega_wind = mu * f.t().dot(along_n.b);
    let omega_leaf = -mu * quad([-s, c], [c, s]);
    let omega_curve_n = mu * mu / sigma * perp.dot(kappa_n);

    let out = StreamingCoefficients {
        point: r,
        at,
        a_mu: mu_surface + mu_curve_n,
        a_omega: omega_curve + omega_wind + omega_leaf + omega_curve_n,
        mu_surface,
        mu_curve_n,
        omega_curve,
        omega_wind,
        omega_leaf,
        omega_curve_n,
    };
    if !(out.a_mu.is_finite() && out.a_omega.is_finite()) {
        return Err(Error::EvaluationFailure {
            point: r,
            reason: "non-finite streaming coefficient".into(),
        });
    }
    Ok(out)
}

/// `Ω·∇ʳΨ + a_mu ∂Ψ/∂μ + a_omega ∂Ψ/∂ω`.
pub fn apply_streaming(
    coeffs: &StreamingCoefficients,
    omega_dir: Vec3,
    spatial_grad_psi: Vec3,
    dpsi_dmu: f64,
    dpsi_domega: f64,
) -> Result<f64> {
    let deviation = (omega_dir - coeffs.direction()).max_abs();
    if deviation.is_nan() || deviation > DIRECTION_TOL {
        return Err(Error::InconsistentDirection { deviation });
    }
    Ok(omega_dir.dot(spatial_grad_psi) + coeffs.a_mu * dpsi_dmu + coeffs.a_omega * dpsi_domega)
}

/// Spread of all applicable forms at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormSpread {
    /// `max − min` over the evaluated `MuForm`s.
    pub mu: f64,
    /// `max − min` over the evaluated `OmegaForm`s.
    pub omega: f64,
    pub mu_forms: usize,
    pub omega_forms: usize,
}

/// Evaluates every form whose leaves exist within `defect_tol` and
/// reports how far they disagree.
pub fn form_spread(
    frame: &dyn FrameField,
    r: Vec3,
    mu: f64,
    omega: f64,
    defect_tol: f64,
    cfg: &DiffConfig,
) -> Result<FormSpread> {
    let defect = |axis| foliation_defect(&FrameComponent::new(frame, axis), r, cfg).map(f64::abs);
    let (dn, dt, db) = (defect(FrameAxis::N)?, defect(FrameAxis::T)?, defect(FrameAxis::B)?);

    let mut mu_vals = vec![grad_mu(frame, r, mu, omega, MuForm::CurveCurvature, cfg)?];
    if dn < defect_tol {
        mu_vals.push(grad_mu(frame, r, mu, omega, MuForm::SurfaceCurvature, cfg)?);
    }
    let mut omega_vals = Vec::with_capacity(5);
    for form in OmegaForm::ALL {
        let applicable = match form {
            OmegaForm::SurfaceB => db < defect_tol,
            OmegaForm::SurfaceT => dt < defect_tol,
            _ => true,
        };
        if applicable {
            omega_vals.push(grad_omega(frame, r, mu, omega, form, cfg)?);
        }
    }
    let spread = |v: &[f64]| {
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    };
    Ok(FormSpread {
        mu: spread(&mu_vals),
        omega: spread(&omega_vals),
        mu_forms: mu_vals.len(),
        omega_forms: omega_vals.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_frame, BuiltinFrame, ClosedFormId};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn frame(id: ClosedFormId) -> BuiltinFrame {
        builtin_frame(id).unwrap()
    }

    fn spherical(rho: f64, theta: f64, phi: f64) -> Vec3 {
        Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()) * rho
    }

    #[test]
    fn cylinder_i_coefficients() {
        let f = frame(ClosedFormId::CylindricalI);
        let cfg = DiffConfig::dual();
        let r = Vec3::new(2.0, 0.0, 0.7);
        for form in MuForm::ALL {
            assert_eq!(grad_mu(&f, r, 0.3, 1.1, form, &cfg).unwrap(), 0.0);
        }
        let w = grad_omega(&f, r, 0.5, FRAC_PI_2, OmegaForm::DirectTB, &cfg).unwrap();
        assert!((w + 0.75f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_coefficients() {
        let f = frame(ClosedFormId::Sphere);
        let cfg = DiffConfig::dual();
        let r = spherical(2.0, 0.9, 0.4);
        for form in MuForm::ALL {
            assert!((grad_mu(&f, r, 0.5, 2.0, form, &cfg).unwrap() - 0.375).abs() < 1e-12);
        }
        let equator = spherical(1.0, FRAC_PI_2, 0.3);
        assert!(grad_omega(&f, equator, 0.4, 1.0, OmegaForm::DirectTB, &cfg).unwrap().abs() < 1e-12);
        let r = spherical(2.0, PI / 4.0, 0.0);
        assert!((grad_omega(&f, r, 0.0, FRAC_PI_2, OmegaForm::DirectTB, &cfg).unwrap() + 0.5).abs() < 1e-12);

        let c = streaming_coefficients(&f, spherical(1.0, FRAC_PI_3, 1.0), 0.0, FRAC_PI_2, &cfg).unwrap();
        assert!((c.a_mu - 1.0).abs() < 1e-12);
        assert!((c.a_omega + 1.0 / FRAC_PI_3.tan()).abs() < 1e-12);
    }

    #[test]
    fn cylinder_ii_derived_mu_coefficient() {
        let f = frame(ClosedFormId::CylindricalII);
        let cfg = DiffConfig::dual();
        let r = Vec3::new(2.0, 0.0, 0.0);
        assert!((grad_mu(&f, r, 0.0, 0.0, MuForm::SurfaceCurvature, &cfg).unwrap() - 0.5).abs() < 1e-14);
        assert!((grad_mu(&f, r, 0.6, 0.0, MuForm::CurveCurvature, &cfg).unwrap() - 0.32).abs() < 1e-14);
    }

    #[test]
    fn cylinder_ii_azimuth_turns_off_the_special_directions() {
        // Zero at μ = 0 and where sin 2ω = 0; elsewhere the in-plane
        // direction turns as the ray moves around the axis.
        let f = frame(ClosedFormId::CylindricalII);
        let cfg = DiffConfig::dual();
        let r = Vec3::new(2.0, 0.0, 0.0);
        assert!(grad_omega(&f, r, 0.0, 0.8, OmegaForm::DirectTB, &cfg).unwrap().abs() < 1e-14);
        assert!(grad_omega(&f, r, 0.6, 0.0, OmegaForm::DirectTB, &cfg).unwrap().abs() < 1e-14);
        let w = grad_omega(&f, r, 0.6, PI / 4.0, OmegaForm::DirectTB, &cfg).unwrap();
        assert!((w - 0.15).abs() < 1e-14, "{w}");
    }

    #[test]
    fn canonical_frame_has_no_coefficients() {
        let f = frame(ClosedFormId::Canonical);
        let c = streaming_coefficients(&f, Vec3::new(1.0, 1.0, 1.0), 0.3, 1.0, &DiffConfig::dual()).unwrap();
        assert_eq!((c.a_mu, c.a_omega), (0.0, 0.0));
    }

    #[test]
    fn breakdown_sums_to_the_coefficients() {
        let f = frame(ClosedFormId::Ellipsoid { a: 2.0, b: 1.0, c: 1.0 });
        let c = streaming_coefficients(&f, Vec3::new(0.9, 0.4, 0.5), 0.3, 1.0, &DiffConfig::dual()).unwrap();
        assert!(c.breakdown_residual() < 1e-12);
    }

    #[test]
    fn polar_directions_are_refused_for_omega_only() {
        let f = frame(ClosedFormId::Sphere);
        let cfg = DiffConfig::dual();
        let r = spherical(1.0, 1.0, 0.2);
        assert!(matches!(
            grad_omega(&f, r, 1.0, 0.0, OmegaForm::DirectTB, &cfg),
            Err(Error::PolarDirection { .. })
        ));
        for mu in [-1.0, 1.0] {
            assert_eq!(grad_mu(&f, r, mu, 0.3, MuForm::CurveCurvature, &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn surface_forms_need_leaves() {
        // b of the ellipsoid frame is not hypersurface-orthogonal in general.
        let f = frame(ClosedFormId::Ellipsoid { a: 2.0, b: 1.0, c: 0.7 });
        let cfg = DiffConfig::dual();
        let r = Vec3::new(0.9, 0.4, 0.5);
        let b = FrameComponent::new(&f, FrameAxis::B);
        let defect = foliation_defect(&b, r, &cfg).unwrap();
        let res = grad_omega(&f, r, 0.3, 1.0, OmegaForm::SurfaceB, &cfg);
        if defect.abs() > FOLIATION_TOL {
            assert!(matches!(res, Err(Error::FoliationMissing { field: "b", .. })));
        } else {
            assert!(res.is_ok());
        }
    }

    #[test]
    fn apply_streaming_checks_direction() {
        let f = frame(ClosedFormId::Sphere);
        let r = spherical(2.0, 1.0, 0.0);
        let c = streaming_coefficients(&f, r, 0.5, 0.0, &DiffConfig::dual()).unwrap();
        let v = apply_streaming(&c, c.direction(), Vec3::zero(), 1.0, 0.0).unwrap();
        assert!((v - 0.375).abs() < 1e-12);
        assert_eq!(apply_streaming(&c, c.direction(), Vec3::zero(), 0.0, 0.0).unwrap(), 0.0);
        assert!(matches!(
            apply_streaming(&c, Vec3::X, Vec3::zero(), 1.0, 0.0),
            Err(Error::InconsistentDirection { .. })
        ));
    }
}
