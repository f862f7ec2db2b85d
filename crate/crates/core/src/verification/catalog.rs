//! Closed-form streaming coefficients of the reference frames.
//!
//! Ellipsoid, paraboloid and graph coefficients are assembled from the
//! printed auxiliary expressions, kept verbatim. Several of those
//! expressions are erroneous; each entry lists what is known to be wrong.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{builtin_frame, ClosedFormId, FrameField, FramePoint, GraphFunctions, Vec3, AXIS_TOL};

/// Value of a named auxiliary expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Auxiliary {
    Scalar(f64),
    Vector(Vec3),
}

impl Auxiliary {
    pub fn scalar(&self) -> Option<f64> {
        match *self {
            Auxiliary::Scalar(v) => Some(v),
            Auxiliary::Vector(_) => None,
        }
    }

    pub fn vector(&self) -> Option<Vec3> {
        match *self {
            Auxiliary::Vector(v) => Some(v),
            Auxiliary::Scalar(_) => None,
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            Auxiliary::Scalar(v) => v.is_finite(),
            Auxiliary::Vector(v) => v.is_finite(),
        }
    }
}

pub type Auxiliaries = BTreeMap<&'static str, Auxiliary>;

/// How the catalog values of an entry are meant to be used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogTrust {
    /// Compared against the engine with a hard tolerance.
    Asserted,
    /// Compared and reported, never failing.
    ReportOnly,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: ClosedFormId,
    pub valid_region: &'static str,
    pub errata: Vec<&'static str>,
    pub trust: CatalogTrust,
}

pub fn catalog_entry(id: &ClosedFormId) -> CatalogEntry {
    let (valid_region, errata, trust): (_, Vec<&'static str>, _) = match id {
        ClosedFormId::CylindricalI => ("x² + y² > 0", vec![], CatalogTrust::Asserted),
        ClosedFormId::CylindricalII => (
            "x² + y² > 0",
            vec![
                "printed a_mu carries √(1−μ²) where the derivation gives (1−μ²); coefficients() uses the derived form",
                "printed a_omega = 0 drops −μ Ω̂⊥ᵀSΩ̂∥ = μ sin ω cos ω / ρ",
            ],
            CatalogTrust::Asserted,
        ),
        ClosedFormId::Sphere => ("x² + y² > 0", vec![], CatalogTrust::Asserted),
        ClosedFormId::Ellipsoid { .. } => (
            "not at the origin, 0 < θ < π",
            vec![
                "k_n prints sin φ where sin²φ is needed; kept verbatim",
                "printed κⁿ is +∇ₙn rather than −∇ₙn",
                "printed κᵗ has the right magnitude but a different direction",
                "κᵇ transform assumes κᵘ is linear in u",
                "printed b·∇ₙt differs from the finite-difference value",
                "curve form of C drops cos ω sin ω (n·∇_t b + n·∇_b t)",
                "a_omega omits the turning of Ω̂∥ along the ray",
            ],
            CatalogTrust::ReportOnly,
        ),
        ClosedFormId::Paraboloid { .. } | ClosedFormId::Graph(_) => (
            "all (x, y)",
            vec![
                "printed shape-operator entries, Ω∥·κⁿ, κᵗ·b, κᵇ·t and b·∇_t n disagree with the normalized frame",
                "printed S is not symmetric although n·rot n = 0",
                "a_omega omits the turning of Ω̂∥ along the ray",
            ],
            CatalogTrust::ReportOnly,
        ),
        ClosedFormId::Canonical => ("everywhere", vec![], CatalogTrust::Asserted),
    };
    CatalogEntry {
        id: id.clone(),
        valid_region,
        errata,
        trust,
    }
}

fn outside(msg: impl Into<String>) -> Error {
    Error::OutsideValidRegion(msg.into())
}

fn check_mu(mu: f64) -> Result<f64> {
    if !(mu.is_finite() && (-1.0..=1.0).contains(&mu)) {
        return Err(Error::OutOfRange { name: "mu", value: mu });
    }
    Ok((1.0 - mu * mu).sqrt())
}

fn axis_distance(r: Vec3) -> Result<f64> {
    let rho = r.x.hypot(r.y);
    if rho.is_nan() || rho < AXIS_TOL {
        return Err(outside(format!("{r} is on the z-axis")));
    }
    Ok(rho)
}

/// `(ρ, φ, θ)` of `r` in the scaled spherical chart of the ellipsoid.
pub fn ellipsoid_coordinates(r: Vec3, a: f64, b: f64, c: f64) -> Result<(f64, f64, f64)> {
    let s = Vec3::new(r.x / a, r.y / b, r.z / c);
    let rho = s.norm();
    if rho.is_nan() || rho < AXIS_TOL {
        return Err(outside(format!("{r} is at the origin")));
    }
    let lateral = s.x.hypot(s.y);
    if lateral / rho < AXIS_TOL {
        return Err(outside(format!("{r} is at a pole")));
    }
    Ok((rho, s.y.atan2(s.x), lateral.atan2(s.z)))
}

/// The engine's frame at `r`, used only to project printed vectors.
fn frame_at(id: &ClosedFormId, r: Vec3) -> Result<FramePoint> {
    builtin_frame(id.clone())?.frame(r).map_err(|e| outside(e.to_string()))
}

/// Printed ellipsoid auxiliaries.
fn ellipsoid_auxiliaries(r: Vec3, a: f64, b: f64, c: f64) -> Result<Auxiliaries> {
    let (rho, phi, th) = ellipsoid_coordinates(r, a, b, c)?;
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = th.sin_cos();
    let (a2, b2, c2) = (a * a, b * b, c * c);

    let kt_num = Vec3::new(a * st * cp, b * st * sp, c * ct) * (c2 * ((a2 - b2) * (2.0 * phi).cos() + a2 + b2)).sqrt();
    let kt_den = 2f64.sqrt()
        * rho
        * (ct * ct * (a2 * cp * cp + b2 * sp * sp) + c2 * st * st).powf(1.5)
        * (st * st * (a2 * cp * cp + b2 * sp * sp) + c2 * ct * ct).sqrt();

    let kbt_num = Vec3::new(a * st * cp, b * st * sp, 0.0) * (a2 * b2 * st.powi(4)).sqrt();
    let kbt_den = rho * (st * st * (a2 * sp * sp + b2 * cp * cp)).powf(1.5) * (st * st * (a2 * cp * cp + b2 * sp * sp)).sqrt();

    let kn_num = Vec3::new(
        a * cp * st * (b.powi(4) * (c2 - a2) * ct * ct + c.powi(4) * (b2 - a2) * sp * sp * st * st),
        b * sp * st * (a.powi(4) * (c2 - b2) * ct * ct + c.powi(4) * (a2 - b2) * cp * cp * st * st),
        c * st * st * ct * (a.powi(4) * (b2 - c2) * sp * sp - b.powi(4) * (c2 - a2) * cp * cp),
    );
    let kn_den = rho * (c2 * st * st * (a2 * sp + b2 * cp * cp) + a2 * b2 * ct * ct).powi(2);

    let w = a * b * c * (a2 - b2) * sp * cp * ct
        / ((rho * (a2 * sp * sp + b2 * cp * cp)) * (a2 * b2 * ct * ct + c2 * st * st * (a2 * sp * sp + b2 * cp * cp)));
    let tb = (b2 - a2) * cp * ct * sp * st
        / (st * st * (a2 * sp * sp + b2 * cp * cp) * (a2 * cp * cp * ct * ct + b2 * ct * ct * sp * sp + c2 * st * st)).sqrt();

    let kappa_t = kt_num * (1.0 / kt_den);
    let kappa_bt = kbt_num * (1.0 / kbt_den);
    let kappa_b = (kappa_bt - kappa_t * tb) * (1.0 / (1.0 - tb));
    Ok(BTreeMap::from([
        ("kappa_t", Auxiliary::Vector(kappa_t)),
        ("kappa_b_tilde", Auxiliary::Vector(kappa_bt)),
        ("kappa_b", Auxiliary::Vector(kappa_b)),
        ("kappa_n", Auxiliary::Vector(kn_num * (1.0 / kn_den))),
        ("b_grad_n_t", Auxiliary::Scalar(w)),
        ("t_dot_b_tilde", Auxiliary::Scalar(tb)),
    ]))
}

/// Printed paraboloid auxiliaries for `f = a x² + b y²`.
fn paraboloid_auxiliaries(r: Vec3, a: f64, b: f64) -> Auxiliaries {
    let (x, y) = (r.x, r.y);
    let p = 4.0 * a * a * x * x + 1.0;
    let q = 4.0 * b * b * y * y + 1.0;
    let (sp, sq) = (p.sqrt(), q.sqrt());
    let d = sp * sq - 4.0 * a * b * x * y;
    let w = 4.0 * a * a * x * x + 4.0 * b * b * y * y + 1.0;
    let axy = 4.0 * a * b * x * y;
    BTreeMap::from([
        ("S_tt", Auxiliary::Scalar(-2.0 * a / (p * sq))),
        (
            "S_tb",
            Auxiliary::Scalar(8.0 * a * a * b * x * y * (sp * sq + axy) / (p * sq * w)),
        ),
        (
            "S_bt",
            Auxiliary::Scalar(8.0 * a * a * b * x * y * (sp * sq - axy) / (p * sq * w)),
        ),
        (
            "S_bb",
            Auxiliary::Scalar(-2.0 * b * (16.0 * a.powi(3) * b * x * x * y * y / sq + 4.0 * a * a * x * x * sp + sp) / (p * w)),
        ),
        ("t_dot_kappa_n", Auxiliary::Scalar(4.0 * a * a * x / (p.powf(1.5) * q))),
        (
            "b_dot_kappa_n",
            Auxiliary::Scalar(4.0 * b * y * (-4.0 * a.powi(3) * x * x + 4.0 * a * a * b * x * x + b) / (p.powf(1.5) * q * d)),
        ),
        ("b_dot_kappa_t", Auxiliary::Scalar(0.0)),
        ("t_dot_kappa_b", Auxiliary::Scalar(4.0 * a * b * y / (p.powf(1.5) * d))),
        (
            "b_grad_t_n",
            Auxiliary::Scalar(8.0 * a * a * b * x * y / (p.powf(1.5) * sq * (axy - sp * sq))),
        ),
    ])
}

/// Printed auxiliaries for the graph of a general `f`.
fn graph_auxiliaries(r: Vec3, g: &GraphFunctions) -> Auxiliaries {
    let (x, y) = (r.x, r.y);
    let (fx, fy) = ((g.f_x)(x, y), (g.f_y)(x, y));
    let (fxx, fxy, fyy) = ((g.f_xx)(x, y), (g.f_xy)(x, y), (g.f_yy)(x, y));
    let xx = fx * fx + 1.0;
    let yy = fy * fy + 1.0;
    let (sx, sy) = (xx.sqrt(), yy.sqrt());
    let dg = sy * sx - fy * fx;
    let ks = sy * xx;
    let v = fy * fy + fx * fx + 1.0;
    BTreeMap::from([
        ("S_tt", Auxiliary::Scalar(-fxx / ks)),
        ("S_tb", Auxiliary::Scalar((fy * fx * fxx - sy * sx * fxy) / (ks * dg))),
        ("S_bt", Auxiliary::Scalar(dg * (fy * fx * fxx - xx * fxy) / (ks * v))),
        (
            "S_bb",
            Auxiliary::Scalar((fy * fx * ((fx * fx + sy * sx + 1.0) * fxy - fy * fx * fxx) - sy * fyy * xx.powf(1.5)) / (ks * v)),
        ),
        (
            "t_dot_kappa_n",
            Auxiliary::Scalar((fy * fxy + fx * fxx) / (yy * xx.powf(1.5))),
        ),
        (
            "b_dot_kappa_n",
            Auxiliary::Scalar(((fyy * xx - fx * fx * fxx) * fy - fy * fy * fx * fxy + fx * xx * fxy) / (yy * xx.powf(1.5) * dg)),
        ),
        (
            "b_dot_kappa_t",
            Auxiliary::Scalar(-fy * (sx * fy * fy + sx - sy * fy * fx) * fxy / (yy * xx * (fy * fx - sy * sx).powi(2))),
        ),
        ("t_dot_kappa_b", Auxiliary::Scalar(fy * fxx / (xx.powf(1.5) * dg))),
        (
            "b_grad_t_n",
            Auxiliary::Scalar(-fy * (fy * fxy + fx * fxx) / (sy * xx.powf(1.5) * dg)),
        ),
    ])
}

/// Printed auxiliary expressions of `id` at `r`. Empty for entries whose
/// coefficients are printed directly.
pub fn catalog_auxiliaries(id: &ClosedFormId, r: Vec3) -> Result<Auxiliaries> {
    if !r.is_finite() {
        return Err(Error::NonFinite("catalog point"));
    }
    let aux = match id {
        ClosedFormId::Ellipsoid { a, b, c } => ellipsoid_auxiliaries(r, *a, *b, *c)?,
        ClosedFormId::Paraboloid { a, b } => paraboloid_auxiliaries(r, *a, *b),
        ClosedFormId::Graph(g) => graph_auxiliaries(r, g),
        _ => Auxiliaries::new(),
    };
    if let Some((name, _)) = aux.iter().find(|(_, v)| !v.is_finite()) {
        return Err(outside(format!("{name} is not finite at {r}")));
    }
    Ok(aux)
}

fn scalar(aux: &Auxiliaries, key: &str) -> f64 {
    aux[key].scalar().expect("scalar auxiliary")
}

fn vector(aux: &Auxiliaries, key: &str) -> Vec3 {
    aux[key].vector().expect("vector auxiliary")
}

/// Coefficients assembled exactly as printed.
pub fn printed_coefficients(id: &ClosedFormId, r: Vec3, mu: f64, omega: f64) -> Result<(f64, f64)> {
    let sigma = check_mu(mu)?;
    let (s, c) = omega.sin_cos();
    match id {
        ClosedFormId::CylindricalI => {
            let rho = axis_distance(r)?;
            Ok((0.0, -sigma * s / rho))
        }
        ClosedFormId::CylindricalII => {
            let rho = axis_distance(r)?;
            Ok((sigma * c * c / rho, 0.0))
        }
        ClosedFormId::Sphere => sphere(r, sigma, s),
        ClosedFormId::Canonical => Ok((0.0, 0.0)),
        ClosedFormId::Ellipsoid { .. } => {
            let aux = catalog_auxiliaries(id, r)?;
            let f = frame_at(id, r)?;
            let (kt, kb, kn) = (vector(&aux, "kappa_t"), vector(&aux, "kappa_b"), vector(&aux, "kappa_n"));
            let big_c = c * c * f.n().dot(kt) + s * s * f.n().dot(kb);
            let par = f.t() * c + f.b() * s;
            let wind = -scalar(&aux, "b_grad_n_t");
            let a_mu = sigma * sigma * big_c + mu * sigma * par.dot(kn);
            let a_omega = sigma * (c * f.b().dot(kt) - s * f.t().dot(kb)) + mu * wind;
            Ok((a_mu, a_omega))
        }
        ClosedFormId::Paraboloid { .. } | ClosedFormId::Graph(_) => {
            let aux = catalog_auxiliaries(id, r)?;
            let big_c = c * c * scalar(&aux, "S_tt")
                + c * s * (scalar(&aux, "S_tb") + scalar(&aux, "S_bt"))
                + s * s * scalar(&aux, "S_bb");
            let par_kn = c * scalar(&aux, "t_dot_kappa_n") + s * scalar(&aux, "b_dot_kappa_n");
            let a_mu = sigma * sigma * big_c + mu * sigma * par_kn;
            let a_omega =
                sigma * (c * scalar(&aux, "b_dot_kappa_t") - s * scalar(&aux, "t_dot_kappa_b")) + mu * scalar(&aux, "b_grad_t_n");
            Ok((a_mu, a_omega))
        }
    }
}

fn sphere(r: Vec3, sigma: f64, s: f64) -> Result<(f64, f64)> {
    let lateral = axis_distance(r)?;
    let rho = r.norm();
    let cot = r.z / lateral;
    Ok((sigma * sigma / rho, -sigma * s * cot / rho))
}

/// Reference `(a_mu, a_omega)` used in comparisons: the printed values,
/// except for CylindricalII, which uses the derived form.
pub fn catalog_coefficients(id: &ClosedFormId, r: Vec3, mu: f64, omega: f64) -> Result<(f64, f64)> {
    match id {
        ClosedFormId::CylindricalII => {
            let sigma = check_mu(mu)?;
            let rho = axis_distance(r)?;
            let (s, c) = omega.sin_cos();
            Ok((sigma * sigma * c * c / rho, mu * s * c / rho))
        }
        _ => printed_coefficients(id, r, mu, omega),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn sphere_and_cylinder_examples() {
        let (a_mu, _) = catalog_coefficients(&ClosedFormId::Sphere, Vec3::new(1.0, 0.0, 0.0), 0.0, 0.4).unwrap();
        assert!((a_mu - 1.0).abs() < 1e-15);
        let (_, a_omega) = catalog_coefficients(&ClosedFormId::CylindricalI, Vec3::new(4.0, 0.0, 0.0), 0.3, 0.0).unwrap();
        assert_eq!(a_omega.abs(), 0.0);
    }

    #[test]
    fn cylinder_ii_printed_and_derived() {
        let id = ClosedFormId::CylindricalII;
        let r = Vec3::new(2.0, 0.0, 0.0);
        assert_eq!(
            printed_coefficients(&id, r, 0.0, 0.0).unwrap().0,
            catalog_coefficients(&id, r, 0.0, 0.0).unwrap().0
        );
        assert!((printed_coefficients(&id, r, 0.6, 0.0).unwrap().0 - 0.4).abs() < 1e-15);
        assert!((catalog_coefficients(&id, r, 0.6, 0.0).unwrap().0 - 0.32).abs() < 1e-15);
        assert!((catalog_coefficients(&id, r, 0.6, FRAC_PI_4).unwrap().1 - 0.15).abs() < 1e-15);
    }

    #[test]
    fn graph_entry_specializes_to_paraboloid() {
        let r = Vec3::new(0.5, -0.3, 0.1);
        let par = ClosedFormId::Paraboloid { a: 1.0, b: 2.0 };
        let graph = ClosedFormId::Graph(GraphFunctions::paraboloid(1.0, 2.0));
        for (mu, omega) in [(0.3, 1.0), (-0.7, 4.0), (0.0, FRAC_PI_2)] {
            let p = printed_coefficients(&par, r, mu, omega).unwrap();
            let g = printed_coefficients(&graph, r, mu, omega).unwrap();
            assert!((p.0 - g.0).abs() < 1e-10 && (p.1 - g.1).abs() < 1e-10);
        }
        let aux = catalog_auxiliaries(&par, r).unwrap();
        assert!((scalar(&aux, "S_tt") + 0.64018).abs() < 1e-5);
        assert!((scalar(&aux, "b_grad_t_n") - 0.15934).abs() < 1e-5);
    }

    #[test]
    fn ellipsoid_overlap_matches_frame() {
        let id = ClosedFormId::Ellipsoid { a: 2.0, b: 1.0, c: 1.0 };
        let (phi, th) = (FRAC_PI_4, FRAC_PI_3);
        let r = Vec3::new(2.0 * phi.cos() * th.sin(), phi.sin() * th.sin(), th.cos());
        let aux = catalog_auxiliaries(&id, r).unwrap();
        assert!((scalar(&aux, "t_dot_b_tilde") + 0.40452).abs() < 1e-5);
        let (rho, p, t) = ellipsoid_coordinates(r, 2.0, 1.0, 1.0).unwrap();
        assert!((rho - 1.0).abs() < 1e-14 && (p - phi).abs() < 1e-14 && (t - th).abs() < 1e-14);
    }

    #[test]
    fn region_errors() {
        assert!(matches!(
            catalog_coefficients(&ClosedFormId::Sphere, Vec3::new(0.0, 0.0, 1.0), 0.1, 0.2),
            Err(Error::OutsideValidRegion(_))
        ));
        assert!(matches!(
            catalog_coefficients(&ClosedFormId::CylindricalI, Vec3::new(1.0, 0.0, 0.0), 1.5, 0.2),
            Err(Error::OutOfRange { .. })
        ));
    }
}
