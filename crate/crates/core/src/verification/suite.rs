//! The full verification suite behind `curvstream verify`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::catalog::{catalog_coefficients, catalog_entry, ellipsoid_coordinates, printed_coefficients, CatalogTrust};
use super::conservation::{conservation_check, ConservationFactor, ConservationReason};
use super::forms::{align_shape_operator, kb_transform_residual, shape_operator_via_fundamental_forms};
use super::oracle::{ray_oracle, DEFAULT_RAY_STEP};
use super::report::{CheckResult, Report, ReportMeta, REPORT_VERSION};
use super::sampling::{rng_for, sample_angles, sample_point, sample_state};
use crate::curvature::{curvature_report, foliation_defect, frame_shape_operator, latitude_loop, parallel_transport_holonomy};
use crate::differential::{frame_derivative, DiffConfig};
use crate::error::{Error, Result};
use crate::geometry::{
    builtin_frame, AnalyticField, BuiltinFrame, ClosedFormId, FrameAxis, FrameComponent, FrameField, GraphFunctions, Vec3,
};
use crate::streaming::{apply_streaming, form_spread, streaming_coefficients};
use crate::Scalar;

pub const ORACLE_TOL: f64 = 1e-6;
pub const CATALOG_TOL: f64 = 1e-8;
pub const GRAPH_PARABOLOID_TOL: f64 = 1e-10;
pub const FORMS_TOL: f64 = 1e-8;
/// Foliation defect below which surface forms join the form comparison.
pub const FORMS_DEFECT_TOL: f64 = 1e-8;
pub const IDENTITY_TOL: f64 = 1e-8;
pub const HOMOTHETY_TOL: f64 = 1e-8;
pub const HOMOTHETY_FACTORS: [f64; 3] = [0.5, 2.0, 10.0];
pub const FOLIATION_TOL: f64 = 1e-9;
pub const CHAIN_RULE_TOL: f64 = 1e-8;
pub const HOLONOMY_TOL: f64 = 1e-3;
pub const PLANAR_HOLONOMY_TOL: f64 = 1e-9;
/// Allowed deviation of the observed convergence order from 2.
pub const HOLONOMY_ORDER_TOL: f64 = 0.25;
pub const SHAPE_ROUTE_TOL: f64 = 1e-7;
/// Below this error the convergence order is not measurable.
const HOLONOMY_ERROR_FLOOR: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckKind {
    Catalog,
    Oracle,
    Forms,
    Identities,
    Homothety,
    Foliation,
    ChainRule,
    Conservation,
    Holonomy,
    ShapeRoutes,
    KbResidual,
}

impl CheckKind {
    pub const ALL: [CheckKind; 11] = [
        CheckKind::Catalog,
        CheckKind::Oracle,
        CheckKind::Forms,
        CheckKind::Identities,
        CheckKind::Homothety,
        CheckKind::Foliation,
        CheckKind::ChainRule,
        CheckKind::Conservation,
        CheckKind::Holonomy,
        CheckKind::ShapeRoutes,
        CheckKind::KbResidual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Catalog => "catalog",
            CheckKind::Oracle => "oracle",
            CheckKind::Forms => "forms",
            CheckKind::Identities => "identities",
            CheckKind::Homothety => "homothety",
            CheckKind::Foliation => "foliation",
            CheckKind::ChainRule => "chain-rule",
            CheckKind::Conservation => "conservation",
            CheckKind::Holonomy => "holonomy",
            CheckKind::ShapeRoutes => "shape-routes",
            CheckKind::KbResidual => "kb-residual",
        }
    }

    fn stream(self) -> u64 {
        CheckKind::ALL.iter().position(|&k| k == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown check '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleCounts {
    pub catalog: usize,
    pub oracle: usize,
    pub forms: usize,
    pub identities: usize,
    pub homothety: usize,
    pub foliation: usize,
    pub chain_rule: usize,
    pub conservation_spatial: usize,
    pub conservation_angular: usize,
    pub shape_routes: usize,
    pub holonomy_steps: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self {
            catalog: 1000,
            oracle: 200,
            forms: 500,
            identities: 500,
            homothety: 100,
            foliation: 500,
            chain_rule: 500,
            conservation_spatial: super::conservation::DEFAULT_SPATIAL_SAMPLES,
            conservation_angular: super::conservation::DEFAULT_ANGULAR_SAMPLES,
            shape_routes: 50,
            holonomy_steps: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub frames: Vec<ClosedFormId>,
    pub checks: Vec<CheckKind>,
    pub holonomy_thetas: Vec<f64>,
    pub diff: DiffConfig,
    pub samples: SampleCounts,
    pub timestamp: Option<u64>,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            frames: default_frames(),
            checks: CheckKind::ALL.to_vec(),
            holonomy_thetas: vec![FRAC_PI_6, FRAC_PI_3, FRAC_PI_2],
            diff: DiffConfig::dual(),
            samples: SampleCounts::default(),
            timestamp: None,
        }
    }
}

/// The reference frames exercised by default.
pub fn default_frames() -> Vec<ClosedFormId> {
    vec![
        ClosedFormId::CylindricalI,
        ClosedFormId::CylindricalII,
        ClosedFormId::Sphere,
        ClosedFormId::Ellipsoid { a: 2.0, b: 1.0, c: 1.0 },
        ClosedFormId::Paraboloid { a: 1.0, b: 2.0 },
        ClosedFormId::Graph(GraphFunctions::sine_ridge()),
        ClosedFormId::Canonical,
    ]
}

fn frame_key(id: &ClosedFormId) -> u64 {
    const NAMES: [&str; 7] = [
        "cylindrical-i",
        "cylindrical-ii",
        "sphere",
        "ellipsoid",
        "paraboloid",
        "graph",
        "constant",
    ];
    NAMES.iter().position(|&n| n == id.name()).unwrap_or(NAMES.len()) as u64
}

struct Ctx<'a> {
    id: &'a ClosedFormId,
    frame: BuiltinFrame,
    cfg: &'a SuiteConfig,
}

impl Ctx<'_> {
    fn rng(&self, kind: CheckKind) -> rand_chacha::ChaCha8Rng {
        rng_for(self.cfg.seed, (frame_key(self.id) << 8) | kind.stream())
    }

    fn name(&self, kind: CheckKind) -> String {
        format!("{}/{}", kind.name(), self.id.name())
    }

    fn diff(&self) -> &DiffConfig {
        &self.cfg.diff
    }
}

/// Runs every selected check on every selected frame, in order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.diff.validate()?;
    let mut checks = Vec::new();
    for id in &cfg.frames {
        let ctx = Ctx {
            id,
            frame: builtin_frame(id.clone())?,
            cfg,
        };
        for &kind in &cfg.checks {
            run_check(&ctx, kind, &mut checks)?;
        }
    }
    if cfg.checks.contains(&CheckKind::Foliation) {
        let defect = beltrami_defect(&cfg.diff)?;
        checks.push(CheckResult::asserted(
            "foliation/beltrami",
            (defect + 1.0).abs(),
            FOLIATION_TOL,
            1,
        ));
    }
    Ok(Report {
        version: REPORT_VERSION,
        checks,
        meta: ReportMeta {
            seed: cfg.seed,
            engine: cfg.diff.engine.name().to_string(),
            timestamp: cfg.timestamp,
        },
    })
}

fn run_check(ctx: &Ctx<'_>, kind: CheckKind, out: &mut Vec<CheckResult>) -> Result<()> {
    match kind {
        CheckKind::Catalog => catalog_checks(ctx, out),
        CheckKind::Oracle => {
            let mut rng = ctx.rng(kind);
            let n = ctx.cfg.samples.oracle;
            let mut worst = 0.0f64;
            for _ in 0..n {
                let (r, mu, omega) = sample_state(ctx.id, &mut rng);
                worst = worst.max(oracle_residual(&ctx.frame, r, mu, omega, ctx.diff())?);
            }
            out.push(CheckResult::asserted(ctx.name(kind), worst, ORACLE_TOL, n));
            Ok(())
        }
        CheckKind::Forms => {
            let mut rng = ctx.rng(kind);
            let n = ctx.cfg.samples.forms;
            let mut worst = 0.0f64;
            for _ in 0..n {
                let (r, mu, omega) = sample_state(ctx.id, &mut rng);
                let s = form_spread(&ctx.frame, r, mu, omega, FORMS_DEFECT_TOL, ctx.diff())?;
                worst = worst.max(s.mu).max(s.omega);
            }
            out.push(CheckResult::asserted(ctx.name(kind), worst, FORMS_TOL, n));
            Ok(())
        }
        CheckKind::Identities => {
            let mut rng = ctx.rng(kind);
            let n = ctx.cfg.samples.identities;
            let mut worst = 0.0f64;
            for _ in 0..n {
                let r = sample_point(ctx.id, &mut rng);
                let h = random_unit(&mut rng);
                worst = worst.max(frame_identity_residual(&ctx.frame, r, h, ctx.diff())?);
            }
            out.push(CheckResult::asserted(ctx.name(kind), worst, IDENTITY_TOL, n));
            Ok(())
        }
        CheckKind::Homothety => {
            if !ctx.id.is_homothetic() {
                return Ok(());
            }
            let mut rng = ctx.rng(kind);
            let n = ctx.cfg.samples.homothety;
            let mut worst = 0.0f64;
            for _ in 0..n {
                let (r, mu, omega) = sample_state(ctx.id, &mut rng);
                for rho in HOMOTHETY_FACTORS {
                    worst = worst.max(homothety_residual(&ctx.frame, r, mu, omega, rho, ctx.diff())?);
                }
            }
            out.push(CheckResult::asserted(
                ctx.name(kind),
                worst,
                HOMOTHETY_TOL,
                n * HOMOTHETY_FACTORS.len(),
            ));
            Ok(())
        }
        CheckKind::Foliation => {
            let mut rng = ctx.rng(kind);
            let n = ctx.cfg.samples.foliation;
            let field = FrameComponent::new(&ctx.frame, FrameAxis::N);
            let mut worst = 0.0f64;
            for _ in 0..n {
                let r = sample_point(ctx.id, &mut rng);
                worst = worst.max(foliation_defect(&field, r, ctx.diff())?.abs());
            }
            out.push(CheckResult::asserted(ctx.name(kind), worst, FOLIATION_TOL, n));
            Ok(())
        }
        CheckKind::ChainRule => {
            let mut rng = ctx.rng(kind);
            let n = ctx.cfg.samples.chain_rule;
            let mut worst = 0.0f64;
            for _ in 0..n {
                let (r, mu, omega) = sample_state(ctx.id, &mut rng);
                worst = worst.max((chain_rule_value(&ctx.frame, r, mu, omega, ctx.diff())? - 1.0).abs());
            }
            out.push(CheckResult::asserted(ctx.name(kind), worst, CHAIN_RULE_TOL, n));
            Ok(())
        }
        CheckKind::Conservation => conservation_result(ctx, out),
        CheckKind::Holonomy => holonomy_checks(ctx, out),
        CheckKind::ShapeRoutes => {
            let mut rng = ctx.rng(kind);
            let n = ctx.cfg.samples.shape_routes;
            let mut worst = 0.0f64;
            for _ in 0..n {
                let r = sample_point(ctx.id, &mut rng);
                worst = worst.max(shape_route_residual(&ctx.frame, r, ctx.diff())?);
            }
            out.push(CheckResult::asserted(ctx.name(kind), worst, SHAPE_ROUTE_TOL, n));
            Ok(())
        }
        CheckKind::KbResidual => {
            if let ClosedFormId::Ellipsoid { a, b, c } = *ctx.id {
                let (phi, theta) = (std::f64::consts::FRAC_PI_4, FRAC_PI_3);
                let r = Vec3::new(a * phi.cos() * theta.sin(), b * phi.sin() * theta.sin(), c * theta.cos());
                let residual = kb_transform_residual(&ctx.frame, r, ctx.diff())?;
                out.push(CheckResult::report_only(ctx.name(kind), residual, 0.0, 1));
            }
            Ok(())
        }
    }
}

fn catalog_checks(ctx: &Ctx<'_>, out: &mut Vec<CheckResult>) -> Result<()> {
    let mut rng = ctx.rng(CheckKind::Catalog);
    let n = ctx.cfg.samples.catalog;
    let entry = catalog_entry(ctx.id);
    let mut worst = 0.0f64;
    let mut worst_printed = 0.0f64;
    let mut worst_graph = 0.0f64;
    let graph_twin = match *ctx.id {
        ClosedFormId::Paraboloid { a, b } => Some(ClosedFormId::Graph(GraphFunctions::paraboloid(a, b))),
        _ => None,
    };
    for _ in 0..n {
        let (r, mu, omega) = sample_state(ctx.id, &mut rng);
        let engine = streaming_coefficients(&ctx.frame, r, mu, omega, ctx.diff())?;
        let (cm, co) = catalog_coefficients(ctx.id, r, mu, omega)?;
        worst = worst.max((engine.a_mu - cm).abs()).max((engine.a_omega - co).abs());
        if let ClosedFormId::CylindricalII = ctx.id {
            let (pm, po) = printed_coefficients(ctx.id, r, mu, omega)?;
            worst_printed = worst_printed.max((engine.a_mu - pm).abs()).max((engine.a_omega - po).abs());
        }
        if let Some(twin) = &graph_twin {
            let (gm, go) = printed_coefficients(twin, r, mu, omega)?;
            worst_graph = worst_graph.max((gm - cm).abs()).max((go - co).abs());
        }
    }
    let name = format!("catalog/{}", ctx.id.name());
    out.push(match entry.trust {
        CatalogTrust::Asserted => CheckResult::asserted(name, worst, CATALOG_TOL, n),
        CatalogTrust::ReportOnly => CheckResult::report_only(name, worst, CATALOG_TOL, n),
    });
    if let ClosedFormId::CylindricalII = ctx.id {
        out.push(CheckResult::report_only(
            "catalog/cylindrical-ii/printed",
            worst_printed,
            CATALOG_TOL,
            n,
        ));
    }
    if graph_twin.is_some() {
        out.push(CheckResult::asserted(
            "catalog/graph-vs-paraboloid",
            worst_graph,
            GRAPH_PARABOLOID_TOL,
            n,
        ));
    }
    Ok(())
}

fn conservation_result(ctx: &Ctx<'_>, out: &mut Vec<CheckResult>) -> Result<()> {
    let mut rng = ctx.rng(CheckKind::Conservation);
    let s = &ctx.cfg.samples;
    let points: Vec<Vec3> = (0..s.conservation_spatial).map(|_| sample_point(ctx.id, &mut rng)).collect();
    let angles: Vec<(f64, f64)> = (0..s.conservation_angular).map(|_| sample_angles(&mut rng)).collect();
    let report = conservation_check(&ctx.frame, &points, &angles, ctx.diff())?;
    let ok = match expected_conservation(ctx.id) {
        ExpectedConservation::Feasible(f, g) => report.feasible && report.f_factor == Some(f) && report.g_factor == Some(g),
        ExpectedConservation::Reason(reason) => !report.feasible && report.reason == reason,
        ExpectedConservation::Infeasible => !report.feasible,
    };
    // The residual is a mismatch indicator: 0 when the outcome is the
    // expected one.
    out.push(CheckResult::asserted(
        ctx.name(CheckKind::Conservation),
        if ok { 0.0 } else { 1.0 },
        0.0,
        report.samples_checked,
    ));
    Ok(())
}

/// Conservation outcome expected for a reference frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedConservation {
    Feasible(ConservationFactor, ConservationFactor),
    Reason(ConservationReason),
    Infeasible,
}

pub fn expected_conservation(id: &ClosedFormId) -> ExpectedConservation {
    use ConservationFactor::{LeafRadius, Unity};
    match id {
        ClosedFormId::CylindricalI | ClosedFormId::Canonical => ExpectedConservation::Feasible(Unity, Unity),
        ClosedFormId::Sphere => ExpectedConservation::Feasible(LeafRadius, Unity),
        ClosedFormId::CylindricalII => ExpectedConservation::Reason(ConservationReason::CDependsOnOmega),
        ClosedFormId::Ellipsoid { .. } => ExpectedConservation::Reason(ConservationReason::KappaNNonzero),
        ClosedFormId::Paraboloid { .. } | ClosedFormId::Graph(_) => ExpectedConservation::Infeasible,
    }
}

fn holonomy_checks(ctx: &Ctx<'_>, out: &mut Vec<CheckResult>) -> Result<()> {
    let steps = ctx.cfg.samples.holonomy_steps;
    match ctx.id {
        ClosedFormId::Sphere => {
            for &theta in &ctx.cfg.holonomy_thetas {
                let study = sphere_holonomy_study(&ctx.frame, theta, steps)?;
                out.push(CheckResult::asserted(
                    format!("holonomy/sphere/theta={theta:.10}"),
                    study.errors[2],
                    HOLONOMY_TOL,
                    steps,
                ));
                let order_residual = study.order.map_or(0.0, |p| (p - 2.0).abs());
                out.push(CheckResult::asserted(
                    format!("holonomy-order/sphere/theta={theta:.10}"),
                    order_residual,
                    HOLONOMY_ORDER_TOL,
                    3,
                ));
            }
        }
        ClosedFormId::CylindricalI => {
            let mut worst = 0.0f64;
            for &theta in &ctx.cfg.holonomy_thetas {
                worst = worst.max(loop_holonomy(&ctx.frame, 1.0, theta, steps)?.abs());
            }
            out.push(CheckResult::asserted(
                "holonomy/cylindrical-i/planar",
                worst,
                PLANAR_HOLONOMY_TOL,
                ctx.cfg.holonomy_thetas.len(),
            ));
        }
        _ => {}
    }
    Ok(())
}

/// Holonomy angle of the `b`-loop through colatitude `theta` at radius `rho`.
pub fn loop_holonomy(frame: &dyn FrameField, rho: f64, theta: f64, steps: usize) -> Result<f64> {
    let points = latitude_loop(frame, rho, theta, steps)?;
    let v0 = frame.frame(points[0])?.t();
    Ok(parallel_transport_holonomy(frame, &points, v0)?.angle)
}

/// Sphere holonomy at `steps/4`, `steps/2` and `steps` loop steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolonomyStudy {
    pub angle: f64,
    pub expected: f64,
    /// Absolute errors at the three resolutions, coarsest first.
    pub errors: [f64; 3],
    /// `log₂(e(steps/2)/e(steps))`, absent when the error is at rounding level.
    pub order: Option<f64>,
}

pub fn sphere_holonomy_study(frame: &dyn FrameField, theta: f64, steps: usize) -> Result<HolonomyStudy> {
    if steps < 4 * crate::curvature::MIN_STEPS {
        return Err(Error::InvalidParameter(format!(
            "holonomy study needs at least {} steps",
            4 * crate::curvature::MIN_STEPS
        )));
    }
    let expected = TAU * (1.0 - theta.cos());
    let mut errors = [0.0; 3];
    let mut angle = 0.0;
    for (i, n) in [steps / 4, steps / 2, steps].into_iter().enumerate() {
        angle = loop_holonomy(frame, 1.0, theta, n)?;
        errors[i] = (angle - expected).abs();
    }
    let order = (errors[2] > HOLONOMY_ERROR_FLOOR).then(|| (errors[1] / errors[2]).log2());
    Ok(HolonomyStudy {
        angle,
        expected,
        errors,
        order,
    })
}

fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

/// `max |a − oracle|` over both coefficients.
pub fn oracle_residual(frame: &dyn FrameField, r: Vec3, mu: f64, omega: f64, cfg: &DiffConfig) -> Result<f64> {
    let c = streaming_coefficients(frame, r, mu, omega, cfg)?;
    let o = ray_oracle(frame, r, c.direction(), DEFAULT_RAY_STEP, cfg)?;
    Ok((c.a_mu - o.dmu_ds).abs().max((c.a_omega - o.domega_ds).abs()))
}

/// `max` of `|u·∇_h u|` and `|u·∇_h v + v·∇_h u|` over the frame vectors.
pub fn frame_identity_residual(frame: &dyn FrameField, r: Vec3, h: Vec3, cfg: &DiffConfig) -> Result<f64> {
    let f = frame.frame(r)?;
    let d = frame_derivative(frame, r, h, cfg)?;
    let mut worst = 0.0f64;
    for (i, a) in FrameAxis::ALL.into_iter().enumerate() {
        worst = worst.max(f.get(a).dot(d.get(a)).abs());
        for b in FrameAxis::ALL.into_iter().skip(i + 1) {
            worst = worst.max((f.get(a).dot(d.get(b)) + f.get(b).dot(d.get(a))).abs());
        }
    }
    Ok(worst)
}

/// Streaming applied to `Ψ(r, Ω) = Ω·r` with exact partials; equals 1.
pub fn chain_rule_value(frame: &dyn FrameField, r: Vec3, mu: f64, omega: f64, cfg: &DiffConfig) -> Result<f64> {
    let coeffs = streaming_coefficients(frame, r, mu, omega, cfg)?;
    let f = coeffs.at.frame;
    let sigma = (1.0 - mu * mu).sqrt();
    let (s, c) = omega.sin_cos();
    let dir = coeffs.direction();
    // ∂_j Ω at fixed (μ, ω) moves with the frame.
    let mut grad = dir;
    for (j, e) in [Vec3::X, Vec3::Y, Vec3::Z].into_iter().enumerate() {
        let d = frame_derivative(frame, r, e, cfg)?;
        let d_omega = d.n * mu + (d.t * c + d.b * s) * sigma;
        let g = r.dot(d_omega);
        match j {
            0 => grad.x += g,
            1 => grad.y += g,
            _ => grad.z += g,
        }
    }
    let dpsi_dmu = r.dot(f.n() - (f.t() * c + f.b() * s) * (mu / sigma));
    let dpsi_domega = r.dot((f.b() * c - f.t() * s) * sigma);
    apply_streaming(&coeffs, dir, grad, dpsi_dmu, dpsi_domega)
}

fn relative(scaled: f64, reference: f64) -> f64 {
    (scaled - reference).abs() / reference.abs().max(1e-6)
}

/// Largest relative deviation from `X(ρr) = X(r)/ρ` over both streaming
/// coefficients and every curvature-report entry.
pub fn homothety_residual(frame: &dyn FrameField, r: Vec3, mu: f64, omega: f64, rho: f64, cfg: &DiffConfig) -> Result<f64> {
    let base = streaming_coefficients(frame, r, mu, omega, cfg)?;
    let scaled = streaming_coefficients(frame, r * rho, mu, omega, cfg)?;
    let mut worst = relative(rho * scaled.a_mu, base.a_mu).max(relative(rho * scaled.a_omega, base.a_omega));
    let rb = curvature_report(frame, r, cfg)?.entries();
    let rs = curvature_report(frame, r * rho, cfg)?.entries();
    for (b, s) in rb.iter().zip(&rs) {
        worst = worst.max(relative(rho * s, *b));
    }
    Ok(worst)
}

/// A parametrization `(u, v) ↦ X` of the `n`-leaf of `id` through `r` with
/// the parameters of `r`.
pub fn leaf_parametrization(id: &ClosedFormId, r: Vec3) -> Result<Leaf> {
    Ok(match id.clone() {
        ClosedFormId::CylindricalI | ClosedFormId::Canonical => {
            let z = r.z;
            (Box::new(move |u, v| Vec3::new(u, v, z)), r.x, r.y)
        }
        ClosedFormId::CylindricalII => {
            let rho = r.x.hypot(r.y);
            (
                Box::new(move |phi: f64, z| Vec3::new(rho * phi.cos(), rho * phi.sin(), z)),
                r.y.atan2(r.x),
                r.z,
            )
        }
        ClosedFormId::Sphere => ellipsoid_leaf(r, 1.0, 1.0, 1.0)?,
        ClosedFormId::Ellipsoid { a, b, c } => ellipsoid_leaf(r, a, b, c)?,
        ClosedFormId::Paraboloid { a, b } => {
            let lift = r.z - (a * r.x * r.x + b * r.y * r.y);
            (Box::new(move |x, y| Vec3::new(x, y, a * x * x + b * y * y + lift)), r.x, r.y)
        }
        ClosedFormId::Graph(g) => {
            let lift = r.z - (g.f)(r.x, r.y);
            (Box::new(move |x, y| Vec3::new(x, y, (g.f)(x, y) + lift)), r.x, r.y)
        }
    })
}

/// A leaf parametrization `X(u, v)` with the parameters `(u, v)` of the base point.
pub type Leaf = (Box<dyn Fn(f64, f64) -> Vec3>, f64, f64);

fn ellipsoid_leaf(r: Vec3, a: f64, b: f64, c: f64) -> Result<Leaf> {
    let (rho, phi, theta) = ellipsoid_coordinates(r, a, b, c)?;
    Ok((
        Box::new(move |th: f64, ph: f64| Vec3::new(a * ph.cos() * th.sin(), b * ph.sin() * th.sin(), c * th.cos()) * rho),
        theta,
        phi,
    ))
}

/// `|S_weingarten − S_fundamental_forms|` at `r` after basis alignment.
pub fn shape_route_residual(frame: &BuiltinFrame, r: Vec3, cfg: &DiffConfig) -> Result<f64> {
    let weingarten = frame_shape_operator(frame, r, cfg)?;
    let (x, u, v) = leaf_parametrization(frame.id(), r)?;
    let forms = shape_operator_via_fundamental_forms(&*x, u, v, cfg)?;
    Ok(align_shape_operator(&forms, weingarten.basis, weingarten.normal).max_abs_diff(&weingarten))
}

/// `(0, cos x, sin x)`, whose curl is minus the field.
pub struct BeltramiField;

impl AnalyticField for BeltramiField {
    fn field_at<S: Scalar>(&self, r: Vec3<S>) -> Result<Vec3<S>> {
        Ok(Vec3::new(S::from_f64(0.0), r.x.cos(), r.x.sin()))
    }
}

pub fn beltrami_defect(cfg: &DiffConfig) -> Result<f64> {
    foliation_defect(&BeltramiField, Vec3::new(0.3, -0.2, 0.7), cfg)
}
