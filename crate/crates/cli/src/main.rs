mod args;
mod grid;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use rayon::prelude::*;
use serde::Serialize;

use curvstream::curvature::{latitude_loop, parallel_transport_holonomy};
use curvstream::geometry::{builtin_frame, BuiltinFrame, ClosedFormId, FrameField, GraphFunctions, Vec3};
use curvstream::streaming::{streaming_coefficients, StreamingCoefficients};
use curvstream::verification::{
    self, conservation_check_with_tolerance, default_frames, format_f64, rng_for, run_suite, sample_angles, sample_point,
    to_json_writer, SuiteConfig,
};
use curvstream::{DiffConfig, Error};

use args::{Cli, Command, EngineArg, Format, FrameName, GlobalArgs, PointArgs, ShapeArgs, VerifyFrame};

const CSV_COLUMNS: [&str; 11] = [
    "x",
    "y",
    "z",
    "mu",
    "omega",
    "a_mu",
    "a_omega",
    "mu_surface",
    "mu_curve_n",
    "omega_curve",
    "omega_wind",
];

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Evaluation(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Evaluation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Evaluation(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Evaluation(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Evaluation(format!("output: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Evaluation(format!("output: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Evaluation(format!("output: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = diff_config(&cli.global)?;
    let g = &cli.global;
    match cli.command {
        Command::Coeffs(a) => {
            let frame = make_frame(a.frame.frame, &a.frame.shape)?;
            let points = positions(&a.position, &frame)?;
            let states: Vec<(Vec3, f64, f64)> = points.into_iter().map(|r| (r, a.mu, a.omega)).collect();
            let records = evaluate(&frame, &states, &cfg)?;
            write_records(g, &frame, &cfg, &records)
        }
        Command::Sweep(a) => {
            let frame = make_frame(a.frame.frame, &a.frame.shape)?;
            let points = if a.point.is_empty() {
                let axis = |spec: Option<grid::AxisSpec>, name: &str| {
                    spec.map(|s| s.values())
                        .ok_or_else(|| Failure::Usage(format!("--grid-{name} or --point is required")))
                };
                let (xs, ys, zs) = (axis(a.grid_x, "x")?, axis(a.grid_y, "y")?, axis(a.grid_z, "z")?);
                let mut pts = Vec::with_capacity(xs.len() * ys.len() * zs.len());
                for &x in &xs {
                    for &y in &ys {
                        for &z in &zs {
                            pts.push(Vec3::new(x, y, z));
                        }
                    }
                }
                pts
            } else {
                a.point.iter().map(|p| Vec3::from_array(*p)).collect()
            };
            let mus = grid::gauss_legendre_nodes(a.mu_count as usize);
            let omegas = grid::uniform_azimuths(a.omega_count as usize);
            let mut states = Vec::with_capacity(points.len() * mus.len() * omegas.len());
            for &r in &points {
                for &mu in &mus {
                    for &omega in &omegas {
                        states.push((r, mu, omega));
                    }
                }
            }
            let records = evaluate(&frame, &states, &cfg)?;
            write_records(g, &frame, &cfg, &records)
        }
        Command::Verify(a) => {
            require_json(g, "verify")?;
            let mut suite = SuiteConfig::new(g.seed);
            suite.diff = cfg;
            suite.frames = match a.frame {
                VerifyFrame::All => default_frames(),
                other => vec![closed_form(verify_to_frame(other), &a.shape)?],
            };
            if !a.check.is_empty() {
                suite.checks = a.check.clone();
            }
            if !a.theta.is_empty() {
                if let Some(t) = a
                    .theta
                    .iter()
                    .find(|t| !(t.is_finite() && **t > 0.0 && **t < std::f64::consts::PI))
                {
                    return Err(Failure::Usage(format!("--theta {t} must lie in (0, π)")));
                }
                suite.holonomy_thetas = a.theta.clone();
            }
            if !g.no_timestamp {
                suite.timestamp = Some(SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
            }
            let report = run_suite(&suite)?;
            write_json(g, &report)?;
            match report.first_failure() {
                Some(c) => Err(Failure::Verification(format!(
                    "check {} failed: residual {:e} exceeds tolerance {:e}",
                    c.name, c.max_residual, c.tolerance
                ))),
                None => Ok(()),
            }
        }
        Command::Conservation(a) => {
            require_json(g, "conservation")?;
            let id = closed_form(a.frame.frame, &a.frame.shape)?;
            let frame = builtin_frame(id.clone())?;
            let mut rng = rng_for(g.seed, 0);
            let points: Vec<Vec3> = (0..a.spatial_samples).map(|_| sample_point(&id, &mut rng)).collect();
            let angles: Vec<(f64, f64)> = (0..a.angular_samples).map(|_| sample_angles(&mut rng)).collect();
            let report = conservation_check_with_tolerance(&frame, &points, &angles, a.tolerance, &cfg).map_err(|e| match e {
                Error::InvalidParameter(_) | Error::OutOfRange { .. } => Failure::Usage(e.to_string()),
                other => other.into(),
            })?;
            write_json(g, &report)
        }
        Command::Holonomy(a) => {
            require_json(g, "holonomy")?;
            let frame = make_frame(a.frame, &a.shape)?;
            if !(a.theta.is_finite() && a.theta > 0.0 && a.theta < std::f64::consts::PI) {
                return Err(Failure::Usage(format!("--theta {} must lie in (0, π)", a.theta)));
            }
            if !(a.rho.is_finite() && a.rho > 0.0) {
                return Err(Failure::Usage(format!("--rho {} must be positive", a.rho)));
            }
            if a.steps < curvstream::curvature::MIN_STEPS {
                return Err(Failure::Usage(format!(
                    "--steps must be at least {}",
                    curvstream::curvature::MIN_STEPS
                )));
            }
            let points = latitude_loop(&frame, a.rho, a.theta, a.steps)?;
            let v0 = frame.frame(points[0])?.t();
            let h = parallel_transport_holonomy(&frame, &points, v0)?;
            let expected = matches!(a.frame, FrameName::Sphere).then(|| std::f64::consts::TAU * (1.0 - a.theta.cos()));
            write_json(
                g,
                &HolonomyOutput {
                    frame: frame.id().name(),
                    rho: a.rho,
                    theta: a.theta,
                    steps: a.steps,
                    angle: h.angle,
                    expected,
                    error: expected.map(|e| (h.angle - e).abs()),
                    wrapped_angle: h.residual,
                    full_turns: h.full_turns,
                    samples: h.samples,
                },
            )
        }
    }
}

#[derive(Serialize)]
struct HolonomyOutput {
    frame: &'static str,
    rho: f64,
    theta: f64,
    steps: usize,
    angle: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<f64>,
    /// `angle` reduced to `(−π, π]`.
    wrapped_angle: f64,
    full_turns: i64,
    samples: usize,
}

#[derive(Serialize)]
struct Record {
    x: f64,
    y: f64,
    z: f64,
    mu: f64,
    omega: f64,
    a_mu: f64,
    a_omega: f64,
    mu_surface: f64,
    mu_curve_n: f64,
    omega_curve: f64,
    omega_wind: f64,
}

impl Record {
    fn new(c: &StreamingCoefficients) -> Self {
        Self {
            x: c.point.x,
            y: c.point.y,
            z: c.point.z,
            mu: c.mu(),
            omega: c.omega(),
            a_mu: c.a_mu,
            a_omega: c.a_omega,
            mu_surface: c.mu_surface,
            mu_curve_n: c.mu_curve_n,
            omega_curve: c.omega_curve,
            omega_wind: c.omega_wind,
        }
    }

    fn values(&self) -> [f64; 11] {
        [
            self.x,
            self.y,
            self.z,
            self.mu,
            self.omega,
            self.a_mu,
            self.a_omega,
            self.mu_surface,
            self.mu_curve_n,
            self.omega_curve,
            self.omega_wind,
        ]
    }
}

#[derive(Serialize)]
struct Records<'a> {
    version: u32,
    frame: &'static str,
    engine: &'static str,
    records: &'a [Record],
}

fn diff_config(g: &GlobalArgs) -> Result<DiffConfig, Failure> {
    let base = match g.engine {
        EngineArg::Dual => DiffConfig::dual(),
        EngineArg::Fd => DiffConfig::central_difference(),
    };
    match g.fd_step {
        Some(h) => base.with_step(h).map_err(|e| Failure::Usage(format!("--fd-step: {e}"))),
        None => Ok(base),
    }
}

fn closed_form(name: FrameName, shape: &ShapeArgs) -> Result<ClosedFormId, Failure> {
    let id = match name {
        FrameName::CylindricalI => ClosedFormId::CylindricalI,
        FrameName::CylindricalII => ClosedFormId::CylindricalII,
        FrameName::Sphere => ClosedFormId::Sphere,
        FrameName::Ellipsoid => ClosedFormId::Ellipsoid {
            a: shape.a.unwrap_or(2.0),
            b: shape.b.unwrap_or(1.0),
            c: shape.c.unwrap_or(1.0),
        },
        FrameName::Paraboloid => ClosedFormId::Paraboloid {
            a: shape.a.unwrap_or(1.0),
            b: shape.b.unwrap_or(2.0),
        },
        FrameName::Graph => ClosedFormId::Graph(GraphFunctions::sine_ridge()),
        FrameName::Constant => ClosedFormId::Canonical,
    };
    id.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(id)
}

fn make_frame(name: FrameName, shape: &ShapeArgs) -> Result<BuiltinFrame, Failure> {
    Ok(builtin_frame(closed_form(name, shape)?)?)
}

fn verify_to_frame(v: VerifyFrame) -> FrameName {
    match v {
        VerifyFrame::CylindricalI => FrameName::CylindricalI,
        VerifyFrame::CylindricalII => FrameName::CylindricalII,
        VerifyFrame::Sphere => FrameName::Sphere,
        VerifyFrame::Ellipsoid => FrameName::Ellipsoid,
        VerifyFrame::Paraboloid => FrameName::Paraboloid,
        VerifyFrame::Graph => FrameName::Graph,
        VerifyFrame::Constant | VerifyFrame::All => FrameName::Constant,
    }
}

fn positions(p: &PointArgs, frame: &BuiltinFrame) -> Result<Vec<Vec3>, Failure> {
    if !p.point.is_empty() {
        return Ok(p.point.iter().map(|v| Vec3::from_array(*v)).collect());
    }
    let (Some(rho), Some(theta)) = (p.rho, p.theta) else {
        return Err(Failure::Usage(
            "give --point, or --rho and --theta (with optional --phi)".into(),
        ));
    };
    let phi = p.phi.unwrap_or(0.0);
    let (a, b, c) = match *frame.id() {
        ClosedFormId::Ellipsoid { a, b, c } => (a, b, c),
        _ => (1.0, 1.0, 1.0),
    };
    let r = Vec3::new(a * phi.cos() * theta.sin(), b * phi.sin() * theta.sin(), c * theta.cos()) * rho;
    if !r.is_finite() {
        return Err(Failure::Usage("position is not finite".into()));
    }
    Ok(vec![r])
}

/// Evaluates all states concurrently; results keep the input order.
fn evaluate(frame: &BuiltinFrame, states: &[(Vec3, f64, f64)], cfg: &DiffConfig) -> Result<Vec<Record>, Failure> {
    states
        .par_iter()
        .map(|&(r, mu, omega)| {
            streaming_coefficients(frame, r, mu, omega, cfg)
                .map(|c| Record::new(&c))
                .map_err(|e| Failure::Evaluation(format!("at ({}, {}, {}), mu {mu}, omega {omega}: {e}", r.x, r.y, r.z)))
        })
        .collect()
}

fn require_json(g: &GlobalArgs, command: &str) -> Result<(), Failure> {
    match g.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Failure::Usage(format!("{command} writes JSON only"))),
    }
}

fn output(g: &GlobalArgs) -> Result<Box<dyn Write>, Failure> {
    Ok(match &g.out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).map_err(|e| {
                Failure::Evaluation(format!("cannot create {}: {e}", path.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(g: &GlobalArgs, value: &T) -> Result<(), Failure> {
    let mut w = output(g)?;
    to_json_writer(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_records(g: &GlobalArgs, frame: &BuiltinFrame, cfg: &DiffConfig, records: &[Record]) -> Result<(), Failure> {
    match g.format {
        Format::Json => write_json(
            g,
            &Records {
                version: verification::REPORT_VERSION,
                frame: frame.id().name(),
                engine: cfg.engine.name(),
                records,
            },
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(output(g)?);
            w.write_record(CSV_COLUMNS)?;
            for r in records {
                w.write_record(r.values().map(format_f64))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
