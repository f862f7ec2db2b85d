use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::grid::AxisSpec;

#[derive(Debug, Parser)]
#[command(
    name = "curvstream",
    version,
    about = "Streaming-term coefficients in curvilinear direction coordinates"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Derivative engine.
    #[arg(long, value_enum, default_value_t = EngineArg::Dual, global = true)]
    pub engine: EngineArg,
    /// Step of the central-difference engine.
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    /// Seed of the random-state generator.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Leave the timestamp out of reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Dual,
    Fd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients at explicit states.
    Coeffs(CoeffsArgs),
    /// Coefficients over a spatial grid and a Gauss–Legendre × uniform angular grid.
    Sweep(SweepArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Test whether a conservation form can exist for a frame.
    Conservation(ConservationArgs),
    /// Parallel-transport holonomy around a latitude loop.
    Holonomy(HolonomyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameName {
    CylindricalI,
    CylindricalII,
    Sphere,
    Ellipsoid,
    Paraboloid,
    Graph,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyFrame {
    All,
    CylindricalI,
    CylindricalII,
    Sphere,
    Ellipsoid,
    Paraboloid,
    Graph,
    Constant,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    /// Semi-axis along x (ellipsoid) or x² coefficient (paraboloid).
    #[arg(long)]
    pub a: Option<f64>,
    /// Semi-axis along y (ellipsoid) or y² coefficient (paraboloid).
    #[arg(long)]
    pub b: Option<f64>,
    /// Semi-axis along z (ellipsoid).
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    #[arg(long, value_enum)]
    pub frame: FrameName,
    #[command(flatten)]
    pub shape: ShapeArgs,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Cartesian point `x,y,z`; repeatable. Takes precedence over --rho/--theta/--phi.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub point: Vec<[f64; 3]>,
    /// Radius of the (scaled) spherical position.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Colatitude of the (scaled) spherical position.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Azimuth of the (scaled) spherical position.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub frame: FrameArgs,
    #[command(flatten)]
    pub position: PointArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub frame: FrameArgs,
    /// Explicit points `x,y,z`; repeatable. Replaces the axis grids.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub point: Vec<[f64; 3]>,
    /// `min:max:count` along x.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_x: Option<AxisSpec>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_y: Option<AxisSpec>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_z: Option<AxisSpec>,
    /// Number of Gauss–Legendre μ nodes.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub mu_count: u32,
    /// Number of uniform ω nodes on [0, 2π).
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub omega_count: u32,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = VerifyFrame::All)]
    pub frame: VerifyFrame,
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Restrict to these checks; repeatable.
    #[arg(long, value_parser = parse_check)]
    pub check: Vec<curvstream::verification::CheckKind>,
    /// Colatitudes for the holonomy check; repeatable.
    #[arg(long)]
    pub theta: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ConservationArgs {
    #[command(flatten)]
    pub frame: FrameArgs,
    #[arg(long, default_value_t = curvstream::verification::DEFAULT_SPATIAL_SAMPLES)]
    pub spatial_samples: usize,
    #[arg(long, default_value_t = curvstream::verification::DEFAULT_ANGULAR_SAMPLES)]
    pub angular_samples: usize,
    #[arg(long, default_value_t = curvstream::verification::CONSERVATION_TOL)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct HolonomyArgs {
    #[arg(long, value_enum, default_value_t = FrameName::Sphere)]
    pub frame: FrameName,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Colatitude of the loop.
    #[arg(long)]
    pub theta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got '{s}'"));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("'{p}': {e}"))?;
        if !slot.is_finite() {
            return Err(format!("'{p}' is not finite"));
        }
    }
    Ok(out)
}

fn parse_check(s: &str) -> Result<curvstream::verification::CheckKind, String> {
    s.parse().map_err(|e: curvstream::Error| e.to_string())
}
