use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harmonic_newton::newton::LinsysMode;
use harmonic_newton::search::{Window, DEFAULT_DEDUP_TOL, DEFAULT_MATCH_TOL};
use harmonic_newton::Complex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "hnewton",
    version,
    about = "Zeros of harmonic mappings f = h + conj(g) by the harmonic Newton iteration"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Find the zeros reached from a grid of initial points.
    Solve(SolveArgs),
    /// Render basins of attraction.
    Basins(BasinsArgs),
    /// Render a phase plot.
    Phaseplot(PhaseplotArgs),
    /// Initial points near a pole, at infinity or near a singular zero.
    Seeds(SeedsArgs),
    /// Convergence certificates around given points.
    Certify(CertifyArgs),
    /// Laurent coefficients of h and g.
    Laurent(LaurentArgs),
    /// Basins of f − δc for several δ around a singular zero.
    Sweep(SweepArgs),
    /// Re-run a command from its JSON manifest.
    Replay(ReplayArgs),
}

/// Parse `re,im` or a bare real number.
pub fn parse_point(s: &str) -> Result<Complex, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re,im`, got `{s}`")),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct FunctionArgs {
    /// Catalog function: mpw, rhie, wilmshurst, tan_conj, einstein, isothermal.
    #[arg(long, conflicts_with = "function")]
    pub builtin: Option<String>,
    /// JSON function specification.
    #[arg(long)]
    pub function: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub w: Option<Complex>,
    /// Add a constant: evaluates f + c.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub shift: Option<Complex>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct GridArgs {
    /// Window `x_min,x_max,y_min,y_max`.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<Window>,
    #[arg(long)]
    pub mesh: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct StopArgs {
    #[arg(long)]
    pub maxit: Option<usize>,
    #[arg(long)]
    pub restol: Option<f64>,
    #[arg(long)]
    pub steptol: Option<f64>,
    /// Use the 2×2 linear solve: never, always, or auto near the critical set.
    #[arg(long)]
    pub linsys: Option<LinsysMode>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub stop: StopArgs,
    #[arg(long, default_value_t = DEFAULT_DEDUP_TOL)]
    pub dedup_tol: f64,
    /// Write zeros as CSV (`-` for stdout).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write zeros as JSON (`-` for stdout).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageFormat {
    Png,
    Ppm,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Ppm => "ppm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BasinsArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub stop: StopArgs,
    /// Image path; `.png` or `.ppm`.
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_DEDUP_TOL)]
    pub dedup_tol: f64,
    #[arg(long, default_value_t = DEFAULT_MATCH_TOL)]
    pub match_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub palette_seed: u64,
    /// Iteration count at which shading bottoms out; defaults to maxit.
    #[arg(long)]
    pub max_shade: Option<u32>,
    /// Draw the zeros as dots of this pixel radius.
    #[arg(long)]
    pub markers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PhaseplotArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub stop: StopArgs,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 800)]
    pub width: usize,
    /// Defaults to the window's aspect ratio.
    #[arg(long)]
    pub height: Option<usize>,
    /// Pixels with |f| at or below this are black.
    #[arg(long, default_value_t = 0.0)]
    pub zero_threshold: f64,
    /// Overlay the catalogued poles as white dots.
    #[arg(long)]
    pub poles: bool,
    /// Overlay zeros found by a grid search as black dots.
    #[arg(long)]
    pub zeros: bool,
    #[arg(long, default_value_t = 3)]
    pub marker_radius: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[group(id = "target", required = true, multiple = false)]
pub struct SeedTarget {
    /// Pole location `re,im`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub at_pole: Option<Complex>,
    #[arg(long)]
    pub at_infinity: bool,
    /// Singular zero `re,im`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub at_singular: Option<Complex>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SeedsArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    pub target: SeedTarget,
    #[command(flatten)]
    pub stop: StopArgs,
    /// Pole order, or degree at infinity (detected there when omitted).
    #[arg(long)]
    pub order: Option<u32>,
    /// Radius of the expansion circle.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = harmonic_newton::laurent::DEFAULT_NODES)]
    pub nodes: usize,
    /// Perturbation size for singular-zero seeds.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = harmonic_newton::seeding::DEFAULT_NORMAL_FORM_ORDER)]
    pub normal_order: usize,
    /// Iterate from every seed and print the outcome.
    #[arg(long)]
    pub iterate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyMethod {
    Kantorovich,
    Mysovskii,
    Both,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Point `re,im`; repeat for several.
    #[arg(long = "at", required = true, value_parser = parse_point, allow_hyphen_values = true)]
    pub points: Vec<Complex>,
    #[arg(long, value_enum, default_value_t = CertifyMethod::Kantorovich)]
    pub method: CertifyMethod,
    /// Kantorovich domain radius; defaults to half the distance to the nearest pole, else 1.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Grid size of the supremum estimate.
    #[arg(long, default_value_t = 64)]
    pub grid_n: usize,
    /// Analytic bound on |h''| over the domain (use with --sup-ddg).
    #[arg(long, requires = "sup_ddg")]
    pub sup_ddh: Option<f64>,
    #[arg(long, requires = "sup_ddh")]
    pub sup_ddg: Option<f64>,
    /// Largest Mysovskii domain radius; defaults like --radius.
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub r_steps: usize,
    #[arg(long, default_value_t = 15)]
    pub sample_n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LaurentArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, conflicts_with = "at_infinity", required_unless_present = "at_infinity")]
    pub center: Option<Complex>,
    #[arg(long)]
    pub at_infinity: bool,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = harmonic_newton::laurent::DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, default_value_t = -4, allow_hyphen_values = true)]
    pub k_min: i32,
    #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
    pub k_max: i32,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub stop: StopArgs,
    /// Singular zero of the unperturbed map.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
    pub at: Complex,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0,0.003"
    )]
    pub deltas: Vec<f64>,
    #[arg(long, short)]
    pub output_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = ImageFormat::Png)]
    pub format: ImageFormat,
    #[arg(long, default_value_t = harmonic_newton::seeding::DEFAULT_NORMAL_FORM_ORDER)]
    pub normal_order: usize,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = harmonic_newton::laurent::DEFAULT_NODES)]
    pub nodes: usize,
    /// Orbits reaching a singular zero stop about √ε away from it, hence the
    /// coarse default.
    #[arg(long, default_value_t = 1e-4)]
    pub dedup_tol: f64,
    #[arg(long, default_value_t = DEFAULT_MATCH_TOL)]
    pub match_tol: f64,
    /// Zeros within this distance of the singular zero are counted.
    #[arg(long, default_value_t = 0.1)]
    pub region: f64,
    #[arg(long, default_value_t = 0)]
    pub palette_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest written next to an earlier run's outputs.
    pub manifest: PathBuf,
}
