//! The `normcraft` command line.
//!
//! Exit status: 0 on success, 1 for usage errors, 2 for unreadable or
//! inconsistent data, 3 when a computation fails numerically.

mod commands;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use normcraft_core::decompose::{Kernel, DEFAULT_HALF_WIDTH};
use normcraft_core::synthesis::{DEFAULT_TOLERANCE, DEFAULT_WINDOW};

use crate::error::Error;
use crate::io::Precision;

pub use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "NORMCRAFT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "normcraft", version, about = "Shape/detail processing of surface normal maps")]
pub struct Cli {
    /// Sample type of written .nrm files.
    #[arg(long, global = true, value_enum, default_value_t = PrecisionArg::F64)]
    pub precision: PrecisionArg,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    F32,
    F64,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::F32 => Precision::F32,
            PrecisionArg::F64 => Precision::F64,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a normal map into shape and detail components.
    Decompose(DecomposeArgs),
    /// Apply a detail component to a target shape.
    Transfer(TransferArgs),
    /// Grow a detail swatch into a larger detail map.
    Synthesize(SynthesizeArgs),
    /// Upsample a normal map component-wise.
    Upsample(UpsampleArgs),
    /// Integrate normals into a depth map and optionally a mesh.
    Integrate(IntegrateArgs),
    /// Compare two normal maps.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Gauss,
    Avg,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// Filter half-width; the window is (2w+1)².
    #[arg(long = "w", default_value_t = DEFAULT_HALF_WIDTH)]
    pub half_width: usize,

    #[arg(long, value_enum, default_value_t = KernelArg::Gauss)]
    pub kernel: KernelArg,

    /// Gaussian standard deviation [default: w/2].
    #[arg(long)]
    pub sigma: Option<f64>,
}

impl KernelArgs {
    pub fn build(&self) -> normcraft_core::Result<Kernel> {
        match (self.kernel, self.sigma) {
            (KernelArg::Gauss, Some(s)) => Kernel::gaussian(self.half_width, s),
            (KernelArg::Gauss, None) => Kernel::gaussian_default(self.half_width),
            (KernelArg::Avg, _) => Kernel::average(self.half_width),
        }
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long = "o-shape")]
    pub shape_out: PathBuf,
    #[arg(long = "o-detail")]
    pub detail_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    /// Source detail component.
    #[arg(long)]
    pub detail: PathBuf,
    /// Target shape component.
    #[arg(long)]
    pub shape: PathBuf,
    /// Detail kept outside the region [default: flat].
    #[arg(long)]
    pub target_detail: Option<PathBuf>,
    /// Mask of the pixels receiving the detail (.png non-black or .nrm valid).
    #[arg(long)]
    pub region: Option<PathBuf>,
    /// Repeat a smaller source detail over the region.
    #[arg(long)]
    pub tile: bool,
    /// Feather the seam around the region.
    #[arg(long)]
    pub local: bool,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
    /// Also write the report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlacementArg {
    Random,
    Origin,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    /// Swatch normals (or detail with --detail-input); must be fully valid.
    #[arg(long)]
    pub swatch: PathBuf,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    /// Odd neighbourhood side.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    /// Relative slack over the best match.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PlacementArg::Random)]
    pub placement: PlacementArg,
    /// The swatch is already a detail component.
    #[arg(long)]
    pub detail_input: bool,
    /// Transfer the result onto this shape (its size overrides --width/--height).
    #[arg(long)]
    pub onto: Option<PathBuf>,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct UpsampleArgs {
    pub input: PathBuf,
    /// One of 2, 3, 4, 8.
    #[arg(long)]
    pub factor: usize,
    /// External detail enhancer, run as `PROG in.nrm out.nrm factor` [default: bicubic].
    #[arg(long)]
    pub detail_cmd: Option<PathBuf>,
    /// Enhancer timeout in seconds.
    #[arg(long, default_value_t = 300.0)]
    pub timeout: f64,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    /// Spectral on full masks, conjugate gradient otherwise.
    Auto,
    Frankot,
    Poisson,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    /// Depth output (.pfm or .csv).
    #[arg(long = "o-depth")]
    pub depth_out: PathBuf,
    /// Mesh output (.obj).
    #[arg(long = "o-obj")]
    pub obj_out: Option<PathBuf>,
    /// Mesh coordinate scale.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Relative residual of the conjugate-gradient solver.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Mae,
    Ssim,
    Rotsim,
    All,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::All)]
    pub metric: MetricArg,
    /// Half-width of the rotation-similarity window and of the Gaussian
    /// kernel extracting the shape components it is computed on.
    #[arg(long = "w", default_value_t = DEFAULT_HALF_WIDTH)]
    pub half_width: usize,
}

/// Accepts the single-dash long forms `-o-shape`, `-o-detail`, `-o-depth`
/// and `-o-obj` alongside their `--` spellings.
fn normalize_args<I, T>(args: I) -> Vec<OsString>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    args.into_iter()
        .map(|a| {
            let a: OsString = a.into();
            match a.to_str() {
                Some(s) if s.starts_with("-o-") => format!("-{s}").into(),
                _ => a,
            }
        })
        .collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Core(c) if c.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_DATA,
    }
}

/// Sizes the global worker pool from [`THREADS_ENV`], if set.
pub fn init_threads() {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("{THREADS_ENV}: {e}");
            }
        }
        _ => log::warn!("{THREADS_ENV}={v:?} is not a positive integer, ignoring it"),
    }
}

/// Parses `args` (including the program name), runs the command, writes the
/// report to `out` and diagnostics to standard error. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = match Cli::try_parse_from(normalize_args(args)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match commands::execute(&cli) {
        Ok(report) => {
            if let Err(e) = out.write_all(report.to_text().as_bytes()) {
                eprintln!("error: writing report: {e}");
                return EXIT_DATA;
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
