//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 computation failure, 4 a
//! verification check failed.

pub mod config;
pub mod output;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::fem2d::{self, Mesh2D};
use crate::profile::Verdict;
use crate::radial::{self, Sector};
use crate::shapes;
use crate::spaceform::BallSpec;
use crate::verify;
use config::{sha256_hex, RunConfig};
use output::{fmt_value, Record};
use suites::Suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "robinlab", version, about = "Robin, Neumann and Steklov eigenvalues on space-form balls and planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SectorArg {
    /// Lowest radially symmetric mode (λ₁).
    Radial,
    /// Lowest mode `F(r)x/|x|` (λ₂).
    Dipole,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShapeArg {
    Disk,
    Ellipse,
    Rectangle,
    Perturbed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Robin eigenvalue of a geodesic ball by the radial solver.
    Ball {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        radius: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "dipole")]
        sector: SectorArg,
        /// Write a JSON record here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// First nonzero Steklov eigenvalue of a geodesic ball.
    Steklov {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        radius: f64,
        /// Also locate it as the zero of α ↦ λ₂,α.
        #[arg(long)]
        cross_check: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Generate a mesh file.
    Mesh {
        #[arg(long, value_enum)]
        shape: ShapeArg,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        kappa: f64,
        /// Disk radius (geodesic), or base radius of a perturbed disk.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Ellipse semi-axis along x, or rectangle width.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Ellipse semi-axis along y, or rectangle height.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long)]
        h: f64,
        /// Uniform refinements applied after generation.
        #[arg(long, default_value_t = 0)]
        refine: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// FEM eigenvalues on a mesh file.
    Fem {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Steklov instead of Robin eigenvalues.
        #[arg(long)]
        steklov: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Config file or preset (`default`, `alpha_grid`).
        #[arg(long, default_value = "default")]
        config: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write a CSV table of eigenvalues.
    Sweep {
        #[arg(long, default_value = "alpha_grid")]
        config: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Io(_) | Error::Unsupported(_) => EXIT_INPUT,
            _ => EXIT_COMPUTE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn compute(e: Error) -> Failure {
    Failure { code: EXIT_COMPUTE, message: e.to_string() }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure { code: EXIT_COMPUTE, message: format!("{}: {e}", path.display()) })
}

fn check_alpha(alpha: f64) -> Result<(), Failure> {
    if !alpha.is_finite() || alpha > 0.0 {
        return Err(input_error(format!("Robin parameter must be finite and ≤ 0, got {alpha}")));
    }
    Ok(())
}

fn ball_spec(kappa: f64, dim: usize, radius: f64) -> Result<BallSpec, Failure> {
    BallSpec::new(kappa, dim, radius).map_err(|e| input_error(e.to_string()))
}

fn inputs_hash<T: Serialize>(inputs: &T) -> String {
    sha256_hex(serde_json::to_string(inputs).expect("inputs serialize").as_bytes())
}

/// Run the CLI on `args` (including the program name), writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[derive(Serialize)]
struct BallInputs {
    kappa: f64,
    dim: usize,
    radius: f64,
    alpha: f64,
    sector: SectorArg,
}

#[derive(Serialize)]
struct BallBody<'a> {
    inputs: &'a BallInputs,
    eigenvalue: f64,
    residual: f64,
    solver_stats: SolverStats,
}

#[derive(Serialize)]
struct SolverStats {
    bracket: (f64, f64),
    evaluations: usize,
    bisection_steps: usize,
}

#[derive(Serialize)]
struct SteklovInputs {
    kappa: f64,
    dim: usize,
    radius: f64,
}

#[derive(Serialize)]
struct SteklovBody<'a> {
    inputs: &'a SteklovInputs,
    sigma1: f64,
    robin_root: Option<f64>,
}

#[derive(Serialize)]
struct FemBody<'a> {
    mesh: String,
    mesh_sha256: String,
    problem: &'a str,
    alpha: f64,
    vertices: usize,
    triangles: usize,
    result: fem2d::EigenResult,
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let w = |out: &mut dyn Write, s: String| {
        writeln!(out, "{s}").map_err(|e| Failure { code: EXIT_COMPUTE, message: e.to_string() })
    };
    match cmd {
        Command::Ball { kappa, dim, radius, alpha, sector, json } => {
            check_alpha(alpha)?;
            let ball = ball_spec(kappa, dim, radius)?;
            let s = match sector {
                SectorArg::Radial => Sector::Radial,
                SectorArg::Dipole => Sector::Dipole,
            };
            let e = radial::solve_robin_ball(&ball, alpha, s).map_err(compute)?;
            w(out, fmt_value(e.lambda))?;
            if let Some(path) = json {
                let inputs = BallInputs { kappa, dim, radius, alpha, sector };
                let body = BallBody {
                    inputs: &inputs,
                    eigenvalue: e.lambda,
                    residual: e.residual,
                    solver_stats: SolverStats {
                        bracket: e.bracket,
                        evaluations: e.evaluations,
                        bisection_steps: e.bisection_steps,
                    },
                };
                write_text(&path, &Record::new("ball", inputs_hash(&inputs), body).to_json())?;
            }
            Ok(EXIT_OK)
        }
        Command::Steklov { kappa, dim, radius, cross_check, json } => {
            let ball = ball_spec(kappa, dim, radius)?;
            let sigma1 = radial::steklov_ball(&ball).map_err(compute)?;
            w(out, fmt_value(sigma1))?;
            let robin_root = if cross_check {
                let r = verify::steklov_via_robin_root(&ball).map_err(compute)?;
                w(out, fmt_value(r))?;
                Some(r)
            } else {
                None
            };
            if let Some(path) = json {
                let inputs = SteklovInputs { kappa, dim, radius };
                let body = SteklovBody { inputs: &inputs, sigma1, robin_root };
                write_text(&path, &Record::new("steklov", inputs_hash(&inputs), body).to_json())?;
            }
            Ok(EXIT_OK)
        }
        Command::Mesh { shape, kappa, radius, a, b, eps, k, h, refine, out: path } => {
            let mut mesh = match shape {
                ShapeArg::Disk => shapes::disk_mesh(kappa, radius, h),
                ShapeArg::Ellipse => shapes::ellipse_mesh(kappa, a, b, h),
                ShapeArg::Rectangle => shapes::rectangle_mesh(kappa, a, b, h),
                ShapeArg::Perturbed => shapes::perturbed_disk_mesh(kappa, radius, eps, k, h),
            }
            .map_err(|e| input_error(e.to_string()))?;
            for _ in 0..refine {
                mesh = fem2d::refine(&mesh).map_err(compute)?;
            }
            write_text(&path, &mesh.to_text())?;
            w(
                out,
                format!(
                    "vertices={} triangles={} volume={}",
                    mesh.num_vertices(),
                    mesh.triangles().len(),
                    output::fmt_sig(fem2d::domain_volume(&mesh), 15)
                ),
            )?;
            Ok(EXIT_OK)
        }
        Command::Fem { mesh, alpha, k, steklov, json } => {
            if !steklov {
                check_alpha(alpha)?;
            }
            if k == 0 {
                return Err(input_error("k must be positive"));
            }
            let text = std::fs::read_to_string(&mesh).map_err(|e| input_error(format!("{}: {e}", mesh.display())))?;
            let m = Mesh2D::from_text(&text).map_err(|e| input_error(e.to_string()))?;
            if k > m.num_vertices() {
                return Err(input_error(format!("k = {k} exceeds the {} mesh vertices", m.num_vertices())));
            }
            let result =
                if steklov { fem2d::steklov_fem(&m, k) } else { fem2d::robin_eigs_fem(&m, alpha, k) }.map_err(compute)?;
            for v in &result.eigenvalues {
                w(out, fmt_value(*v))?;
            }
            if let Some(path) = json {
                let body = FemBody {
                    mesh: mesh.display().to_string(),
                    mesh_sha256: sha256_hex(text.as_bytes()),
                    problem: if steklov { "steklov" } else { "robin" },
                    alpha: if steklov { 0.0 } else { alpha },
                    vertices: m.num_vertices(),
                    triangles: m.triangles().len(),
                    result,
                };
                let hash = sha256_hex(format!("{}|{}|{}|{}", body.mesh_sha256, body.problem, alpha, k).as_bytes());
                write_text(&path, &Record::new("fem", hash, body).to_json())?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { suite, config, json } => {
            let cfg = RunConfig::load(&config)?;
            let report = suites::run_suite(suite, &cfg)?;
            for c in &report.checks {
                let tag = match c.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::Fail => "FAIL",
                    Verdict::NotApplicable => "N/A ",
                };
                w(out, format!("{tag} {} margin={}", c.label, output::fmt_sig(c.margin, 6)))?;
            }
            w(
                out,
                format!(
                    "suite {}: {} passed, {} failed, {} not applicable",
                    report.suite,
                    report.count(Verdict::Pass),
                    report.count(Verdict::Fail),
                    report.count(Verdict::NotApplicable)
                ),
            )?;
            if let Some(path) = json {
                write_text(&path, &Record::new("verify", cfg.hash(), &report).to_json())?;
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK })
        }
        Command::Sweep { config, out: path } => {
            let cfg = RunConfig::load(&config)?;
            let rows = suites::sweep(&cfg)?;
            write_text(&path, &output::csv_table(&rows))?;
            w(out, format!("wrote {} rows to {} (config {})", rows.len(), path.display(), cfg.hash()))?;
            Ok(EXIT_OK)
        }
    }
}
