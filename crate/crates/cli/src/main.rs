mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Projective evolutes of polygons and the dynamics of the evolute map.
#[derive(Debug, Parser)]
#[command(name = "evolute", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply the evolute map to a polygon given as JSON.
    Evolute(EvoluteArgs),
    /// Pentagon moduli: the closed-form map and its level-curve dynamics.
    #[command(subcommand)]
    Pentagon(PentagonCommand),
    /// Recurrence coefficients and the frieze route for T.
    Frieze(FriezeArgs),
    /// Hexagon orbits and the circle map f.
    #[command(subcommand)]
    Hexagon(HexagonCommand),
    /// Run the exact identity suite at seeded random rational points.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
enum PentagonCommand {
    /// Iterate T from (x, y) and report invariants and degeneracies.
    Map(MapArgs),
    /// Sample the components of the level curves I = r.
    Levelset(LevelsetArgs),
    /// Check that T^2 acts as multiplication by -4 on the circle coordinate.
    Conjugacy(ConjugacyArgs),
    /// The singular levels of the invariant.
    Singular(SingularArgs),
}

#[derive(Debug, Subcommand)]
enum HexagonCommand {
    /// Orbit of a hexagon (or many random hexagons) under T.
    Orbit(OrbitArgs),
    /// Iterate f(t) = (2t-1)/(t^2-1) on both coordinates of H(a, b).
    F(FArgs),
    /// One step of T on normalised hexagon coordinates.
    Step(StepArgs),
}

/// Arithmetic selection shared by commands that support both modes.
#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct Arith {
    /// Exact rational arithmetic.
    #[arg(long, conflicts_with = "approx")]
    pub exact: bool,
    /// Floating-point arithmetic.
    #[arg(long)]
    pub approx: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Outputs {
    /// Write a JSON report (with the configuration used) to PATH, or `-`
    /// for standard output.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvoluteArgs {
    /// Polygon JSON file, or `-` for standard input.
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub iters: usize,
    /// Overlay of P and T(P).
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub arith: Arith,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Debug, Args, Serialize)]
pub struct MapArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    #[arg(long, default_value_t = 2)]
    pub iters: usize,
    #[command(flatten)]
    pub arith: Arith,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Debug, Args, Serialize)]
pub struct LevelsetArgs {
    /// Level values; defaults to -1, -0.05, 1, 12.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Vec<f64>,
    /// Samples per component, evenly spaced in flow time.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// ODE tolerance.
    #[arg(long, env = "EVOLUTE_DEFAULT_TOL", default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub arith: Arith,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Debug, Args, Serialize)]
pub struct ConjugacyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Largest accepted residual, as a fraction of the period.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// ODE tolerance.
    #[arg(long, env = "EVOLUTE_DEFAULT_TOL", default_value_t = 1e-10)]
    pub ode_tol: f64,
    #[command(flatten)]
    pub arith: Arith,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Debug, Args, Serialize)]
pub struct SingularArgs {
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Debug, Args, Serialize)]
pub struct FriezeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    /// Read (x, y) as frame coordinates instead of frieze coordinates.
    #[arg(long)]
    pub frame: bool,
    #[command(flatten)]
    pub arith: Arith,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
    /// Number of random starts.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Start at `x5,y5,x6,y6` instead of a random point.
    #[arg(long, allow_hyphen_values = true)]
    pub coords: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Debug, Args, Serialize)]
pub struct FArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, default_value_t = 5)]
    pub iters: usize,
    #[command(flatten)]
    pub arith: Arith,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Debug, Args, Serialize)]
pub struct StepArgs {
    /// `x5,y5,x6,y6`.
    #[arg(long, allow_hyphen_values = true)]
    pub coords: String,
    #[arg(long, default_value_t = 1)]
    pub iters: usize,
    #[command(flatten)]
    pub arith: Arith,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[command(flatten)]
    pub out: Outputs,
}

/// Whether a command's checks passed.
pub enum Status {
    Ok,
    CheckFailed,
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    use commands::*;
    match cli.command {
        Command::Evolute(a) => evolute_cmd(&a),
        Command::Pentagon(PentagonCommand::Map(a)) => pentagon::map(&a),
        Command::Pentagon(PentagonCommand::Levelset(a)) => pentagon::levelset(&a),
        Command::Pentagon(PentagonCommand::Conjugacy(a)) => pentagon::conjugacy(&a),
        Command::Pentagon(PentagonCommand::Singular(a)) => pentagon::singular(&a),
        Command::Frieze(a) => frieze_cmd(&a),
        Command::Hexagon(HexagonCommand::Orbit(a)) => hexagon::orbit(&a),
        Command::Hexagon(HexagonCommand::F(a)) => hexagon::f(&a),
        Command::Hexagon(HexagonCommand::Step(a)) => hexagon::step(&a),
        Command::Verify(a) => verify_cmd(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
