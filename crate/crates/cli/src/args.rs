use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Correlation curves of antipodal sphere colourings. Angles are given in
/// units of π; grids are `start:stop:count`.
#[derive(Debug, Parser)]
#[command(name = "antipodal", version)]
pub struct Cli {
    /// TOML file with defaults for any of the flags below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Master seed, decimal or 0x-prefixed hex [default: 0x42D].
    #[arg(long, global = true)]
    pub seed: Option<String>,

    /// Monte Carlo samples, e.g. 1e6 [default: 1e6; 2e4 per evaluation for search].
    #[arg(long, global = true)]
    pub n: Option<String>,

    /// Absolute quadrature tolerance [default: 1e-8].
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation curve as CSV, with reference columns.
    Curve(CurveArgs),
    /// Chained-inequality and cos θ bound checks as a JSON report.
    Verify(VerifyArgs),
    /// Crossings of a one-parameter band family with a reference curve.
    Sweep(SweepArgs),
    /// Simplex search over truncated spherical-harmonic colourings.
    Search(SearchArgs),
    /// Rotation-averaged correlation of a two-qubit state.
    Quantum(QuantumArgs),
    /// Slope of the correlation at π/2.
    Slope(SlopeArgs),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Catalogue label (1, hemisphere, 2, 3, 4, 3_delta:D, 2_Delta:D) or a
    /// TOML/JSON colouring file.
    #[arg(long)]
    pub colouring: Option<String>,
    /// mc, quadrature or closed_form.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "curve")]
    pub colouring: Option<String>,
    /// Verify a curve CSV instead of computing one.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// 3_delta or 2_Delta.
    #[arg(long)]
    pub family: Option<String>,
    /// Parameter values in units of π: one value, a comma list or a grid.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// c1, minus_c1 or singlet.
    #[arg(long)]
    pub reference: Option<String>,
    /// Also write the family curves with C_3 (or C_2), C_1 and Q here.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// θ grid of the curves file.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Angle in units of π.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Largest (odd) degree of the expansion.
    #[arg(long = "l-max")]
    pub l_max: Option<u32>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct QuantumArgs {
    /// singlet, phi+, phi-, psi+, mixed, or a file with a 4×4 density matrix.
    #[arg(long)]
    pub state: Option<String>,
    /// closed_form (via the Werner twirl) or mc.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct SlopeArgs {
    #[arg(long)]
    pub colouring: Option<String>,
    /// Finite-difference step in radians [default: 1e-3].
    #[arg(long)]
    pub h: Option<f64>,
}
