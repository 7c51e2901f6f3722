//! Command-line grammar. Every value is optional here so that config-file
//! entries and defaults can fill the gaps; see [`crate::commands`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "qkd-bound",
    version,
    about = "Phase-error bounds, key rates and channel simulations for qudit QKD with partial monitoring"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified phase-error bound for one error rate.
    Bound(BoundArgs),
    /// Tabulate the bound over a grid of error rates (cached).
    Curve(CurveArgs),
    /// Error tolerance for several dimensions and subsets.
    Tolerance(ToleranceArgs),
    /// Key rate from a measured-statistics CSV file.
    Decoy(DecoyArgs),
    /// Optimised key rate versus channel loss.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat key = value configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output format.
    #[arg(long)]
    pub format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Duality-gap tolerance.
    #[arg(long)]
    pub gap_tol: Option<f64>,
    /// Feasibility tolerance.
    #[arg(long)]
    pub feas_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Impose the full T-T joint distribution.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub time_joint: Option<bool>,
    /// Impose Alice's reduced state I/d.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub alice_marginal: Option<bool>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub q_min: Option<f64>,
    #[arg(long)]
    pub q_max: Option<f64>,
    #[arg(long)]
    pub q_step: Option<f64>,
    /// Curve cache directory (overrides QKD_BOUND_CACHE_DIR).
    #[arg(long, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the curve cache.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_cache: Option<bool>,
}

#[derive(Debug, Args)]
pub struct KeyArgs {
    /// Symbols per second (default 2500/d MHz).
    #[arg(long)]
    pub symbol_rate: Option<f64>,
    #[arg(long)]
    pub p_mu: Option<f64>,
    #[arg(long)]
    pub p_nu: Option<f64>,
    #[arg(long)]
    pub p_omega: Option<f64>,
    /// Bound-curve abscissa: conservative = max(e_T1, e_F1), strict = e_F1.
    #[arg(long)]
    pub lookup: Option<String>,
    /// Error-correction charge: aggregate over intensities or signal only.
    #[arg(long)]
    pub leakage: Option<String>,
    /// Error-correction inefficiency factor (>= 1).
    #[arg(long)]
    pub ec_efficiency: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Qudit dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// `full`, a count, or an index list such as `0,2`.
    #[arg(long)]
    pub subset: Option<String>,
    /// T-basis error rate.
    #[arg(long)]
    pub qber: Option<f64>,
    /// F-basis error rate (defaults to --qber).
    #[arg(long)]
    pub qber_f: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Qudit dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// `full`, a count, or an index list such as `0,2`.
    #[arg(long)]
    pub subset: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    /// One or more dimensions, comma separated.
    #[arg(long)]
    pub d: Option<String>,
    /// Subset specs separated by `,` (or `;` when using index lists).
    #[arg(long)]
    pub subsets: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DecoyArgs {
    /// Qudit dimension.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub subset: Option<String>,
    /// Measured-statistics CSV file.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub key: KeyArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Qudit dimension.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub subset: Option<String>,
    /// `ideal` or `saturating`.
    #[arg(long)]
    pub detector: Option<String>,
    /// Saturation ceiling a (Hz).
    #[arg(long)]
    pub sat_max_rate: Option<f64>,
    /// Saturation scale b (Hz).
    #[arg(long)]
    pub sat_scale_rate: Option<f64>,
    #[arg(long)]
    pub eta_det: Option<f64>,
    /// Dark-count probability per symbol.
    #[arg(long)]
    pub dark_count: Option<f64>,
    /// Intrinsic error for both bases (default 0.005 d).
    #[arg(long)]
    pub intrinsic_error: Option<f64>,
    #[arg(long)]
    pub intrinsic_error_t: Option<f64>,
    #[arg(long)]
    pub intrinsic_error_f: Option<f64>,
    /// Probability of the T basis (P_F = 1 - P_T).
    #[arg(long)]
    pub p_t: Option<f64>,
    #[arg(long)]
    pub intensity_min: Option<f64>,
    #[arg(long)]
    pub intensity_max: Option<f64>,
    #[arg(long)]
    pub loss_min: Option<f64>,
    #[arg(long)]
    pub loss_max: Option<f64>,
    #[arg(long)]
    pub loss_step: Option<f64>,
    /// Fix the intensities instead of optimising (all three required).
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[command(flatten)]
    pub key: KeyArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: Common,
}
