use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use memread_core::optimize::{Free, Scheme};

use crate::{CliResult, Failure, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "memread", version, about = "Read-out of atomic ensemble quantum memories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal fidelity against wall loss A (figure data)
    FidelityCurve(CurveArgs),
    /// One read-out through the channel pipeline
    Run(RunArgs),
    /// Convergence of the time-sliced oracle towards the analytic maps
    OracleCheck(OracleArgs),
    /// Numeric optimum next to the closed form
    Optimize(OptimizeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FidelityCurve(_) => "fidelity-curve",
            Command::Run(_) => "run",
            Command::OracleCheck(_) => "oracle-check",
            Command::Optimize(_) => "optimize",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Where a command writes.
#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// output file; `-` for stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// directory for a default-named file when --out is absent
    #[arg(long, env = crate::OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
}

pub fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: memread_core::Error| e.to_string())
}

pub fn parse_free(s: &str) -> Result<Free, String> {
    s.parse().map_err(|e: memread_core::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    /// single, double or single-squeezed
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 0.0)]
    pub a_min: f64,
    #[arg(long, default_value_t = 0.95)]
    pub a_max: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl CurveArgs {
    pub fn config(&self) -> CliResult<SweepConfig> {
        let cfg = SweepConfig {
            scheme: self.scheme,
            a_min: self.a_min,
            a_max: self.a_max,
            steps: self.steps,
            format: self.output.format.unwrap_or(Format::Csv),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_scheme, default_value = "single")]
    pub scheme: Scheme,
    /// coupling; defaults to the optimal unit-gain value for the loss
    #[arg(long)]
    pub kappa: Option<f64>,
    /// wall loss A
    #[arg(long, default_value_t = 0.0)]
    pub loss: f64,
    /// stored quadrature means `x,p`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0")]
    pub mean: Vec<f64>,
    /// amplifier intensity gain; defaults to the unit-gain value when above 1
    #[arg(long)]
    pub gain: Option<f64>,
    /// squeezing parameter for uniform-squeezed
    #[arg(long, allow_hyphen_values = true)]
    pub uniform_r: Option<f64>,
    /// flat-mode variance for single-squeezed
    #[arg(long)]
    pub selective_v: Option<f64>,
    /// finite squeezing of the p~ modes (infinite when absent)
    #[arg(long)]
    pub tilde_r: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// single or double
    #[arg(long, value_parser = parse_scheme, default_value = "single")]
    pub scheme: Scheme,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    pub kappa: f64,
    /// increasing slice counts, comma separated
    #[arg(long, value_delimiter = ',')]
    pub slices: Vec<usize>,
    /// Larmor phase Omega T of the two-cell scheme
    #[arg(long, default_value_t = 300.0)]
    pub omega_t: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 0.0)]
    pub loss: f64,
    /// searched parameters (kappa_sq, v, r), comma separated; scheme default when absent
    #[arg(long, value_delimiter = ',', value_parser = parse_free)]
    pub frees: Vec<Free>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Loss range accepted on the command line.
pub fn check_loss(a: f64) -> CliResult<()> {
    if !(0.0..=0.999).contains(&a) {
        return Err(Failure::Validation(format!("loss A = {a} outside [0, 0.999]")));
    }
    Ok(())
}
