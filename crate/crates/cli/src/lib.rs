//! Command-line front end: figure data, protocol runs, optimizer tables, oracle reports.
//!
//! Every command renders its result to a string first, so identical inputs give
//! byte-identical files.

pub mod args;
pub mod optimize;
pub mod oracle;
pub mod output;
pub mod run;
pub mod sweep;

use std::fmt;
use std::process::ExitCode;

pub use args::{Cli, Command, Format};
pub use output::{fmt_num, round12, Rendered};
pub use sweep::{fidelity_curve, SweepConfig, SweepRow};

/// Variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MEMREAD_OUT_DIR";

/// Command failure, mapped onto the process exit status.
#[derive(Debug)]
pub enum Failure {
    /// bad flags or parameters (exit 2)
    Validation(String),
    /// a documented acceptance threshold was exceeded (exit 3)
    Threshold(String),
    /// anything else: I/O, numerical breakdown (exit 1)
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Threshold(_) => 3,
            Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "invalid input: {m}"),
            Failure::Threshold(m) => write!(f, "threshold exceeded: {m}"),
            Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<memread_core::Error> for Failure {
    fn from(e: memread_core::Error) -> Self {
        use memread_core::Error as E;
        match e {
            E::InvalidParameter { .. } | E::Unsupported(_) | E::UnknownMode(_) | E::DuplicateMode(_) => {
                Failure::Validation(e.to_string())
            }
            other => Failure::Runtime(other.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

/// Runs a parsed command: renders, writes, then reports any threshold breach.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let (rendered, dest) = match &cli.command {
        Command::FidelityCurve(a) => {
            let cfg = a.config()?;
            (sweep::fidelity_curve(&cfg)?, a.output.clone())
        }
        Command::Run(a) => (run::cmd_run(a)?, a.output.clone()),
        Command::OracleCheck(a) => (oracle::cmd_oracle_check(a)?, a.output.clone()),
        Command::Optimize(a) => (optimize::cmd_optimize(a)?, a.output.clone()),
    };
    output::deliver(&rendered, &dest, cli.command.name())?;
    match rendered.breach {
        Some(msg) => Err(Failure::Threshold(msg)),
        None => Ok(()),
    }
}

/// Entry point shared by the binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("memread: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
