//! Command-line front end: instance files, theorem checks, fuzz campaigns
//! and Monte Carlo runs, all reporting as JSON lines on standard output.
//!
//! Exit codes: 0 when everything agrees, 1 on a counterexample or a failed
//! estimator, 2 on invalid input.

pub mod commands;
pub mod instance;
pub mod output;

use std::io::{self, Write};

use clap::{Parser, Subcommand};

pub use commands::{CheckArgs, CheckName, CoxArgs, FuzzArgs, McCommand, PoissonArgs, WilliamsArgs};
pub use instance::{InputError, Instance, InstanceFile};

pub const EXIT_OK: u8 = 0;
pub const EXIT_COUNTEREXAMPLE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Parameter(String),
    #[error(transparent)]
    Core(#[from] pseudostop_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "pseudostop", version, about = "Exact checks of pseudo-stopping time theorems on finite spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run theorem checks on an instance file.
    Check(CheckArgs),
    /// Run the theorem suite on generated instances.
    Fuzz(FuzzArgs),
    /// Monte Carlo reproductions of the continuous-time examples.
    #[command(subcommand)]
    Mc(McCommand),
}

/// Runs a parsed command, writing the report to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::Check(args) => commands::cmd_check(args, out),
        Command::Fuzz(args) => commands::cmd_fuzz(args, out),
        Command::Mc(mc) => commands::cmd_mc(mc, out),
    };
    let result = result.and_then(|code| out.flush().map(|_| code).map_err(CliError::from));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

/// Parses `args` as a command line and runs it. Usage errors exit with 2.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            }
        }
    }
}
