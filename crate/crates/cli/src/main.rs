use std::io::{self, BufWriter};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut err = io::stderr();
    ExitCode::from(pseudostop_cli::run_from(std::env::args_os(), &mut out, &mut err))
}
