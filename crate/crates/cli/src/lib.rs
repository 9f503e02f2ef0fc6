//! Command-line front end for the tail-sensitive goodness-of-fit test.

pub mod args;
pub mod commands;
pub mod distribution;
pub mod error;
pub mod ingest;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use error::{CliError, CliResult};

use args::{Cli, Command};

/// Environment variable that caps the worker thread count.
pub const THREADS_ENV: &str = "TAILTEST_THREADS";

/// Runs the tool and returns the process exit code: 0 on success, 1 on
/// input errors, 2 when a numerical method fails to converge.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Test(a) => commands::test(a),
        Command::NullTable(a) => commands::null_table(a),
        Command::Power(a) => commands::power(a),
        Command::Ks(a) => commands::ks(a),
        Command::McCalibrate(a) => commands::mc_calibrate(a, err),
    };
    match result {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Configures the global thread pool from [`THREADS_ENV`].
pub fn init_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Input(format!("{THREADS_ENV}={value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot configure thread pool: {e}")))
}
