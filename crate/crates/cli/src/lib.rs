//! Library side of the `recombine` command-line tool.

pub mod bench;
pub mod cli;
pub mod error;
pub mod input;
pub mod lsq;
pub mod reduce;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;

pub use error::{CliError, CliResult};

use cli::{Cli, Command};

fn emit(bytes: &[u8], out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("output serializes");
    bytes.push(b'\n');
    bytes
}

pub fn execute(command: &Command) -> CliResult<()> {
    match command {
        Command::Reduce(args) => {
            let (output, failure) = reduce::run_reduce(args)?;
            emit(&json_bytes(&output), args.out.as_deref())?;
            failure.map_or(Ok(()), Err)
        }
        Command::Lsq(args) => emit(&json_bytes(&lsq::run_lsq(args)?), args.out.as_deref()),
        Command::Bench(args) => {
            let rows = bench::bench_rows(args)?;
            let mut bytes = Vec::new();
            bench::write_bench(args, &rows, &mut bytes)?;
            emit(&bytes, args.out.as_deref())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("recombine: {e}");
            e.exit_code()
        }
    }
}
